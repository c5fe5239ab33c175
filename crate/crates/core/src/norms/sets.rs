//! Families of node sets and the restricted weak-type probe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lp::{lp_norm_with, weak_norm_with};
use super::operators::{GridOperator, PartialSumOp, WeightedOp};
use super::probe::{prepare, NormKind, OperatorKind, ProbeEntry, ProbeOptions, ProbeReport};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::measure::{MeasureSpec, PowerWeightSpec};
use crate::opoly::OrthoBasis;

/// Minimum size of the family returned by [`standard_sets`].
pub const MIN_FAMILY: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSet {
    pub label: String,
    pub indices: Vec<usize>,
}

fn interval(grid: &Grid, lo: f64, hi: f64, with_atoms: bool) -> Vec<usize> {
    grid.nodes()
        .iter()
        .zip(grid.atom_masses())
        .enumerate()
        .filter(|(_, (&x, &a))| x >= lo && x <= hi && (with_atoms || a == 0.0))
        .map(|(i, _)| i)
        .collect()
}

/// Dyadic intervals anchored at `+-1`, at every singularity and at every
/// interior mass point (with and without the atoms they contain), the
/// atoms alone, and seeded random unions of at most four intervals. Random
/// sets are added until the family has at least `MIN_FAMILY` members and at
/// least `random` of them are random.
pub fn standard_sets(grid: &Grid, spec: &MeasureSpec, random: usize, seed: u64) -> Vec<NodeSet> {
    let mut sets: Vec<NodeSet> = Vec::new();
    let push = |label: String, indices: Vec<usize>, sets: &mut Vec<NodeSet>| {
        if !indices.is_empty() && !sets.iter().any(|s| s.indices == indices) {
            sets.push(NodeSet { label, indices });
        }
    };
    let mut centres: Vec<f64> = spec
        .base
        .as_jacobi()
        .map(|j| j.singularities.iter().map(|s| s.t).collect())
        .unwrap_or_default();
    centres.extend(
        spec.masses
            .iter()
            .map(|m| m.location)
            .filter(|a| a.abs() < 1.0),
    );
    for j in -1..=30 {
        let h = 2f64.powi(-j);
        let mut any = false;
        for with_atoms in [true, false] {
            let tag = if with_atoms { "" } else { " without atoms" };
            let right = interval(grid, 1.0 - h, 1.0, with_atoms);
            let left = interval(grid, -1.0, -1.0 + h, with_atoms);
            any |= !right.is_empty() || !left.is_empty();
            push(format!("[1-{h},1]{tag}"), right, &mut sets);
            push(format!("[-1,-1+{h}]{tag}"), left, &mut sets);
            for &c in &centres {
                let s = interval(grid, c - h, c + h, with_atoms);
                any |= !s.is_empty();
                push(format!("[{c}-{h},{c}+{h}]{tag}"), s, &mut sets);
            }
        }
        if !any {
            break;
        }
    }
    for (i, x, _) in grid.atoms() {
        push(format!("atom {x}"), vec![i], &mut sets);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = (sets.len() + random).max(MIN_FAMILY);
    let m = grid.len() as f64;
    let mut attempts = 0;
    while sets.len() < target && attempts < 100 * target {
        attempts += 1;
        let pieces = rng.random_range(1..=4);
        let mut idx: Vec<usize> = Vec::new();
        let mut label = String::from("union");
        for _ in 0..pieces {
            let c: f64 = rng.random_range(-1.0..1.0);
            let len = (1.0 / m).powf(rng.random_range(0.0..1.0));
            let (lo, hi) = ((c - len / 2.0).max(-1.0), (c + len / 2.0).min(1.0));
            idx.extend(interval(grid, lo, hi, true));
            label += &format!(" [{lo:.4},{hi:.4}]");
        }
        idx.sort_unstable();
        idx.dedup();
        push(label, idx, &mut sets);
    }
    sets
}

/// `max_E ||u S_n(u^{-1} chi_E)||_{p,inf} / ||chi_E||_p` for every degree,
/// with the extremal set recorded per degree.
pub fn weak_type_probe(
    basis: &OrthoBasis,
    grid: &Grid,
    p: f64,
    u: &PowerWeightSpec,
    sets: &[NodeSet],
    degrees: &[usize],
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!(
            "p = {p} must lie in (1, inf)"
        )));
    }
    if sets.is_empty() {
        return Err(Error::InvalidWeight("empty set family".into()));
    }
    if let Some(bad) = sets
        .iter()
        .flat_map(|s| &s.indices)
        .find(|&&i| i >= grid.len())
    {
        return Err(Error::GridMismatch(format!(
            "set index {bad} outside the grid"
        )));
    }
    let spec = basis.measure();
    u.validate_for(spec)?;
    let (_, table) = prepare(basis, grid, degrees)?;
    let w = grid.weights();
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    degrees.dedup();
    let entries = degrees
        .par_iter()
        .map(|&n| {
            let op = WeightedOp::new(
                PartialSumOp::partial_sum(&table, grid, n)?,
                spec,
                grid,
                u,
                u,
            )?;
            let (best, label) = sets
                .iter()
                .map(|s| {
                    let mut chi = vec![0.0; grid.len()];
                    s.indices.iter().for_each(|&i| chi[i] = 1.0);
                    let denom = lp_norm_with(&chi, w, p);
                    let r = if denom > 0.0 {
                        weak_norm_with(&op.apply(&chi), w, p) / denom
                    } else {
                        0.0
                    };
                    (r, &s.label)
                })
                .fold(
                    (0.0, None),
                    |acc, (r, l)| if r > acc.0 { (r, Some(l)) } else { acc },
                );
            Ok(ProbeEntry {
                n,
                estimate: best,
                maximizer: label.cloned().unwrap_or_default(),
                iterations: 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let opts = ProbeOptions {
        trials: sets.len(),
        ..opts.clone()
    };
    Ok(ProbeReport::assemble(
        OperatorKind::PartialSum,
        NormKind::RestrictedWeak,
        p,
        (u.clone(), u.clone()),
        &opts,
        grid.len(),
        entries,
    ))
}
