//! Lower-bound estimates of operator norms and their growth in `n`.
//!
//! For `p = 2` the norm is the largest singular value of the weighted
//! matrix. Otherwise the estimate is the best ratio `||A f||/||f||` over
//! structured candidates (constants, intervals at the ends, single nodes,
//! atoms), seeded random trials, and a power iteration with the duality map
//! `J_p(y) = |y|^{p-1} sgn y` started from the best candidates.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lp::{conjugate_exponent, lp_norm_with, weak_norm_with};
use super::operators::{
    weight_at_nodes, Adjoint, CommutatorOp, GridOperator, MaximalOp, PartialSumOp, WeightedOp,
};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::measure::{MeasureSpec, PowerWeightSpec};
use crate::opoly::OrthoBasis;
use crate::transforms::{BasisTable, Symbol};

/// Verdict threshold on the fitted exponent.
pub const GROWTH_THRESHOLD: f64 = 0.02;

/// Largest RMS residual (in `log`) for which a fit supports a verdict.
pub const FIT_RESIDUAL_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Random trial functions per operator.
    pub trials: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Relative change at which the power iteration stops.
    pub tolerance: f64,
    /// Candidates used as starting points of the power iteration.
    pub power_starts: usize,
    /// Use the singular value decomposition at `p = 2`.
    pub spectral_at_two: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            trials: 24,
            seed: 0,
            max_iterations: 80,
            tolerance: 1e-10,
            power_starts: 3,
            spectral_at_two: true,
        }
    }
}

/// Which norm of `A f` is compared with `||f||_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetNorm {
    Strong,
    Weak,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Where the best ratio came from.
    pub maximizer: String,
    pub iterations: usize,
    pub argmax: Vec<f64>,
}

fn target_norm(values: &[f64], weights: &[f64], p: f64, target: TargetNorm) -> f64 {
    match target {
        TargetNorm::Strong => lp_norm_with(values, weights, p),
        TargetNorm::Weak => weak_norm_with(values, weights, p),
    }
}

fn ratio(op: &dyn GridOperator, f: &[f64], p: f64, target: TargetNorm) -> Option<f64> {
    let w = op.weights();
    let nf = lp_norm_with(f, w, p);
    if !(nf > 0.0 && nf.is_finite()) {
        return None;
    }
    let r = target_norm(&op.apply(f), w, p, target) / nf;
    r.is_finite().then_some(r)
}

fn dual_map(y: &[f64], e: f64) -> Vec<f64> {
    y.iter().map(|v| v.signum() * v.abs().powf(e)).collect()
}

fn normalize(mut f: Vec<f64>, w: &[f64], p: f64) -> Option<Vec<f64>> {
    let n = lp_norm_with(&f, w, p);
    if !(n > 0.0 && n.is_finite()) {
        return None;
    }
    f.iter_mut().for_each(|v| *v /= n);
    Some(f)
}

/// Power iteration `x <- J_{p'}(A^* J_p(A x))`; returns the best
/// `(ratio for the target, vector, iterations)`.
fn power_iteration(
    op: &dyn GridOperator,
    start: &[f64],
    p: f64,
    target: TargetNorm,
    opts: &ProbeOptions,
) -> Option<(f64, Vec<f64>, usize)> {
    let w = op.weights();
    let q = conjugate_exponent(p);
    let mut x = normalize(start.to_vec(), w, p)?;
    let mut best = (0.0, x.clone(), 0);
    let mut prev = 0.0;
    for it in 1..=opts.max_iterations {
        let y = op.apply(&x);
        let strong = lp_norm_with(&y, w, p);
        let value = match target {
            TargetNorm::Strong => strong,
            TargetNorm::Weak => target_norm(&y, w, p, target),
        };
        if value > best.0 {
            best = (value, x.clone(), it);
        }
        if (strong - prev).abs() <= opts.tolerance * strong {
            break;
        }
        prev = strong;
        let z = op.apply_adjoint(&dual_map(&y, p - 1.0))?;
        x = normalize(dual_map(&z, q - 1.0), w, p)?;
    }
    Some(best)
}

/// Largest singular value of the operator on `L^2` of its weights.
pub fn spectral_norm(op: &dyn GridOperator) -> f64 {
    let w = op.weights();
    let live: Vec<usize> = (0..w.len()).filter(|&i| w[i] > 0.0).collect();
    let k = live.len();
    let cols: Vec<Vec<f64>> = live
        .par_iter()
        .map(|&j| {
            let mut e = vec![0.0; w.len()];
            e[j] = 1.0;
            let out = op.apply(&e);
            live.iter()
                .map(|&i| w[i].sqrt() * out[i] / w[j].sqrt())
                .collect()
        })
        .collect();
    let m = DMatrix::from_fn(k, k, |i, j| cols[j][i]);
    m.singular_values().max()
}

fn stream_rng(seed: u64, stream: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(k) << 20);
    rng
}

/// Seeded random trial functions: white noise, random smooth functions,
/// random sign patterns and random bumps, cycling through the kinds.
pub fn random_trials(grid: &Grid, count: usize, seed: u64, stream: u64) -> Vec<(String, Vec<f64>)> {
    let xs = grid.nodes();
    (0..count)
        .map(|k| {
            let mut rng = stream_rng(seed, stream, k as u64);
            let values: Vec<f64> = match k % 4 {
                0 => xs.iter().map(|_| rng.sample(StandardNormal)).collect(),
                1 => {
                    let c: Vec<f64> = (0..12)
                        .map(|j| rng.sample::<f64, _>(StandardNormal) / (1.0 + j as f64))
                        .collect();
                    xs.iter()
                        .map(|&x| {
                            let th = x.clamp(-1.0, 1.0).acos();
                            c.iter()
                                .enumerate()
                                .map(|(j, c)| c * (j as f64 * th).cos())
                                .sum()
                        })
                        .collect()
                }
                2 => {
                    let om: f64 = rng.random_range(1.0..40.0);
                    let ph: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    xs.iter().map(|&x| (om * x + ph).sin().signum()).collect()
                }
                _ => {
                    let c: f64 = rng.random_range(-1.0..1.0);
                    let width = 10f64.powf(rng.random_range(-3.0..0.0));
                    xs.iter()
                        .map(|&x| (-((x - c) / width).powi(2)).exp())
                        .collect()
                }
            };
            (format!("random trial {k}"), values)
        })
        .collect()
}

/// Deterministic candidates: the constant, indicators of `[1 - h, 1]` and
/// `[-1, -1 + h]` for dyadic `h`, the nodes nearest the ends and the atoms.
pub fn structured_candidates(grid: &Grid) -> Vec<(String, Vec<f64>)> {
    let xs = grid.nodes();
    let m = xs.len();
    let mut out = vec![("constant".to_string(), vec![1.0; m])];
    for j in 0..=24 {
        let h = 2f64.powi(-j);
        let right: Vec<f64> = xs
            .iter()
            .map(|&x| f64::from(u8::from(x >= 1.0 - h)))
            .collect();
        let left: Vec<f64> = xs
            .iter()
            .map(|&x| f64::from(u8::from(x <= -1.0 + h)))
            .collect();
        let count = right.iter().filter(|&&v| v > 0.0).count();
        if count == 0 && left.iter().all(|&v| v == 0.0) {
            break;
        }
        out.push((format!("[1-{h},1]"), right));
        out.push((format!("[-1,-1+{h}]"), left));
    }
    let mut singles: Vec<usize> = (0..m.min(4)).chain(m.saturating_sub(4)..m).collect();
    singles.extend(grid.atoms().map(|(i, _, _)| i));
    singles.sort_unstable();
    singles.dedup();
    for i in singles {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        out.push((format!("node {i} (x = {})", xs[i]), e));
    }
    out
}

fn best_ratio(
    op: &dyn GridOperator,
    grid: &Grid,
    p: f64,
    target: TargetNorm,
    opts: &ProbeOptions,
    stream: u64,
    tag: &str,
) -> Result<NormEstimate> {
    let linear = op.apply_adjoint(&vec![0.0; op.dim()]).is_some();
    let mut candidates = structured_candidates(grid);
    candidates.extend(random_trials(grid, opts.trials, opts.seed, stream));
    let scored: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|(_, f)| ratio(op, f, p, target))
        .collect();
    let mut order: Vec<usize> = (0..candidates.len())
        .filter(|&i| scored[i].is_some())
        .collect();
    order.sort_by(|&a, &b| scored[b].unwrap().total_cmp(&scored[a].unwrap()));
    let Some(&top) = order.first() else {
        return Err(Error::NumericalBreakdown(
            "no admissible trial function".into(),
        ));
    };
    let mut best = NormEstimate {
        value: scored[top].unwrap(),
        maximizer: format!("{tag}{}", candidates[top].0),
        iterations: 0,
        argmax: candidates[top].1.clone(),
    };
    if linear {
        let runs: Vec<Option<(f64, Vec<f64>, usize)>> = order
            .iter()
            .take(opts.power_starts)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&&i| power_iteration(op, &candidates[i].1, p, target, opts))
            .collect();
        for (run, &i) in runs.into_iter().zip(&order) {
            if let Some((value, x, it)) = run {
                if value > best.value {
                    best = NormEstimate {
                        value,
                        maximizer: format!("{tag}power iteration from {}", candidates[i].0),
                        iterations: it,
                        argmax: x,
                    };
                }
            }
        }
    }
    Ok(best)
}

/// Lower bound for `sup_f ||A f|| / ||f||_p` on the grid. `stream` selects
/// the partition of the random source, so estimates for different `n` are
/// independent of evaluation order. For the strong norm of a linear
/// operator the adjoint is probed at `p'` as well; `argmax` then belongs to
/// the adjoint.
pub fn operator_norm_probe(
    op: &dyn GridOperator,
    grid: &Grid,
    p: f64,
    target: TargetNorm,
    opts: &ProbeOptions,
    stream: u64,
) -> Result<NormEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!(
            "p = {p} must lie in (1, inf)"
        )));
    }
    if op.dim() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "operator of size {} on a grid of {} nodes",
            op.dim(),
            grid.len()
        )));
    }
    let linear = op.apply_adjoint(&vec![0.0; op.dim()]).is_some();
    if p == 2.0 && target == TargetNorm::Strong && linear && opts.spectral_at_two {
        return Ok(NormEstimate {
            value: spectral_norm(op),
            maximizer: "singular value decomposition".into(),
            iterations: 0,
            argmax: Vec::new(),
        });
    }
    let mut best = best_ratio(op, grid, p, target, opts, stream, "")?;
    if linear && target == TargetNorm::Strong {
        // ||A||_{p -> p} = ||A^*||_{p' -> p'}
        let dual = best_ratio(
            &Adjoint(op),
            grid,
            conjugate_exponent(p),
            target,
            opts,
            stream,
            "adjoint: ",
        )?;
        if dual.value > best.value {
            best = dual;
        }
    }
    Ok(best)
}

/// Least-squares fit `log norm = log C + gamma log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub gamma: f64,
    pub log_constant: f64,
    /// RMS residual of the fit in `log`.
    pub residual: f64,
    /// Smallest and largest `n` in the fit window.
    pub window: (usize, usize),
}

/// Fits the entries with `n` in the top half of the `n`-range. Needs at
/// least two distinct positive degrees there.
pub fn fit_growth(entries: &[(usize, f64)]) -> Option<GrowthFit> {
    let lo = entries.iter().map(|e| e.0).min()?;
    let hi = entries.iter().map(|e| e.0).max()?;
    let mid = lo as f64 + (hi - lo) as f64 / 2.0;
    let pts: Vec<(f64, f64)> = entries
        .iter()
        .filter(|(n, v)| *n >= 1 && *n as f64 >= mid && *v > 0.0)
        .map(|&(n, v)| ((n as f64).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let gamma = sxy / sxx;
    let c = my - gamma * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - c - gamma * p.0).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    let window_lo = entries
        .iter()
        .map(|e| e.0)
        .filter(|&n| n >= 1 && n as f64 >= mid)
        .min()?;
    Some(GrowthFit {
        gamma,
        log_constant: c,
        residual,
        window: (window_lo, hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Growing,
    /// The fit is too noisy to support either verdict.
    Inconclusive,
}

/// `Growing` iff `gamma > GROWTH_THRESHOLD`, `Bounded` otherwise (a
/// decreasing fit is bounded too), both only when the residual is below
/// `FIT_RESIDUAL_LIMIT`.
pub fn verdict(fit: Option<&GrowthFit>) -> Verdict {
    match fit {
        Some(f) if f.residual <= FIT_RESIDUAL_LIMIT => {
            if f.gamma > GROWTH_THRESHOLD {
                Verdict::Growing
            } else {
                Verdict::Bounded
            }
        }
        _ => Verdict::Inconclusive,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    /// `S_n` on `L^p(d nu)`.
    PartialSum,
    /// `T_n` on `L^p(d mu)`.
    ContinuousPart,
    /// `max_{k <= n} |S_k f|`.
    Maximal,
    /// `[M_b, S_n]`.
    Commutator { symbol: Symbol },
}

/// Norm used on the output side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Strong,
    Weak,
    /// `||S_n chi_E||_{p,inf} / ||chi_E||_p` over a family of sets.
    RestrictedWeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub n: usize,
    pub estimate: f64,
    pub maximizer: String,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub grid_size: usize,
    pub trials: usize,
    pub fit_residual: Option<f64>,
    pub growth_threshold: f64,
    pub residual_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub operator: OperatorKind,
    pub norm: NormKind,
    pub p: f64,
    pub u: PowerWeightSpec,
    pub v: PowerWeightSpec,
    pub seed: u64,
    pub entries: Vec<ProbeEntry>,
    pub growth: Option<GrowthFit>,
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

impl ProbeReport {
    pub(crate) fn assemble(
        operator: OperatorKind,
        norm: NormKind,
        p: f64,
        (u, v): (PowerWeightSpec, PowerWeightSpec),
        opts: &ProbeOptions,
        grid_size: usize,
        entries: Vec<ProbeEntry>,
    ) -> Self {
        let pts: Vec<(usize, f64)> = entries.iter().map(|e| (e.n, e.estimate)).collect();
        let growth = fit_growth(&pts);
        ProbeReport {
            operator,
            norm,
            p,
            u,
            v,
            seed: opts.seed,
            verdict: verdict(growth.as_ref()),
            diagnostics: Diagnostics {
                grid_size,
                trials: opts.trials,
                fit_residual: growth.as_ref().map(|g| g.residual),
                growth_threshold: GROWTH_THRESHOLD,
                residual_limit: FIT_RESIDUAL_LIMIT,
            },
            growth,
            entries,
        }
    }

    /// Largest estimate over `n <= cap`.
    pub fn max_up_to(&self, cap: usize) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.n <= cap)
            .fold(0.0, |m, e| m.max(e.estimate))
    }

    /// Entry holding the largest estimate.
    pub fn extremal(&self) -> Option<&ProbeEntry> {
        self.entries
            .iter()
            .max_by(|a, b| a.estimate.total_cmp(&b.estimate))
    }

    /// Columns `n,estimate,maximizer,iterations`, preceded by comment lines
    /// with the seed and the verdict.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# seed={}\n# p={}\n# verdict={:?}\n",
            self.seed, self.p, self.verdict
        );
        if let Some(g) = &self.growth {
            s += &format!("# gamma={} residual={}\n", g.gamma, g.residual);
        }
        s += "n,estimate,maximizer,iterations\n";
        for e in &self.entries {
            s += &format!(
                "{},{},\"{}\",{}\n",
                e.n, e.estimate, e.maximizer, e.iterations
            );
        }
        s
    }
}

/// Everything needed to run a probe over a list of degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub operator: OperatorKind,
    pub target: TargetNorm,
    pub p: f64,
    pub u: PowerWeightSpec,
    pub v: PowerWeightSpec,
    pub degrees: Vec<usize>,
    pub options: ProbeOptions,
}

/// Checks degrees against the basis and the grid against the measure, and
/// tabulates the basis up to the largest degree.
pub(crate) fn prepare(
    basis: &OrthoBasis,
    grid: &Grid,
    degrees: &[usize],
) -> Result<(usize, Arc<BasisTable>)> {
    grid.check_matches(basis.measure())?;
    let n_max = degrees
        .iter()
        .copied()
        .max()
        .ok_or_else(|| Error::InvalidWeight("empty degree list".into()))?;
    if n_max > basis.cap() {
        return Err(Error::DegreeOutOfRange {
            degree: n_max,
            cap: basis.cap(),
        });
    }
    if grid.len() < 2 * (n_max + 1) {
        return Err(Error::GridTooSmall {
            grid: grid.len(),
            degree: n_max,
        });
    }
    Ok((n_max, Arc::new(BasisTable::new(basis, grid, n_max)?)))
}

fn build_operator(
    kind: &OperatorKind,
    spec: &MeasureSpec,
    grid: &Grid,
    table: &Arc<BasisTable>,
    n: usize,
    u: &PowerWeightSpec,
    v: &PowerWeightSpec,
) -> Result<Box<dyn GridOperator>> {
    Ok(match kind {
        OperatorKind::PartialSum => Box::new(WeightedOp::new(
            PartialSumOp::partial_sum(table, grid, n)?,
            spec,
            grid,
            u,
            v,
        )?),
        OperatorKind::ContinuousPart => Box::new(WeightedOp::new(
            PartialSumOp::continuous_part(table, grid, n)?,
            spec,
            grid,
            u,
            v,
        )?),
        OperatorKind::Maximal => Box::new(WeightedOp::new(
            MaximalOp::new(table, grid, n)?,
            spec,
            grid,
            u,
            v,
        )?),
        OperatorKind::Commutator { symbol } => {
            let b = grid.nodes().iter().map(|&x| symbol.eval(x)).collect();
            let c = CommutatorOp::new(PartialSumOp::partial_sum(table, grid, n)?, b, grid)?;
            Box::new(WeightedOp::new(c, spec, grid, u, v)?)
        }
    })
}

/// Runs [`operator_norm_probe`] for every degree of the configuration and
/// fits the growth of the estimates.
pub fn run_probe(basis: &OrthoBasis, grid: &Grid, cfg: &ProbeConfig) -> Result<ProbeReport> {
    let spec = basis.measure();
    cfg.u.validate_for(spec)?;
    cfg.v.validate_for(spec)?;
    let (_, table) = prepare(basis, grid, &cfg.degrees)?;
    let mut degrees = cfg.degrees.clone();
    degrees.sort_unstable();
    degrees.dedup();
    let entries = degrees
        .par_iter()
        .map(|&n| {
            let op = build_operator(&cfg.operator, spec, grid, &table, n, &cfg.u, &cfg.v)?;
            let est =
                operator_norm_probe(op.as_ref(), grid, cfg.p, cfg.target, &cfg.options, n as u64)?;
            Ok(ProbeEntry {
                n,
                estimate: est.value,
                maximizer: est.maximizer,
                iterations: est.iterations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let norm = match cfg.target {
        TargetNorm::Strong => NormKind::Strong,
        TargetNorm::Weak => NormKind::Weak,
    };
    Ok(ProbeReport::assemble(
        cfg.operator.clone(),
        norm,
        cfg.p,
        (cfg.u.clone(), cfg.v.clone()),
        &cfg.options,
        grid.len(),
        entries,
    ))
}

/// `(n, ||w L_n(., a)||_{L^p(d mu)})` for a mass point `a`, where `w` is a
/// power weight (inverted when `invert` is set). These are the mass-point
/// conditions of the transfer from `mu` to `nu`.
pub fn mass_kernel_norms(
    basis: &OrthoBasis,
    grid: &Grid,
    a: f64,
    degrees: &[usize],
    p: f64,
    w: &PowerWeightSpec,
    invert: bool,
) -> Result<Vec<(usize, f64)>> {
    let spec = basis.measure();
    if spec.mass_at(a).is_none() {
        return Err(Error::UnknownLocation(a));
    }
    let (n_max, table) = prepare(basis, grid, degrees)?;
    let mu = grid.continuous_weights();
    let wv = weight_at_nodes(w, spec, grid, mu, invert)?;
    let pa = basis.eval_all(n_max, a)?;
    Ok(degrees
        .iter()
        .map(|&n| {
            let vals: Vec<f64> = (0..grid.len())
                .map(|i| {
                    let k: f64 = table.row(i)[..=n].iter().zip(&pa).map(|(x, y)| x * y).sum();
                    super::operators::mul0(wv[i], k)
                })
                .collect();
            (n, lp_norm_with(&vals, mu, p))
        })
        .collect())
}
