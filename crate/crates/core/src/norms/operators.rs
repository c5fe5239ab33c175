//! Operators acting on node values of a grid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::measure::{MeasureSpec, PowerWeightSpec};
use crate::transforms::BasisTable;

/// An operator on functions sampled at the nodes of a grid. Norms and the
/// pairing `<g, f> = sum_i w_i g_i f_i` use [`GridOperator::weights`].
pub trait GridOperator: Sync {
    fn weights(&self) -> &[f64];

    fn apply(&self, f: &[f64]) -> Vec<f64>;

    /// Adjoint for the weighted pairing; `None` for sublinear operators.
    fn apply_adjoint(&self, g: &[f64]) -> Option<Vec<f64>>;

    fn dim(&self) -> usize {
        self.weights().len()
    }
}

/// `0 * inf = 0`.
pub fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// The adjoint of a linear operator, with the same weights.
pub struct Adjoint<'a>(pub &'a dyn GridOperator);

impl GridOperator for Adjoint<'_> {
    fn weights(&self) -> &[f64] {
        self.0.weights()
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.0
            .apply_adjoint(f)
            .expect("adjoint of a sublinear operator")
    }

    fn apply_adjoint(&self, g: &[f64]) -> Option<Vec<f64>> {
        Some(self.0.apply(g))
    }
}

#[derive(Debug, Clone)]
pub struct Identity {
    weights: Vec<f64>,
}

impl Identity {
    pub fn new(weights: Vec<f64>) -> Self {
        Identity { weights }
    }
}

impl GridOperator for Identity {
    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        f.to_vec()
    }

    fn apply_adjoint(&self, g: &[f64]) -> Option<Vec<f64>> {
        Some(g.to_vec())
    }
}

/// `f -> sum_{k <= n} P_k \int P_k f d kernel`: `S_n` when the kernel
/// weights are those of `nu`, `T_n` when they are those of `mu`.
#[derive(Debug, Clone)]
pub struct PartialSumOp {
    table: Arc<BasisTable>,
    n: usize,
    kernel: Vec<f64>,
    space: Vec<f64>,
}

impl PartialSumOp {
    fn checked(table: &Arc<BasisTable>, grid: &Grid, n: usize) -> Result<()> {
        if n > table.degree() {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                cap: table.degree(),
            });
        }
        if table.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "table has {} nodes, grid {}",
                table.len(),
                grid.len()
            )));
        }
        Ok(())
    }

    /// `S_n` on `L^p(d nu)`.
    pub fn partial_sum(table: &Arc<BasisTable>, grid: &Grid, n: usize) -> Result<Self> {
        Self::checked(table, grid, n)?;
        Ok(PartialSumOp {
            table: Arc::clone(table),
            n,
            kernel: grid.weights().to_vec(),
            space: grid.weights().to_vec(),
        })
    }

    /// `T_n` on `L^p(d mu)`.
    pub fn continuous_part(table: &Arc<BasisTable>, grid: &Grid, n: usize) -> Result<Self> {
        Self::checked(table, grid, n)?;
        Ok(PartialSumOp {
            table: Arc::clone(table),
            n,
            kernel: grid.continuous_weights().to_vec(),
            space: grid.continuous_weights().to_vec(),
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }
}

impl GridOperator for PartialSumOp {
    fn weights(&self) -> &[f64] {
        &self.space
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        let c = self.table.coefficients(&self.kernel, f, self.n);
        self.table.synthesize(&c)
    }

    fn apply_adjoint(&self, g: &[f64]) -> Option<Vec<f64>> {
        let c = self.table.coefficients(&self.space, g, self.n);
        let s = self.table.synthesize(&c);
        Some(
            s.iter()
                .zip(self.kernel.iter().zip(&self.space))
                .map(|(v, (&k, &w))| if w > 0.0 { v * k / w } else { 0.0 })
                .collect(),
        )
    }
}

/// `[M_b, S_n] f = b S_n f - S_n(b f)`.
#[derive(Debug, Clone)]
pub struct CommutatorOp {
    inner: PartialSumOp,
    b: Vec<f64>,
}

impl CommutatorOp {
    /// `b` holds the symbol at the nodes and must be finite there.
    pub fn new(inner: PartialSumOp, b: Vec<f64>, grid: &Grid) -> Result<Self> {
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteWeight {
                node: i,
                x: grid.nodes()[i],
            });
        }
        Ok(CommutatorOp { inner, b })
    }

    fn times_b(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.b).map(|(v, b)| v * b).collect()
    }
}

impl GridOperator for CommutatorOp {
    fn weights(&self) -> &[f64] {
        self.inner.weights()
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        let sf = self.inner.apply(f);
        let sbf = self.inner.apply(&self.times_b(f));
        sf.iter()
            .zip(&self.b)
            .zip(&sbf)
            .map(|((s, b), t)| b * s - t)
            .collect()
    }

    fn apply_adjoint(&self, g: &[f64]) -> Option<Vec<f64>> {
        let sbg = self.inner.apply_adjoint(&self.times_b(g))?;
        let sg = self.inner.apply_adjoint(g)?;
        Some(
            sbg.iter()
                .zip(&self.b)
                .zip(&sg)
                .map(|((t, b), s)| t - b * s)
                .collect(),
        )
    }
}

/// `f -> max_{k <= n} |S_k f|`.
#[derive(Debug, Clone)]
pub struct MaximalOp {
    table: Arc<BasisTable>,
    n: usize,
    weights: Vec<f64>,
}

impl MaximalOp {
    pub fn new(table: &Arc<BasisTable>, grid: &Grid, n: usize) -> Result<Self> {
        PartialSumOp::checked(table, grid, n)?;
        Ok(MaximalOp {
            table: Arc::clone(table),
            n,
            weights: grid.weights().to_vec(),
        })
    }
}

impl GridOperator for MaximalOp {
    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        let c = self.table.coefficients(&self.weights, f, self.n);
        (0..self.table.len())
            .map(|i| {
                let row = self.table.row(i);
                let mut s = 0.0;
                let mut best: f64 = 0.0;
                for (p, c) in row.iter().zip(&c) {
                    s += p * c;
                    best = best.max(s.abs());
                }
                best
            })
            .collect()
    }

    fn apply_adjoint(&self, _: &[f64]) -> Option<Vec<f64>> {
        None
    }
}

/// `f -> u A(v^{-1} f)` with `0 * inf = 0`.
#[derive(Debug, Clone)]
pub struct WeightedOp<O> {
    inner: O,
    u: Vec<f64>,
    v_inv: Vec<f64>,
}

/// Values of a power weight at the grid nodes. Nodes of zero measure are
/// skipped; elsewhere the value must be finite.
pub fn weight_at_nodes(
    w: &PowerWeightSpec,
    spec: &MeasureSpec,
    grid: &Grid,
    space: &[f64],
    invert: bool,
) -> Result<Vec<f64>> {
    grid.nodes()
        .iter()
        .zip(space)
        .enumerate()
        .map(|(i, (&x, &mass))| {
            if mass == 0.0 {
                return Ok(0.0);
            }
            let mut val = w.eval(spec, x);
            if invert {
                val = 1.0 / val;
            }
            if val.is_finite() {
                Ok(val)
            } else {
                Err(Error::NonFiniteWeight { node: i, x })
            }
        })
        .collect()
}

impl<O: GridOperator> WeightedOp<O> {
    pub fn new(
        inner: O,
        spec: &MeasureSpec,
        grid: &Grid,
        u: &PowerWeightSpec,
        v: &PowerWeightSpec,
    ) -> Result<Self> {
        let space = inner.weights().to_vec();
        Ok(WeightedOp {
            u: weight_at_nodes(u, spec, grid, &space, false)?,
            v_inv: weight_at_nodes(v, spec, grid, &space, true)?,
            inner,
        })
    }
}

fn scale(w: &[f64], f: &[f64]) -> Vec<f64> {
    w.iter().zip(f).map(|(&a, &b)| mul0(a, b)).collect()
}

impl<O: GridOperator> GridOperator for WeightedOp<O> {
    fn weights(&self) -> &[f64] {
        self.inner.weights()
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        scale(&self.u, &self.inner.apply(&scale(&self.v_inv, f)))
    }

    fn apply_adjoint(&self, g: &[f64]) -> Option<Vec<f64>> {
        Some(scale(
            &self.v_inv,
            &self.inner.apply_adjoint(&scale(&self.u, g))?,
        ))
    }
}
