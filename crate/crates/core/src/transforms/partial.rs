use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{Grid, GridFunction};
use crate::opoly::OrthoBasis;

/// Values `P_0 .. P_n` at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl BasisTable {
    pub fn new(basis: &OrthoBasis, grid: &Grid, n: usize) -> Result<Self> {
        let rows = grid
            .nodes()
            .iter()
            .map(|&x| basis.eval_all(n, x))
            .collect::<Result<_>>()?;
        Ok(BasisTable { n, rows })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `sum_j c_j P_j` at every node.
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(c).map(|(p, c)| p * c).sum())
            .collect()
    }

    /// `c_j = sum_i weights[i] P_j(y_i) values[i]` for `j <= n`.
    pub fn coefficients(&self, weights: &[f64], values: &[f64], n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n + 1];
        for ((row, &w), &v) in self.rows.iter().zip(weights).zip(values) {
            let wv = w * v;
            if wv == 0.0 {
                continue;
            }
            for (cj, pj) in c.iter_mut().zip(row) {
                *cj += wv * pj;
            }
        }
        c
    }
}

fn checked_coefficients(
    basis: &OrthoBasis,
    f: &GridFunction,
    n: usize,
    weights: &[f64],
) -> Result<(Vec<f64>, BasisTable)> {
    f.grid().check_matches(basis.measure())?;
    let table = BasisTable::new(basis, f.grid(), n)?;
    let c = table.coefficients(weights, f.values(), n);
    Ok((c, table))
}

fn combine(c: &[f64], p: &[f64]) -> f64 {
    c.iter().zip(p).map(|(a, b)| a * b).sum()
}

/// `S_n f(x) = \int L_n(x, y) f(y) d nu(y)` on the grid of `f`.
pub fn partial_sum(basis: &OrthoBasis, f: &GridFunction, n: usize, x: f64) -> Result<f64> {
    let (c, _) = checked_coefficients(basis, f, n, f.grid().weights())?;
    Ok(combine(&c, &basis.eval_all(n, x)?))
}

/// `S_n f(x)` split into the integral against the continuous part and one
/// term `M_i L_n(x, a_i) f(a_i)` per mass point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSum {
    pub continuous: f64,
    /// `(a_i, M_i L_n(x, a_i) f(a_i))`.
    pub mass_terms: Vec<(f64, f64)>,
}

impl SplitSum {
    pub fn total(&self) -> f64 {
        self.continuous + self.mass_terms.iter().map(|t| t.1).sum::<f64>()
    }
}

pub fn split_partial_sum(
    basis: &OrthoBasis,
    f: &GridFunction,
    n: usize,
    x: f64,
) -> Result<SplitSum> {
    let grid = f.grid();
    let (c, _) = checked_coefficients(basis, f, n, grid.continuous_weights())?;
    let px = basis.eval_all(n, x)?;
    let mass_terms = grid
        .atoms()
        .map(|(i, a, m)| Ok((a, m * basis.cd_kernel(n, x, a)? * f.values()[i])))
        .collect::<Result<_>>()?;
    Ok(SplitSum {
        continuous: combine(&c, &px),
        mass_terms,
    })
}

/// `max_{n <= cap} |S_n f(x)|`.
pub fn maximal_op(basis: &OrthoBasis, f: &GridFunction, cap: usize, x: f64) -> Result<f64> {
    let (c, _) = checked_coefficients(basis, f, cap, f.grid().weights())?;
    let px = basis.eval_all(cap, x)?;
    let mut acc = 0.0;
    let mut best: f64 = 0.0;
    for (cj, pj) in c.iter().zip(&px) {
        acc += cj * pj;
        best = best.max(acc.abs());
    }
    Ok(best)
}

/// `[M_b, S_n] f(x) = b(x) S_n f(x) - S_n(b f)(x)`.
pub fn commutator(
    basis: &OrthoBasis,
    b: impl Fn(f64) -> f64,
    f: &GridFunction,
    n: usize,
    x: f64,
) -> Result<f64> {
    let bf = f.map(|y, v| b(y) * v);
    Ok(b(x) * partial_sum(basis, f, n, x)? - partial_sum(basis, &bf, n, x)?)
}
