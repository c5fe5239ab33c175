//! Pollard's splitting of the kernel of a measure on `[-1, 1]`:
//!
//! ```text
//! L_n(x,y) = r_n P_{n+1}(x) P_{n+1}(y)
//!          + s_n P_{n+1}(x) (1-y^2) Q_n(y) / (x - y)
//!          + s_n (1-x^2) Q_n(x) P_{n+1}(y) / (y - x)
//! ```
//!
//! with `Q_n` orthonormal for `(1-x^2) d nu`. Integrated against `w(y) dy`
//! this gives `T_n f = r_n W_1 f + s_n W_2 f - s_n W_3 f`, and for a symbol
//! `b` the commutator `[M_b, S_n] = r_n (Psi_1 - Psi_2) + s_n (Psi_3 - Psi_4)`.
//! `r_n` and `s_n` are fitted against independently computed `T_n f`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::hilbert::{
    hilbert_commutator_with_weight, hilbert_of_weight, hilbert_with_weight, panels_at,
};
use super::partial::split_partial_sum;
use super::symbol::Symbol;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::measure::{BaseWeight, GenJacobiSpec, MassPoint, MeasureSpec};
use crate::opoly::OrthoBasis;
use crate::quadrature::PanelNode;
use std::sync::Arc;

/// Condition number above which the three parts count as dependent.
pub const MAX_CONDITION: f64 = 1e12;

/// `(1 - x^2) d nu`: exponents at both ends raised by one, masses at
/// interior points rescaled, masses at `+-1` removed.
pub fn pollard_measure(spec: &MeasureSpec) -> Result<MeasureSpec> {
    let BaseWeight::Jacobi(j) = &spec.base else {
        return Err(Error::Unsupported(
            "Pollard's splitting needs a weight on [-1, 1]".into(),
        ));
    };
    let mut base = j.clone();
    base.alpha += 1.0;
    base.beta += 1.0;
    let masses = spec
        .masses
        .iter()
        .filter(|m| m.location.abs() < 1.0)
        .map(|m| MassPoint::new(m.location, m.mass * (1.0 - m.location * m.location)))
        .collect();
    Ok(MeasureSpec {
        base: BaseWeight::Jacobi(base),
        masses,
    })
}

struct PointTable {
    x: f64,
    nodes: Vec<PanelNode>,
    /// `P_0 .. P_{n_max+1}` at each node.
    p: Vec<Vec<f64>>,
    /// `Q_0 .. Q_{n_max}` at each node.
    q: Vec<Vec<f64>>,
    px: Vec<f64>,
    qx: Vec<f64>,
    /// `H(w)(x)`.
    hw: f64,
}

/// Tables of both systems on tanh-sinh panels meeting at each evaluation
/// point, shared by all degrees `n <= n_max`.
pub struct PollardEvaluator {
    weight: GenJacobiSpec,
    n_max: usize,
    tables: Vec<PointTable>,
}

impl PollardEvaluator {
    pub fn new(
        p_basis: &OrthoBasis,
        q_basis: &OrthoBasis,
        n_max: usize,
        points: &[f64],
    ) -> Result<Self> {
        let weight = p_basis
            .measure()
            .base
            .as_jacobi()
            .ok_or_else(|| {
                Error::Unsupported("Pollard's splitting needs a weight on [-1, 1]".into())
            })?
            .clone();
        let tables = points
            .iter()
            .map(|&x| {
                let nodes = panels_at(&weight, x)?;
                let p = nodes
                    .iter()
                    .map(|nd| p_basis.eval_all(n_max + 1, nd.y))
                    .collect::<Result<_>>()?;
                let q = nodes
                    .iter()
                    .map(|nd| q_basis.eval_all(n_max, nd.y))
                    .collect::<Result<_>>()?;
                let hw = hilbert_of_weight(&nodes, &weight, x);
                Ok(PointTable {
                    x,
                    px: p_basis.eval_all(n_max + 1, x)?,
                    qx: q_basis.eval_all(n_max, x)?,
                    nodes,
                    p,
                    q,
                    hw,
                })
            })
            .collect::<Result<_>>()?;
        Ok(PollardEvaluator {
            weight,
            n_max,
            tables,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        self.tables.iter().map(|t| t.x).collect()
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.n_max {
            Err(Error::DegreeOutOfRange {
                degree: n,
                cap: self.n_max,
            })
        } else {
            Ok(())
        }
    }

    /// `W_1 f, W_2 f, W_3 f` at every point.
    pub fn parts(&self, f: &dyn Fn(f64) -> f64, n: usize) -> Result<[Vec<f64>; 3]> {
        self.check(n)?;
        let mut out = [Vec::new(), Vec::new(), Vec::new()];
        for t in &self.tables {
            let fy: Vec<f64> = t.nodes.iter().map(|nd| f(nd.y)).collect();
            let fx = f(t.x);
            let one_minus_x2 = (1.0 - t.x) * (1.0 + t.x);
            let inner: f64 = t
                .nodes
                .iter()
                .zip(&t.p)
                .zip(&fy)
                .map(|((nd, p), fv)| nd.ts_weight * nd.w * p[n + 1] * fv)
                .sum();
            // H((1-y^2) Q_n f w)(x)
            let g2: Vec<f64> = t
                .nodes
                .iter()
                .zip(&t.q)
                .zip(&fy)
                .map(|((nd, q), fv)| nd.one_minus_square() * q[n] * fv)
                .collect();
            let h2 = hilbert_with_weight(&t.nodes, &g2, one_minus_x2 * t.qx[n] * fx, t.hw, t.x);
            // H(P_{n+1} f w)(x)
            let g3: Vec<f64> = t.p.iter().zip(&fy).map(|(p, fv)| p[n + 1] * fv).collect();
            let h3 = hilbert_with_weight(&t.nodes, &g3, t.px[n + 1] * fx, t.hw, t.x);
            out[0].push(t.px[n + 1] * inner);
            out[1].push(t.px[n + 1] * h2);
            out[2].push(one_minus_x2 * t.qx[n] * h3);
        }
        Ok(out)
    }

    /// `Psi_1 g .. Psi_4 g` at every point, with `b_mean` the mean of `b`
    /// over `[-1, 1]`.
    pub fn psi(
        &self,
        b: &dyn Fn(f64) -> f64,
        b_mean: f64,
        g: &dyn Fn(f64) -> f64,
        n: usize,
    ) -> Result<[Vec<f64>; 4]> {
        self.check(n)?;
        let mut out = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
        for t in &self.tables {
            let (by, gy) = symbol_samples(&t.nodes, b, g);
            let bx = b(t.x);
            let one_minus_x2 = (1.0 - t.x) * (1.0 + t.x);
            let mut plain = 0.0;
            let mut centred = 0.0;
            for (((nd, p), gv), bv) in t.nodes.iter().zip(&t.p).zip(&gy).zip(&by) {
                let v = nd.ts_weight * nd.w * p[n + 1] * gv;
                plain += v;
                centred += (bv - b_mean) * v;
            }
            let h3: Vec<f64> = t
                .nodes
                .iter()
                .zip(&t.q)
                .zip(&gy)
                .map(|((nd, q), gv)| nd.one_minus_square() * q[n] * gv)
                .collect();
            let h4: Vec<f64> = t.p.iter().zip(&gy).map(|(p, gv)| p[n + 1] * gv).collect();
            out[0].push((bx - b_mean) * t.px[n + 1] * plain);
            out[1].push(t.px[n + 1] * centred);
            out[2].push(t.px[n + 1] * hilbert_commutator_with_weight(&t.nodes, &by, &h3, bx, t.x));
            out[3].push(
                one_minus_x2
                    * t.qx[n]
                    * hilbert_commutator_with_weight(&t.nodes, &by, &h4, bx, t.x),
            );
        }
        Ok(out)
    }

    /// `[M_b, S_n] g(x) = \int (b(x) - b(y)) L_n(x, y) g(y) w(y) dy` by direct
    /// quadrature of the kernel.
    pub fn direct_commutator(
        &self,
        b: &dyn Fn(f64) -> f64,
        g: &dyn Fn(f64) -> f64,
        n: usize,
    ) -> Result<Vec<f64>> {
        self.check(n)?;
        Ok(self
            .tables
            .iter()
            .map(|t| {
                let bx = b(t.x);
                let (by, gy) = symbol_samples(&t.nodes, b, g);
                t.nodes
                    .iter()
                    .zip(&t.p)
                    .zip(by.iter().zip(&gy))
                    .map(|((nd, p), (bv, gv))| {
                        let k: f64 = p[..=n].iter().zip(&t.px).map(|(a, c)| a * c).sum();
                        nd.ts_weight * nd.w * (bx - bv) * k * gv
                    })
                    .sum()
            })
            .collect())
    }

    pub fn weight(&self) -> &GenJacobiSpec {
        &self.weight
    }
}

/// Like `f64::max`, but a NaN anywhere makes the result NaN.
fn nan_max(m: f64, d: f64) -> f64 {
    if d.is_nan() || d > m {
        d
    } else {
        m
    }
}

/// `b` and `g` at the panel nodes. Nodes where `b` is not finite (an end
/// singularity of `b` reached by rounding) are dropped from every sum.
fn symbol_samples(
    nodes: &[PanelNode],
    b: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    nodes
        .iter()
        .map(|nd| {
            let bv = b(nd.y);
            if bv.is_finite() {
                (bv, g(nd.y))
            } else {
                (0.0, 0.0)
            }
        })
        .unzip()
}

/// Fitted `r_n`, `s_n` with diagnostics. The fit is unconstrained in the
/// two Hilbert-transform coefficients `c_2`, `c_3`; `s_n = (c_2 - c_3)/2`
/// and `asymmetry = |c_2 + c_3|` measures how far the data are from the
/// expected `c_3 = -c_2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PollardFit {
    pub n: usize,
    pub r: f64,
    pub s: f64,
    pub asymmetry: f64,
    pub condition: f64,
    /// Largest misfit relative to the largest `|T_n f|` in the fit data.
    pub residual: f64,
}

/// `T_n f` at `points`: the integral of the kernel of `basis` against the
/// continuous part of the grid.
pub fn continuous_partial_sums(
    basis: &OrthoBasis,
    grid: &Arc<Grid>,
    f: &dyn Fn(f64) -> f64,
    n: usize,
    points: &[f64],
) -> Result<Vec<f64>> {
    let gf = GridFunction::from_fn(grid, f);
    points
        .iter()
        .map(|&x| split_partial_sum(basis, &gf, n, x).map(|s| s.continuous))
        .collect()
}

/// Least-squares fit of `T_n f = c_1 W_1 f + c_2 W_2 f + c_3 W_3 f` over the
/// evaluator's points and a fixed family of test functions.
pub fn pollard_fit(
    p_basis: &OrthoBasis,
    grid: &Arc<Grid>,
    evaluator: &PollardEvaluator,
    n: usize,
) -> Result<PollardFit> {
    let pn1 = |y: f64| p_basis.eval(n + 1, y).unwrap_or(f64::NAN);
    let family: [&dyn Fn(f64) -> f64; 6] = [
        &|_| 1.0,
        &|y| y,
        &|y| y * y,
        &|y: f64| y.exp(),
        &|y: f64| (3.0 * y).cos(),
        &pn1,
    ];
    let points = evaluator.points();
    let mut rows: Vec<[f64; 3]> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for f in family {
        let t = continuous_partial_sums(p_basis, grid, f, n, &points)?;
        let [w1, w2, w3] = evaluator.parts(f, n)?;
        for i in 0..points.len() {
            rows.push([w1[i], w2[i], w3[i]]);
            rhs.push(t[i]);
        }
    }
    let a = DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let y = DVector::from_vec(rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditionedFit(condition));
    }
    let c = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::NumericalBreakdown(e.to_string()))?;
    let r = c[0];
    let s = 0.5 * (c[1] - c[2]);
    let model = &a * DVector::from_vec(vec![r, s, -s]);
    let residual = (model - &y).amax() / y.amax();
    Ok(PollardFit {
        n,
        r,
        s,
        asymmetry: (c[1] + c[2]).abs(),
        condition,
        residual,
    })
}

/// The three parts for one function `f`, with `T_n f` computed on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PollardParts {
    pub n: usize,
    pub r: f64,
    pub s: f64,
    pub fit: PollardFit,
    pub points: Vec<f64>,
    pub t: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub w3: Vec<f64>,
}

impl PollardParts {
    pub fn reconstruction(&self) -> Vec<f64> {
        (0..self.points.len())
            .map(|i| self.r * self.w1[i] + self.s * self.w2[i] - self.s * self.w3[i])
            .collect()
    }

    /// Largest `|T_n f - (r W_1 + s W_2 - s W_3) f|` relative to the largest
    /// `|T_n f|`.
    pub fn residual(&self) -> f64 {
        let scale = self.t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = self
            .reconstruction()
            .iter()
            .zip(&self.t)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, nan_max);
        err / scale
    }
}

pub fn pollard_parts(
    p_basis: &OrthoBasis,
    grid: &Arc<Grid>,
    evaluator: &PollardEvaluator,
    f: &dyn Fn(f64) -> f64,
    n: usize,
) -> Result<PollardParts> {
    let fit = pollard_fit(p_basis, grid, evaluator, n)?;
    let points = evaluator.points();
    let t = continuous_partial_sums(p_basis, grid, f, n, &points)?;
    let [w1, w2, w3] = evaluator.parts(f, n)?;
    Ok(PollardParts {
        n,
        r: fit.r,
        s: fit.s,
        fit,
        points,
        t,
        w1,
        w2,
        w3,
    })
}

/// The four parts of the commutator split for one function `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorParts {
    pub n: usize,
    pub r: f64,
    pub s: f64,
    pub b_mean: f64,
    pub points: Vec<f64>,
    pub psi: [Vec<f64>; 4],
    /// `[M_b, S_n] g` by direct quadrature of the kernel.
    pub direct: Vec<f64>,
}

impl CommutatorParts {
    pub fn reconstruction(&self) -> Vec<f64> {
        let [p1, p2, p3, p4] = &self.psi;
        (0..self.points.len())
            .map(|i| self.r * (p1[i] - p2[i]) + self.s * (p3[i] - p4[i]))
            .collect()
    }

    /// Largest reconstruction error relative to the largest `|[M_b, S_n] g|`.
    pub fn residual(&self) -> f64 {
        let scale = self.direct.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = self
            .reconstruction()
            .iter()
            .zip(&self.direct)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, nan_max);
        if scale == 0.0 {
            err
        } else {
            err / scale
        }
    }
}

/// Commutator split for the absolutely continuous measure of `mu_basis`;
/// `r_n`, `s_n` are fitted on `grid`, a grid for the same measure.
pub fn commutator_psi_parts(
    mu_basis: &OrthoBasis,
    grid: &Arc<Grid>,
    evaluator: &PollardEvaluator,
    symbol: &Symbol,
    g: &dyn Fn(f64) -> f64,
    n: usize,
) -> Result<CommutatorParts> {
    let fit = pollard_fit(mu_basis, grid, evaluator, n)?;
    let b = &|x| symbol.eval(x);
    let b_mean = symbol.mean();
    Ok(CommutatorParts {
        n,
        r: fit.r,
        s: fit.s,
        b_mean,
        points: evaluator.points(),
        psi: evaluator.psi(b, b_mean, g, n)?,
        direct: evaluator.direct_commutator(b, g, n)?,
    })
}
