//! Quadrature rules.
//!
//! * Gauss rules from a three-term recurrence (Golub-Welsch: eigenvalues of
//!   the Jacobi matrix, weights from the first eigenvector components).
//! * Tanh-sinh rules, which tolerate algebraic and logarithmic endpoint
//!   singularities. Nodes carry their exact offsets from both interval ends
//!   so that weights like `(1 - x)^{-1/2}` can be evaluated without the
//!   cancellation in `1 - x`.

use crate::error::{Error, Result};
use crate::measure::{BaseWeight, GenJacobiSpec};
use crate::opoly::{classical_recurrence, Recurrence};

/// A discrete measure: `\int f d mu ~ sum_i weights[i] f(nodes[i])`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w != 0.0)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Appends the nodes and weights of `other`.
    pub fn extend(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    /// Affine image of a rule on `[-1, 1]` onto `[a, b]`, weights scaled by
    /// `scale`.
    fn mapped(&self, a: f64, b: f64, scale: f64) -> Rule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule {
            nodes: self.nodes.iter().map(|s| mid + half * s).collect(),
            weights: self.weights.iter().map(|w| w * scale).collect(),
        }
    }
}

/// Eigenvalues and first eigenvector components of the symmetric tridiagonal
/// matrix with diagonal `diag` and off-diagonal `off` (`off.len() ==
/// diag.len() - 1`), by implicit QL with Wilkinson shifts.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    const MAX_ITER: usize = 60;
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&off[..n.saturating_sub(1)]);
    let mut z = vec![0.0; n];
    if n == 0 {
        return Ok((d, z));
    }
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(Error::EigenFailure(MAX_ITER));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// Gauss rule with `m` points for the measure whose recurrence is `rec`.
/// Integrates polynomials of degree `<= 2m - 1` exactly.
pub fn gauss_rule(rec: &Recurrence, m: usize) -> Result<Rule> {
    if m > rec.len() {
        return Err(Error::GridTooSmall {
            grid: rec.len(),
            degree: m,
        });
    }
    let off: Vec<f64> = rec.beta[1..m].iter().map(|b| b.sqrt()).collect();
    let (nodes, first) = tridiagonal_eigen(&rec.alpha[..m], &off)?;
    let mut pairs: Vec<(f64, f64)> = nodes
        .into_iter()
        .zip(first)
        .map(|(x, z)| (x, rec.beta[0] * z * z))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Gauss-Jacobi rule for `(1-s)^a (1+s)^b` on `[-1, 1]`.
pub fn gauss_jacobi(m: usize, a: f64, b: f64) -> Result<Rule> {
    let rec = classical_recurrence(&BaseWeight::Jacobi(GenJacobiSpec::jacobi(a, b)), m)?;
    gauss_rule(&rec, m)
}

/// Discretisation of a generalized Jacobi weight: one Gauss-Jacobi rule per
/// cell between consecutive breakpoints, carrying the two adjacent
/// singularities exactly and the remaining (smooth) factors as a multiplier.
pub fn composite_jacobi_rule(spec: &GenJacobiSpec, points_per_cell: usize) -> Result<Rule> {
    let bps = spec.breakpoints();
    let mut rule = Rule::default();
    for (idx, pair) in bps.windows(2).enumerate() {
        let (lo, e_lo) = pair[0];
        let (hi, e_hi) = pair[1];
        let half = 0.5 * (hi - lo);
        let local = gauss_jacobi(points_per_cell, e_hi, e_lo)?;
        let scale = half.powf(1.0 + e_lo + e_hi);
        let mut cell = local.mapped(lo, hi, scale);
        for (x, w) in cell.nodes.iter().zip(cell.weights.iter_mut()) {
            for (j, &(c, e)) in bps.iter().enumerate() {
                if j != idx && j != idx + 1 && e != 0.0 {
                    *w *= (x - c).abs().powf(e);
                }
            }
        }
        rule.extend(cell);
    }
    Ok(rule)
}

/// A tanh-sinh node with its distances to the interval ends.
#[derive(Debug, Clone, Copy)]
pub struct TsNode {
    pub x: f64,
    pub from_lo: f64,
    pub from_hi: f64,
    pub weight: f64,
}

/// Tanh-sinh nodes on `[a, b]` with step `2^-level`. The abscissae are
/// `x = tanh(pi/2 sinh t)`; offsets are computed from `1 / (1 + e^{2u})` so
/// they stay accurate down to the underflow threshold.
pub fn tanh_sinh_nodes(a: f64, b: f64, level: u32) -> Vec<TsNode> {
    let h = 0.5f64.powi(level as i32);
    let len = b - a;
    let mut out = Vec::new();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let kmax = (4.5 / h).ceil() as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = half_pi * t.sinh();
        let cu = u.cosh();
        // weight of the [-1,1] rule times the half-length
        let w = h * half_pi * t.cosh() / (cu * cu) * 0.5 * len;
        if !(w > 1e-300) {
            continue;
        }
        // distance of the image point to the nearer end
        let near = len / (1.0 + (2.0 * u.abs()).exp());
        if near <= 0.0 {
            continue;
        }
        let (from_lo, from_hi) = if u >= 0.0 {
            (len - near, near)
        } else {
            (near, len - near)
        };
        let mut x = if u >= 0.0 { b - near } else { a + near };
        // keep the abscissa strictly inside when it rounds onto an end
        if x <= a {
            x = a + (b - a) * f64::EPSILON;
        } else if x >= b {
            x = b - (b - a) * f64::EPSILON;
        }
        out.push(TsNode {
            x,
            from_lo,
            from_hi,
            weight: w,
        });
    }
    out
}

/// Adaptive tanh-sinh integral of `f` over `[a, b]`; halves the step until
/// successive estimates agree to `tol` (relative) or the level cap is hit.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut prev = f64::NAN;
    for level in 3..=10 {
        let est: f64 = tanh_sinh_nodes(a, b, level)
            .iter()
            .map(|n| n.weight * f(n.x))
            .sum();
        if (est - prev).abs() <= tol * est.abs().max(1e-300) {
            return est;
        }
        prev = est;
    }
    prev
}

/// Tanh-sinh discretisation of a generalized Jacobi weight with the weight
/// folded into the node weights; cells are split at every singularity.
pub fn tanh_sinh_jacobi_rule(spec: &GenJacobiSpec, level: u32) -> Rule {
    let bps = spec.breakpoints();
    let mut rule = Rule::default();
    for (idx, pair) in bps.windows(2).enumerate() {
        let (lo, e_lo) = pair[0];
        let (hi, e_hi) = pair[1];
        for n in tanh_sinh_nodes(lo, hi, level) {
            let mut w = n.weight * pow_or_one(n.from_lo, e_lo) * pow_or_one(n.from_hi, e_hi);
            for (j, &(c, e)) in bps.iter().enumerate() {
                if j != idx && j != idx + 1 && e != 0.0 {
                    w *= (n.x - c).abs().powf(e);
                }
            }
            rule.nodes.push(n.x);
            rule.weights.push(w);
        }
    }
    rule
}

/// Tanh-sinh node on one panel of a generalized Jacobi weight.
#[derive(Debug, Clone, Copy)]
pub struct PanelNode {
    pub y: f64,
    /// Tanh-sinh weight without the Jacobi weight.
    pub ts_weight: f64,
    /// Jacobi weight at `y`, evaluated from the exact end offsets.
    pub w: f64,
    /// `1 + y` and `1 - y`, exact near the ends.
    pub from_minus_one: f64,
    pub to_plus_one: f64,
    /// Panel ends and the exact distances to them.
    pub left: f64,
    pub right: f64,
    pub to_left: f64,
    pub to_right: f64,
}

impl PanelNode {
    /// `x - y`, exact when `x` is an end of the panel.
    pub fn offset_from(&self, x: f64) -> f64 {
        if x == self.right {
            self.to_right
        } else if x == self.left {
            -self.to_left
        } else {
            x - self.y
        }
    }

    /// `1 - y^2` from the end offsets.
    pub fn one_minus_square(&self) -> f64 {
        self.from_minus_one * self.to_plus_one
    }
}

/// Tanh-sinh nodes for `w(y) dy` on `[-1, 1]`, with panels split at every
/// singularity of `w` and at the extra `cuts`.
pub fn jacobi_panels(spec: &GenJacobiSpec, cuts: &[f64], level: u32) -> Vec<PanelNode> {
    let mut ends: Vec<f64> = spec.breakpoints().iter().map(|b| b.0).collect();
    ends.extend(cuts.iter().copied().filter(|c| *c > -1.0 && *c < 1.0));
    ends.sort_by(f64::total_cmp);
    ends.dedup();
    let mut out = Vec::new();
    for pair in ends.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        for n in tanh_sinh_nodes(lo, hi, level) {
            let from_minus_one = if lo == -1.0 { n.from_lo } else { 1.0 + n.x };
            let to_plus_one = if hi == 1.0 { n.from_hi } else { 1.0 - n.x };
            let w = spec.weight_with_offsets(n.x, from_minus_one, to_plus_one);
            out.push(PanelNode {
                y: n.x,
                ts_weight: n.weight,
                w,
                from_minus_one,
                to_plus_one,
                left: lo,
                right: hi,
                to_left: n.from_lo,
                to_right: n.from_hi,
            });
        }
    }
    out
}

fn pow_or_one(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Dot product evaluated as if in twice the working precision
/// (Ogita-Rump-Oishi `Dot2`).
pub fn dot2(x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let p = a * b;
        let perr = a.mul_add(b, -p);
        let (t, serr) = two_sum(s, p);
        s = t;
        c += serr + perr;
    }
    s + c
}

/// Plain dot product.
pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
