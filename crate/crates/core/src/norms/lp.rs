//! `L^p` and Lorentz norms with respect to the grid weights.

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `(sum_i w_i |f_i|^p)^{1/p}`; `p = inf` gives the max over nodes of
/// positive weight.
pub fn lp_norm_with(values: &[f64], weights: &[f64], p: f64) -> f64 {
    let live = values.iter().zip(weights).filter(|(_, &w)| w > 0.0);
    if p.is_infinite() {
        return live.fold(0.0, |m, (v, _)| m.max(v.abs()));
    }
    live.map(|(v, w)| w * v.abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// `||f||_{L^p(d nu)}`, atoms included.
pub fn lp_norm(f: &GridFunction, p: f64) -> f64 {
    lp_norm_with(f.values(), f.grid().weights(), p)
}

/// One step of a nonincreasing rearrangement: `f^*` equals `value` on an
/// interval of length `measure`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub value: f64,
    pub measure: f64,
}

/// Nonincreasing rearrangement of `|f|` as steps with strictly decreasing
/// values. Nodes of zero weight are ignored.
pub fn rearrangement_with(values: &[f64], weights: &[f64]) -> Vec<Step> {
    let mut pairs: Vec<(f64, f64)> = values
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(v, &w)| (v.abs(), w))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut steps: Vec<Step> = Vec::new();
    for (value, w) in pairs {
        match steps.last_mut() {
            Some(s) if s.value == value => s.measure += w,
            _ => steps.push(Step { value, measure: w }),
        }
    }
    steps
}

pub fn rearrangement(f: &GridFunction) -> Vec<Step> {
    rearrangement_with(f.values(), f.grid().weights())
}

/// Lorentz exponents `(p, r)` with `1 <= p < inf`, `1 <= r <= inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIndex {
    p: f64,
    r: f64,
}

impl LorentzIndex {
    pub fn new(p: f64, r: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponent(format!(
                "p = {p} must lie in [1, inf)"
            )));
        }
        if !(r >= 1.0) {
            return Err(Error::InvalidExponent(format!(
                "r = {r} must lie in [1, inf]"
            )));
        }
        Ok(LorentzIndex { p, r })
    }

    /// `L^{p,p} = L^p`.
    pub fn strong(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    /// `L^{p,inf}`.
    pub fn weak(p: f64) -> Result<Self> {
        Self::new(p, f64::INFINITY)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn is_weak(&self) -> bool {
        self.r.is_infinite()
    }

    /// `(p', r')`. Fails for `p = 1`, whose conjugate is not a valid first
    /// index.
    pub fn conjugate(&self) -> Result<Self> {
        Self::new(conjugate_exponent(self.p), conjugate_exponent(self.r))
    }
}

/// `q` with `1/p + 1/q = 1`, mapping `1 <-> inf`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Lorentz norm of a step function. On the step `(T_{k-1}, T_k]` the
/// integral of `t^{r/p - 1}` is closed form, so
/// `||f||_{p,r}^r = sum_k v_k^r (T_k^{r/p} - T_{k-1}^{r/p})` and
/// `||f||_{p,inf} = max_k v_k T_k^{1/p}`.
pub fn lorentz_norm_of_steps(steps: &[Step], idx: LorentzIndex) -> f64 {
    let (p, r) = (idx.p, idx.r);
    let mut t = 0.0;
    if idx.is_weak() {
        let mut sup: f64 = 0.0;
        for s in steps {
            t += s.measure;
            sup = sup.max(s.value * t.powf(1.0 / p));
        }
        return sup;
    }
    let mut acc = 0.0;
    let mut prev = 0.0;
    for s in steps {
        t += s.measure;
        let cur = t.powf(r / p);
        acc += s.value.powf(r) * (cur - prev);
        prev = cur;
    }
    acc.powf(1.0 / r)
}

pub fn lorentz_norm_with(values: &[f64], weights: &[f64], idx: LorentzIndex) -> f64 {
    lorentz_norm_of_steps(&rearrangement_with(values, weights), idx)
}

/// `||f||_{p,inf} = sup_t t^{1/p} f^*(t)` for weights and values.
pub fn weak_norm_with(values: &[f64], weights: &[f64], p: f64) -> f64 {
    lorentz_norm_of_steps(
        &rearrangement_with(values, weights),
        LorentzIndex {
            p,
            r: f64::INFINITY,
        },
    )
}

/// `||f||_{L^{p,r}(d nu)}`.
pub fn lorentz_norm(f: &GridFunction, idx: LorentzIndex) -> f64 {
    lorentz_norm_with(f.values(), f.grid().weights(), idx)
}
