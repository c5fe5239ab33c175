//! Envelopes bounding `|L_n(x, a)|` at a mass point `a` of a generalized
//! Jacobi measure, and the empirical ratio of kernels to envelopes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{GenJacobiSpec, MeasureSpec};
use crate::opoly::OrthoBasis;

/// Envelope for `|L_n(x, a)|`. At an interior `a` both end factors
/// `(1 -+ x + n^{-2})^{-(2e+1)/4}` appear; a mass at `+1` drops the factor
/// at `+1`, a mass at `-1` the one at `-1`. Singularities at `a` itself are
/// left out of the product.
pub fn kernel_envelope(weight: &GenJacobiSpec, a: f64, n: usize, x: f64) -> f64 {
    let n = n.max(1) as f64;
    let reg = 1.0 / (n * n);
    let mut e = 1.0;
    if a != 1.0 {
        e *= (1.0 - x + reg).powf(-(2.0 * weight.alpha + 1.0) / 4.0);
    }
    if a != -1.0 {
        e *= (1.0 + x + reg).powf(-(2.0 * weight.beta + 1.0) / 4.0);
    }
    for s in weight.singularities.iter().filter(|s| s.t != a) {
        e *= ((x - s.t).abs() + 1.0 / n).powf(-s.gamma / 2.0);
    }
    e
}

/// Width of the excluded collar around `+-1` at degree `n`.
pub fn collar(n: usize) -> f64 {
    let n = n.max(1) as f64;
    0.1 / (n * n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRatio {
    pub location: f64,
    /// `(n, max_x |L_n(x, a)| / envelope)`.
    pub per_degree: Vec<(usize, f64)>,
    /// Set when `a` coincides with a singularity of the weight, where no
    /// envelope is established.
    pub on_singularity: bool,
}

impl EnvelopeRatio {
    /// `sup_{n <= cap}` of the per-degree ratios.
    pub fn sup_up_to(&self, cap: usize) -> f64 {
        self.per_degree
            .iter()
            .filter(|(n, _)| *n <= cap)
            .fold(0.0, |m, (_, r)| m.max(*r))
    }
}

/// Ratio of `|L_n(x, a)|` to the envelope over `xs` (minus the collar) for
/// every `n` in `degrees`.
pub fn envelope_ratio(
    basis: &OrthoBasis,
    a: f64,
    degrees: &[usize],
    xs: &[f64],
) -> Result<EnvelopeRatio> {
    let spec: &MeasureSpec = basis.measure();
    let weight = spec
        .base
        .as_jacobi()
        .ok_or_else(|| Error::Unsupported("kernel envelopes need a weight on [-1, 1]".into()))?;
    if spec.mass_at(a).is_none() {
        return Err(Error::UnknownLocation(a));
    }
    let n_max = degrees.iter().copied().max().unwrap_or(0);
    let pa = basis.eval_all(n_max, a)?;
    let table: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| basis.eval_all(n_max, x))
        .collect::<Result<_>>()?;
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let per_degree = sorted
        .iter()
        .map(|&n| {
            let c = collar(n);
            let ratio = xs
                .iter()
                .zip(&table)
                .filter(|(x, _)| 1.0 - x.abs() >= c)
                .map(|(&x, px)| {
                    let k: f64 = px[..=n].iter().zip(&pa).map(|(u, v)| u * v).sum();
                    k.abs() / kernel_envelope(weight, a, n, x)
                })
                .fold(0.0, f64::max);
            (n, ratio)
        })
        .collect();
    Ok(EnvelopeRatio {
        location: a,
        per_degree,
        on_singularity: weight.singularities.iter().any(|s| s.t == a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opoly::BuildOptions;

    #[test]
    fn envelope_factors() {
        let w = GenJacobiSpec::legendre().with_singularity(0.3, 1.0);
        // interior mass at the singularity: only the end factors remain
        let e = kernel_envelope(&w, 0.3, 10, 0.0);
        let expect = (1.01f64).powf(-0.25) * (1.01f64).powf(-0.25);
        assert!((e - expect).abs() < 1e-15);
        // mass at +1 drops the +1 factor
        let e = kernel_envelope(&GenJacobiSpec::legendre(), 1.0, 10, 0.0);
        assert!((e - 1.01f64.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn ratio_is_finite_and_reports_singular_mass() {
        let spec = MeasureSpec::jacobi(GenJacobiSpec::legendre().with_singularity(0.3, 1.0))
            .with_mass(0.3, 1.0);
        let b = OrthoBasis::build(&spec, 20, BuildOptions::default()).unwrap();
        let xs: Vec<f64> = (0..201).map(|i| -1.0 + 0.01 * i as f64).collect();
        let r = envelope_ratio(&b, 0.3, &[5, 10, 20], &xs).unwrap();
        assert!(r.on_singularity);
        assert!(r.sup_up_to(20).is_finite());
        assert!(envelope_ratio(&b, 0.5, &[5], &xs).is_err());
    }
}
