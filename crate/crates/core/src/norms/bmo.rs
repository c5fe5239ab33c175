//! Dyadic lower bound for the BMO norm on `[-1, 1]`.

use rayon::prelude::*;

use crate::quadrature::tanh_sinh;

const TOL: f64 = 1e-12;

/// Sub-panels used for `\int |b - b_J|`, whose kink slows tanh-sinh down.
const PANELS: usize = 8;

fn integral(f: &(dyn Fn(f64) -> f64 + Sync), lo: f64, hi: f64) -> f64 {
    // nodes rounding onto an endpoint singularity are dropped
    tanh_sinh(
        |x| {
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        lo,
        hi,
        TOL,
    )
}

/// `(1/|J|) \int_J |b - b_J|` on `J = [lo, hi]`.
pub fn mean_oscillation(b: &(dyn Fn(f64) -> f64 + Sync), lo: f64, hi: f64) -> f64 {
    let len = hi - lo;
    let mean = integral(b, lo, hi) / len;
    let h = len / PANELS as f64;
    let dev = |x: f64| (b(x) - mean).abs();
    let total: f64 = (0..PANELS)
        .map(|k| {
            let a = lo + h * k as f64;
            let c = if k + 1 == PANELS { hi } else { a + h };
            integral(&dev, a, c)
        })
        .sum();
    total / len
}

/// Max of the mean oscillation over the dyadic subintervals of `[-1, 1]`
/// of length `2, 1, ..., 2^{-resolution}`. A lower bound for the BMO norm,
/// nondecreasing in `resolution`.
pub fn bmo_norm_estimate(b: impl Fn(f64) -> f64 + Sync, resolution: u32) -> f64 {
    let b: &(dyn Fn(f64) -> f64 + Sync) = &b;
    (0..=resolution + 1)
        .flat_map(|level| {
            let count = 1usize << level;
            (0..count).map(move |k| (level, k))
        })
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(level, k)| {
            let h = 2.0 / (1u64 << level) as f64;
            let lo = -1.0 + h * k as f64;
            let hi = if k + 1 == 1 << level { 1.0 } else { lo + h };
            mean_oscillation(b, lo, hi)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_symbol() {
        assert!(bmo_norm_estimate(|_| 3.0, 6) < 1e-14);
    }

    #[test]
    fn linear_symbol() {
        // mean of |x - c| over an interval of length l is l/4
        let v = bmo_norm_estimate(|x| x, 6);
        assert!((v - 0.5).abs() < 1e-10, "{v}");
        assert!((mean_oscillation(&|x| x, 0.0, 0.5) - 0.125).abs() < 1e-10);
    }

    #[test]
    fn log_symbol_stabilises() {
        // every interval [1 - l, 1] gives \int_0^1 |log s + 1| ds = 2/e
        let b = |x: f64| (-x).ln_1p();
        let levels: Vec<f64> = (2..=8).map(|r| bmo_norm_estimate(b, r)).collect();
        for w in levels.windows(2) {
            assert!(w[1] >= w[0]);
            assert!((w[1] - w[0]) / w[0] < 0.01);
        }
        let two_over_e = 2.0 / std::f64::consts::E;
        assert!(
            (levels[levels.len() - 1] - two_over_e).abs() < 1e-6,
            "{levels:?}"
        );
    }
}
