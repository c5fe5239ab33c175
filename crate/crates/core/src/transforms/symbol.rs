//! Multiplication symbols for commutators.

use serde::{Deserialize, Serialize};

use crate::quadrature::tanh_sinh;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Symbol {
    Constant {
        value: f64,
    },
    /// `b(x) = x`.
    Linear,
    /// `b(x) = log(1 - x)`, unbounded at `+1`.
    LogOneMinus,
    /// `b(x) = log|x - t|`.
    LogDistance {
        t: f64,
    },
    /// `b(x) = tanh((x - t) / width)`.
    SmoothStep {
        t: f64,
        width: f64,
    },
}

impl Symbol {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Symbol::Constant { value } => value,
            Symbol::Linear => x,
            Symbol::LogOneMinus => (-x).ln_1p(),
            Symbol::LogDistance { t } => (x - t).abs().ln(),
            Symbol::SmoothStep { t, width } => ((x - t) / width).tanh(),
        }
    }

    /// Point where the symbol is singular or changes fastest.
    pub fn center(&self) -> Option<f64> {
        match *self {
            Symbol::LogDistance { t } | Symbol::SmoothStep { t, .. } if t.abs() < 1.0 => Some(t),
            _ => None,
        }
    }

    /// Lebesgue mean over `[-1, 1]`: closed form when available, otherwise
    /// tanh-sinh split at the center.
    pub fn mean(&self) -> f64 {
        if let Some(m) = self.exact_mean() {
            return m;
        }
        let f = |x| self.eval(x);
        match self.center() {
            Some(t) => 0.5 * (tanh_sinh(f, -1.0, t, 1e-14) + tanh_sinh(f, t, 1.0, 1e-14)),
            None => 0.5 * tanh_sinh(f, -1.0, 1.0, 1e-14),
        }
    }

    /// Mean over `[-1, 1]` where a closed form is available.
    pub fn exact_mean(&self) -> Option<f64> {
        match *self {
            Symbol::Constant { value } => Some(value),
            Symbol::Linear => Some(0.0),
            Symbol::LogOneMinus => Some(std::f64::consts::LN_2 - 1.0),
            Symbol::LogDistance { t } if t.abs() < 1.0 => {
                let (u, v) = (1.0 - t, 1.0 + t);
                Some(0.5 * (u * u.ln() + v * v.ln()) - 1.0)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn means_match_quadrature() {
        for s in [
            Symbol::Constant { value: 2.0 },
            Symbol::Linear,
            Symbol::LogOneMinus,
            Symbol::LogDistance { t: 0.3 },
        ] {
            let f = |x| s.eval(x);
            let q = match s.center() {
                Some(t) => 0.5 * (tanh_sinh(f, -1.0, t, 1e-14) + tanh_sinh(f, t, 1.0, 1e-14)),
                None => 0.5 * tanh_sinh(f, -1.0, 1.0, 1e-14),
            };
            let e = s.exact_mean().unwrap();
            assert!((q - e).abs() < 1e-10, "{s:?}: {q} vs {e}");
        }
        let step = Symbol::SmoothStep { t: 0.2, width: 0.1 };
        // odd about t: mean = (\int_{-1}^{-0.6} ... ) / 2 = -0.4 tanh-ish part
        let direct = 0.5 * tanh_sinh(|x| step.eval(x), -1.0, -0.6, 1e-14);
        assert!((step.mean() - direct).abs() < 1e-12);
    }
}
