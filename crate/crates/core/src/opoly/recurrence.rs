use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::measure::{BaseWeight, GenJacobiSpec};
use crate::quadrature::{composite_jacobi_rule, dot, dot2, Rule};

/// Three-term recurrence of an orthonormal system,
/// `sqrt(beta_{k+1}) P_{k+1} = (x - alpha_k) P_k - sqrt(beta_k) P_{k-1}`,
/// with `beta_0` the total mass and `P_0 = 1 / sqrt(beta_0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Recurrence {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.beta[0]
    }

    /// First `len` coefficient pairs.
    pub fn truncated(&self, len: usize) -> Recurrence {
        Recurrence {
            alpha: self.alpha[..len].to_vec(),
            beta: self.beta[..len].to_vec(),
        }
    }

    /// CSV with columns `k,alpha_k,beta_k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,alpha_k,beta_k\n");
        for (k, (a, b)) in self.alpha.iter().zip(&self.beta).enumerate() {
            out.push_str(&format!("{k},{a},{b}\n"));
        }
        out
    }
}

/// Closed-form recurrence of length `n` for a Jacobi, Laguerre or Hermite
/// weight. Generalized Jacobi weights with interior singularities have no
/// closed form and are rejected.
pub fn classical_recurrence(base: &BaseWeight, n: usize) -> Result<Recurrence> {
    let (alpha, beta) = match base {
        BaseWeight::Jacobi(spec) => {
            if !spec.is_classical() {
                return Err(Error::Unsupported(
                    "closed-form recurrence needs a weight without interior singularities".into(),
                ));
            }
            jacobi_coefficients(spec.alpha, spec.beta, n)
        }
        BaseWeight::Laguerre { alpha: a } => {
            let alpha = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
            let beta = (0..n)
                .map(|k| {
                    if k == 0 {
                        ln_gamma(a + 1.0).exp()
                    } else {
                        k as f64 * (k as f64 + a)
                    }
                })
                .collect();
            (alpha, beta)
        }
        BaseWeight::Hermite => {
            let beta = (0..n)
                .map(|k| {
                    if k == 0 {
                        std::f64::consts::PI.sqrt()
                    } else {
                        0.5 * k as f64
                    }
                })
                .collect();
            (vec![0.0; n], beta)
        }
    };
    Ok(Recurrence { alpha, beta })
}

/// Recurrence for `(1-x)^a (1+x)^b`.
fn jacobi_coefficients(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let ab = a + b;
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        alpha.push(if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        });
        beta.push(match k {
            0 => ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
                - ln_gamma(ab + 2.0))
            .exp(),
            1 => 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab)),
            _ => 4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0)),
        });
    }
    (alpha, beta)
}

/// Recurrence of length `n` for the discrete measure `rule`, by the Stieltjes
/// procedure on normalised node vectors. With `high_precision` every inner
/// product is accumulated in compensated arithmetic.
pub fn stieltjes_recurrence(rule: &Rule, n: usize, high_precision: bool) -> Result<Recurrence> {
    if rule.len() < 2 * n {
        return Err(Error::GridTooSmall {
            grid: rule.len(),
            degree: n,
        });
    }
    let inner = if high_precision { dot2 } else { dot };
    let total = inner(&rule.weights, &vec![1.0; rule.len()]);
    if !(total > 0.0) {
        return Err(Error::NumericalBreakdown(
            "discrete measure has no mass".into(),
        ));
    }
    let x = &rule.nodes;
    let mut prev = vec![0.0; rule.len()];
    let mut cur: Vec<f64> = rule.weights.iter().map(|w| (w / total).sqrt()).collect();
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    beta.push(total);
    let mut xq = vec![0.0; rule.len()];
    for k in 0..n {
        for ((o, &xi), &q) in xq.iter_mut().zip(x).zip(&cur) {
            *o = xi * q;
        }
        let a = inner(&xq, &cur);
        alpha.push(a);
        if k + 1 == n {
            break;
        }
        let b = beta[k].sqrt();
        let sub = if k == 0 { 0.0 } else { b };
        let next: Vec<f64> = xq
            .iter()
            .zip(&cur)
            .zip(&prev)
            .map(|((&v, &c), &p)| v - a * c - sub * p)
            .collect();
        let bb = inner(&next, &next);
        if !(bb > 0.0) {
            return Err(Error::NumericalBreakdown(format!(
                "Stieltjes step {k} produced a nonpositive coefficient"
            )));
        }
        let norm = bb.sqrt();
        beta.push(bb);
        prev = cur;
        cur = next.into_iter().map(|v| v / norm).collect();
    }
    Ok(Recurrence { alpha, beta })
}

/// Recurrence of length `n` for a generalized Jacobi weight, discretised with
/// `m` points spread over the cells between singularities.
pub fn jacobi_stieltjes(
    spec: &GenJacobiSpec,
    n: usize,
    m: usize,
    high_precision: bool,
) -> Result<Recurrence> {
    let cells = spec.breakpoints().len() - 1;
    let per_cell = m.div_ceil(cells).max(1);
    let rule = composite_jacobi_rule(spec, per_cell)?;
    stieltjes_recurrence(&rule, n, high_precision)
}
