use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::recurrence::{classical_recurrence, jacobi_stieltjes, Recurrence};
use crate::error::{Error, Result};
use crate::measure::{BaseWeight, MassPoint, MeasureSpec};

/// Construction parameters for [`OrthoBasis::build`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Discretisation points per recurrence coefficient for weights without a
    /// closed-form recurrence.
    pub grid_factor: usize,
    /// Compensated inner products in the discretised Stieltjes procedure.
    pub high_precision: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            grid_factor: 40,
            high_precision: false,
        }
    }
}

/// Change of basis from the system of the measure without masses:
/// `P^mu = L P^nu` with `L L^T` the Gram matrix of `P^mu` under `nu`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassUpdate {
    pub base: Recurrence,
    pub factor: DMatrix<f64>,
}

/// Orthonormal polynomials `P_0 .. P_cap` for a measure, positive leading
/// coefficients, evaluated by forward recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    measure: MeasureSpec,
    cap: usize,
    /// At least `cap + 1` coefficients; one spare lets masses be added
    /// without losing degree.
    rec: Recurrence,
    sqrt_beta: Vec<f64>,
    update: Option<MassUpdate>,
}

/// Serialised form of a basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisExport {
    pub measure: MeasureSpec,
    pub cap: usize,
    pub recurrence: Recurrence,
}

impl OrthoBasis {
    /// Basis for `measure` up to degree `cap`: closed form or discretised
    /// Stieltjes for the continuous part, then a Gram update for the masses.
    pub fn build(measure: &MeasureSpec, cap: usize, opts: BuildOptions) -> Result<OrthoBasis> {
        measure.check()?;
        let len = cap + 2;
        let rec = base_recurrence(&measure.base, len, opts)?;
        let base = OrthoBasis::from_recurrence(measure.base_only(), cap, rec)?;
        if measure.masses.is_empty() {
            Ok(base)
        } else {
            base.add_mass_points(&measure.masses)
        }
    }

    /// Wraps a recurrence that has at least `cap + 1` coefficients.
    pub fn from_recurrence(measure: MeasureSpec, cap: usize, rec: Recurrence) -> Result<Self> {
        if rec.len() < cap + 1 {
            return Err(Error::DegreeOutOfRange {
                degree: cap,
                cap: rec.len().saturating_sub(1),
            });
        }
        if let Some(k) = rec.beta.iter().position(|b| !(*b > 0.0)) {
            return Err(Error::NumericalBreakdown(format!(
                "recurrence coefficient beta_{k} is not positive"
            )));
        }
        let sqrt_beta = rec.beta.iter().map(|b| b.sqrt()).collect();
        Ok(OrthoBasis {
            measure,
            cap,
            rec,
            sqrt_beta,
            update: None,
        })
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn recurrence(&self) -> &Recurrence {
        &self.rec
    }

    pub fn mass_update(&self) -> Option<&MassUpdate> {
        self.update.as_ref()
    }

    /// `b_k = sqrt(beta_k)`.
    pub fn b(&self, k: usize) -> f64 {
        self.sqrt_beta[k]
    }

    /// Basis for `measure + sum M_i delta_{a_i}` with the same cap.
    ///
    /// In the current basis the Gram matrix under the new measure is
    /// `G = I + sum_i M_i e_i e_i^T` with `e_i = (P_j(a_i))_j`. With
    /// `G = L L^T`, `L^{-1} P` is orthonormal for the new measure and its
    /// recurrence follows from comparing `x P` in both bases.
    pub fn add_mass_points(&self, masses: &[MassPoint]) -> Result<OrthoBasis> {
        if masses.is_empty() {
            return Ok(self.clone());
        }
        let mut measure = self.measure.clone();
        measure.masses.extend_from_slice(masses);
        measure.check()?;
        let size = self.cap + 2;
        if self.rec.len() < size {
            return Err(Error::DegreeOutOfRange {
                degree: self.cap + 1,
                cap: self.rec.len() - 1,
            });
        }
        let mut gram = DMatrix::<f64>::identity(size, size);
        for mp in masses {
            let e = self.eval_upto(size - 1, mp.location);
            gram.ger(
                mp.mass,
                &nalgebra::DVector::from_vec(e.clone()),
                &nalgebra::DVector::from_vec(e),
                1.0,
            );
        }
        let chol = nalgebra::Cholesky::new(gram).ok_or_else(|| {
            Error::NumericalBreakdown(
                "Gram matrix of the mass update is not positive definite".into(),
            )
        })?;
        let l = chol.unpack();

        let len = size - 1;
        let b_mu = &self.sqrt_beta;
        let a_mu = &self.rec.alpha;
        let mut alpha = Vec::with_capacity(len);
        let mut beta = Vec::with_capacity(len);
        beta.push(self.rec.beta[0] * l[(0, 0)] * l[(0, 0)]);
        let mut b_prev = 0.0;
        for n in 0..len {
            let lnn = l[(n, n)];
            let b_next = b_mu[n + 1] * l[(n + 1, n + 1)] / lnn;
            let lower = if n == 0 { 0.0 } else { l[(n, n - 1)] * b_prev };
            alpha.push((b_mu[n + 1] * l[(n + 1, n)] + a_mu[n] * lnn - lower) / lnn);
            if n + 1 < len {
                beta.push(b_next * b_next);
            }
            b_prev = b_next;
        }
        let rec = Recurrence { alpha, beta };
        let mut out = OrthoBasis::from_recurrence(measure, self.cap, rec)?;
        out.update = Some(MassUpdate {
            base: self.rec.truncated(size),
            factor: l,
        });
        Ok(out)
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.cap {
            Err(Error::DegreeOutOfRange {
                degree: n,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// `P_0(x) .. P_n(x)` without a range check against the cap (the spare
    /// coefficient may be used).
    fn eval_upto(&self, n: usize, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        let mut cur = 1.0 / self.sqrt_beta[0];
        out.push(cur);
        for k in 0..n {
            // prev is 0 at k = 0, so beta_0 drops out
            let next =
                ((x - self.rec.alpha[k]) * cur - self.sqrt_beta[k] * prev) / self.sqrt_beta[k + 1];
            out.push(next);
            prev = cur;
            cur = next;
        }
        out
    }

    /// `P_n(x)`.
    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        self.check_degree(n)?;
        Ok(*self.eval_upto(n, x).last().expect("nonempty"))
    }

    /// `P_0(x) .. P_n(x)`.
    pub fn eval_all(&self, n: usize, x: f64) -> Result<Vec<f64>> {
        self.check_degree(n)?;
        Ok(self.eval_upto(n, x))
    }

    /// `P_0(x) .. P_n(x)` computed as `L^{-1} P^mu(x)` from the stored mass
    /// update, independently of the derived recurrence.
    pub fn eval_all_via_update(&self, n: usize, x: f64) -> Result<Vec<f64>> {
        self.check_degree(n)?;
        let Some(update) = &self.update else {
            return self.eval_all(n, x);
        };
        let base =
            OrthoBasis::from_recurrence(self.measure.base_only(), n, update.base.truncated(n + 1))?;
        let p = base.eval_upto(n, x);
        let l = &update.factor;
        let mut out = vec![0.0; n + 1];
        for i in 0..=n {
            let s: f64 = (0..i).map(|j| l[(i, j)] * out[j]).sum();
            out[i] = (p[i] - s) / l[(i, i)];
        }
        Ok(out)
    }

    /// Christoffel-Darboux kernel `L_n(x, y) = sum_{j<=n} P_j(x) P_j(y)`.
    pub fn cd_kernel(&self, n: usize, x: f64, y: f64) -> Result<f64> {
        let px = self.eval_all(n, x)?;
        if x == y {
            return Ok(px.iter().map(|v| v * v).sum());
        }
        let py = self.eval_upto(n, y);
        Ok(px.iter().zip(&py).map(|(a, b)| a * b).sum())
    }

    /// Monomial coefficients (increasing degree) of `P_0 .. P_n`.
    pub fn monomial_coefficients(&self, n: usize) -> Result<Vec<Vec<f64>>> {
        self.check_degree(n)?;
        let mut out: Vec<Vec<f64>> = vec![vec![1.0 / self.sqrt_beta[0]]];
        for k in 0..n {
            let cur = &out[k];
            let mut next = vec![0.0; k + 2];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= self.rec.alpha[k] * c;
            }
            if k > 0 {
                for (i, c) in out[k - 1].iter().enumerate() {
                    next[i] -= self.sqrt_beta[k] * c;
                }
            }
            for v in next.iter_mut() {
                *v /= self.sqrt_beta[k + 1];
            }
            out.push(next);
        }
        Ok(out)
    }

    pub fn export(&self) -> BasisExport {
        BasisExport {
            measure: self.measure.clone(),
            cap: self.cap,
            recurrence: self.rec.truncated(self.cap + 1),
        }
    }
}

/// Recurrence of length `len` for the continuous part of a measure.
pub fn base_recurrence(base: &BaseWeight, len: usize, opts: BuildOptions) -> Result<Recurrence> {
    match base {
        BaseWeight::Jacobi(spec) if !spec.is_classical() => {
            jacobi_stieltjes(spec, len, opts.grid_factor * len, opts.high_precision)
        }
        _ => classical_recurrence(base, len),
    }
}
