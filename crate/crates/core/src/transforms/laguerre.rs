//! Kernels at the mass point of `x^alpha e^{-x} dx + M delta_0`.
//!
//! `L_n(x, 0)` is orthogonal to `x R(x)` for every `R` of degree `< n`, as is
//! `Q_n`, the orthonormal polynomial of `x^{alpha+1} e^{-x} dx`; hence
//! `L_n(x, 0) = r_n Q_n(x)` with `r_n = L_n(0, 0) / Q_n(0)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::opoly::{BuildOptions, OrthoBasis};

/// `|Q_n(0)| = Gamma(n+alpha+2)^{1/2} / (Gamma(alpha+2) (n!)^{1/2})`.
pub fn q_at_zero_closed_form(alpha: f64, n: usize) -> f64 {
    let nf = n as f64;
    (0.5 * ln_gamma(nf + alpha + 2.0) - ln_gamma(alpha + 2.0) - 0.5 * ln_gamma(nf + 1.0)).exp()
}

#[derive(Debug, Clone)]
pub struct LaguerreMassKernel {
    alpha: f64,
    mass: f64,
    nu: OrthoBasis,
    q: OrthoBasis,
}

/// One row of the mass-point kernel table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreRow {
    pub n: usize,
    pub kernel_at_zero: f64,
    pub q_at_zero: f64,
    pub r: f64,
    /// `|r_n| n^{(alpha+1)/2}`.
    pub scaled_r: f64,
}

impl LaguerreMassKernel {
    pub fn new(alpha: f64, mass: f64, cap: usize) -> Result<Self> {
        let spec = MeasureSpec::laguerre(alpha)
            .with_mass(0.0, mass)
            .validate()?;
        let nu = OrthoBasis::build(&spec, cap, BuildOptions::default())?;
        let q = OrthoBasis::build(
            &MeasureSpec::laguerre(alpha + 1.0),
            cap,
            BuildOptions::default(),
        )?;
        Ok(LaguerreMassKernel { alpha, mass, nu, q })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn nu_basis(&self) -> &OrthoBasis {
        &self.nu
    }

    pub fn q_basis(&self) -> &OrthoBasis {
        &self.q
    }

    /// `L_n(0, 0)`.
    pub fn kernel_at_zero(&self, n: usize) -> Result<f64> {
        self.nu.cd_kernel(n, 0.0, 0.0)
    }

    /// `Q_n(0)`; its sign is `(-1)^n` since leading coefficients are positive.
    pub fn q_at_zero(&self, n: usize) -> Result<f64> {
        self.q.eval(n, 0.0)
    }

    pub fn r(&self, n: usize) -> Result<f64> {
        Ok(self.kernel_at_zero(n)? / self.q_at_zero(n)?)
    }

    /// `r_n Q_n(x)`.
    pub fn kernel_via_q(&self, n: usize, x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::LocationOutsideSupport(x));
        }
        Ok(self.r(n)? * self.q.eval(n, x)?)
    }

    pub fn row(&self, n: usize) -> Result<LaguerreRow> {
        let kernel_at_zero = self.kernel_at_zero(n)?;
        let q_at_zero = self.q_at_zero(n)?;
        let r = kernel_at_zero / q_at_zero;
        Ok(LaguerreRow {
            n,
            kernel_at_zero,
            q_at_zero,
            r,
            scaled_r: r.abs() * (n as f64).powf(0.5 * (self.alpha + 1.0)),
        })
    }
}

/// `(L_n(x, 0), r_n)` for `x^alpha e^{-x} dx + M delta_0`.
pub fn laguerre_mass_kernel(alpha: f64, mass: f64, n: usize, x: f64) -> Result<(f64, f64)> {
    let k = LaguerreMassKernel::new(alpha, mass, n)?;
    Ok((k.kernel_via_q(n, x)?, k.r(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn degree_zero() {
        let (l, r) = laguerre_mass_kernel(0.0, 1.0, 0, 3.0).unwrap();
        assert_relative_eq!(l, 0.5, max_relative = 1e-14);
        assert_relative_eq!(r, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn closed_form_at_zero() {
        assert_relative_eq!(
            q_at_zero_closed_form(0.0, 1),
            2f64.sqrt(),
            max_relative = 1e-14
        );
        let k = LaguerreMassKernel::new(0.0, 1.0, 4).unwrap();
        assert_relative_eq!(
            k.q_at_zero(1).unwrap(),
            -(2f64.sqrt()),
            max_relative = 1e-14
        );
    }

    #[test]
    fn product_form_matches_kernel() {
        let k = LaguerreMassKernel::new(0.5, 2.0, 30).unwrap();
        for n in [1, 5, 17, 30] {
            for x in [0.0, 0.4, 3.0, 11.0, 40.0] {
                let a = k.kernel_via_q(n, x).unwrap();
                let b = k.nu_basis().cd_kernel(n, x, 0.0).unwrap();
                assert!(
                    (a - b).abs() <= 1e-8 * b.abs().max(1e-300),
                    "n = {n}, x = {x}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn negative_point_is_rejected() {
        let k = LaguerreMassKernel::new(0.0, 1.0, 3).unwrap();
        assert!(k.kernel_via_q(2, -1.0).is_err());
    }
}
