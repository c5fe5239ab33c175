//! Exact rational reference computations.
//!
//! Everything here is brute force over `BigRational`: monomial moments of a
//! measure with point masses, Hankel determinants and classical Gram-Schmidt
//! on the monomials. Only a final square root (for normalisation) is taken in
//! floating point. The crate shares no code with `ortho-mass` on purpose, so
//! it can serve as an independent reference in that crate's tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    /// The configuration has no rational moments (non-integer exponent).
    #[error("configuration has irrational moments: {0}")]
    Irrational(String),
    #[error("Hankel matrix is singular at order {0}")]
    HankelSingular(usize),
}

/// Base weights with rational moments.
#[derive(Debug, Clone, PartialEq)]
pub enum RationalBase {
    /// `(1-x)^alpha (1+x)^beta` on `[-1, 1]` with non-negative integer exponents.
    Jacobi { alpha: u32, beta: u32 },
    /// `x^alpha e^{-x}` on `[0, inf)` with non-negative integer exponent.
    Laguerre { alpha: u32 },
}

impl RationalBase {
    /// Builds a base from floating point exponents, rejecting anything that is
    /// not a non-negative integer.
    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self, OracleError> {
        Ok(RationalBase::Jacobi {
            alpha: as_exponent(alpha)?,
            beta: as_exponent(beta)?,
        })
    }

    pub fn laguerre(alpha: f64) -> Result<Self, OracleError> {
        Ok(RationalBase::Laguerre {
            alpha: as_exponent(alpha)?,
        })
    }
}

fn as_exponent(e: f64) -> Result<u32, OracleError> {
    if e >= 0.0 && e.fract() == 0.0 && e < 64.0 {
        Ok(e as u32)
    } else {
        Err(OracleError::Irrational(format!("exponent {e}")))
    }
}

/// Exact `m_j = \int x^j d nu` for `j = 0..=2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMoments {
    pub values: Vec<BigRational>,
}

impl RationalMoments {
    pub fn order(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    /// Determinant of the Hankel matrix `(m_{i+j})_{i,j<size}` by
    /// Gaussian elimination over the rationals.
    pub fn hankel_determinant(&self, size: usize) -> BigRational {
        let mut a: Vec<Vec<BigRational>> = (0..size)
            .map(|i| (0..size).map(|j| self.values[i + j].clone()).collect())
            .collect();
        let mut det = BigRational::one();
        for col in 0..size {
            let Some(pivot) = (col..size).find(|&r| !a[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            let p = a[col][col].clone();
            det *= p.clone();
            for r in col + 1..size {
                let factor = a[r][col].clone() / p.clone();
                for c in col..size {
                    let delta = factor.clone() * a[col][c].clone();
                    a[r][c] -= delta;
                }
            }
        }
        det
    }

    /// `\int p q d nu` for polynomials given by monomial coefficients.
    pub fn inner(&self, p: &[BigRational], q: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, pi) in p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            for (j, qj) in q.iter().enumerate() {
                if qj.is_zero() {
                    continue;
                }
                acc += pi.clone() * qj.clone() * self.values[i + j].clone();
            }
        }
        acc
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Converts a double to the exact binary rational it represents.
pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Moments `m_0..m_{2n}` of `base + sum_i M_i delta_{a_i}`; masses are
/// `(location, mass)` pairs taken exactly from their binary values.
pub fn rational_moments(
    base: &RationalBase,
    masses: &[(f64, f64)],
    n: usize,
) -> Result<RationalMoments, OracleError> {
    let count = 2 * n + 1;
    let mut values = Vec::with_capacity(count);
    match *base {
        RationalBase::Jacobi { alpha, beta } => {
            // (1-x)^alpha (1+x)^beta expanded into monomials.
            let mut weight = vec![BigInt::zero(); (alpha + beta + 1) as usize];
            for i in 0..=alpha {
                for j in 0..=beta {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    weight[(i + j) as usize] +=
                        BigInt::from(sign) * binomial(alpha, i) * binomial(beta, j);
                }
            }
            for k in 0..count {
                let mut acc = BigRational::zero();
                for (d, c) in weight.iter().enumerate() {
                    let e = k + d;
                    if e % 2 == 0 {
                        acc += BigRational::new(c * BigInt::from(2), BigInt::from(e + 1));
                    }
                }
                values.push(acc);
            }
        }
        RationalBase::Laguerre { alpha } => {
            for k in 0..count {
                values.push(BigRational::from_integer(factorial(k as u32 + alpha)));
            }
        }
    }
    for &(loc, mass) in masses {
        if !(mass > 0.0) || !loc.is_finite() {
            return Err(OracleError::Irrational(format!("mass ({loc}, {mass})")));
        }
        let a = exact(loc);
        let m = exact(mass);
        let mut power = BigRational::one();
        for v in values.iter_mut() {
            *v += m.clone() * power.clone();
            power *= a.clone();
        }
    }
    Ok(RationalMoments { values })
}

/// One exactly orthogonalised polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPolynomial {
    /// Monic coefficients in increasing degree order.
    pub monic: Vec<BigRational>,
    /// `\int p^2 d nu`, exact.
    pub norm_squared: BigRational,
}

impl ExactPolynomial {
    /// Orthonormal coefficients (positive leading coefficient); the only
    /// floating point step is `1 / sqrt(norm_squared)`.
    pub fn orthonormal(&self) -> Vec<f64> {
        let scale = 1.0 / self.norm_squared.to_f64().expect("finite").sqrt();
        self.monic
            .iter()
            .map(|c| c.to_f64().expect("finite") * scale)
            .collect()
    }
}

/// Gram-Schmidt on `1, x, x^2, ...` up to degree `n` in exact arithmetic.
pub fn exact_gram_schmidt(
    moments: &RationalMoments,
    n: usize,
) -> Result<Vec<ExactPolynomial>, OracleError> {
    assert!(n <= moments.order(), "not enough moments for degree {n}");
    let mut out: Vec<ExactPolynomial> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut p = vec![BigRational::zero(); k + 1];
        p[k] = BigRational::one();
        for q in &out {
            let proj = moments.inner(&p, &q.monic) / q.norm_squared.clone();
            for (i, c) in q.monic.iter().enumerate() {
                p[i] -= proj.clone() * c.clone();
            }
        }
        let norm_squared = moments.inner(&p, &p);
        if !norm_squared.is_positive() {
            return Err(OracleError::HankelSingular(k));
        }
        out.push(ExactPolynomial {
            monic: p,
            norm_squared,
        });
    }
    Ok(out)
}
