use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::{BuildOptions, OrthoBasis};
use crate::error::{Error, Result};
use crate::measure::{christoffel_modified, BaseWeight, MeasureSpec};

/// Condition number above which the candidate kernels count as dependent.
pub const MAX_FIT_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub subset: Vec<f64>,
    pub coefficient: f64,
}

/// Coefficients `C_n^A` in
/// `L_n(x,y) = sum_A C_n^A prod_{a in A} (x-a)(y-a) K^A_{n-|A|}(x,y)`,
/// where `K^A` is the kernel of the base measure times `prod_{a in A} (x-a)^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDecomposition {
    pub n: usize,
    pub terms: Vec<DecompositionTerm>,
    /// Largest fit residual, relative to `sqrt(L_n(x,x) L_n(y,y))`.
    pub residual: f64,
    pub condition: f64,
}

impl KernelDecomposition {
    pub fn sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient).sum()
    }

    pub fn coefficient(&self, subset: &[f64]) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| t.subset == subset)
            .map(|t| t.coefficient)
    }
}

/// All subsets of `locations`, ordered by size and then lexicographically by
/// location.
pub fn subsets(locations: &[f64]) -> Vec<Vec<f64>> {
    let mut locs = locations.to_vec();
    locs.sort_by(f64::total_cmp);
    let k = locs.len();
    let mut out: Vec<Vec<f64>> = (0u32..1 << k)
        .map(|mask| {
            (0..k)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| locs[i])
                .collect()
        })
        .collect();
    out.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    out
}

/// Bases of the Christoffel-modified measures for every subset of the mass
/// locations of `spec`, each with cap `cap`.
pub fn modified_bases(
    spec: &MeasureSpec,
    cap: usize,
    opts: BuildOptions,
) -> Result<Vec<(Vec<f64>, OrthoBasis)>> {
    subsets(&spec.mass_locations())
        .into_iter()
        .map(|a| {
            let modified = christoffel_modified(spec, &a)?;
            let basis = OrthoBasis::build(&modified.measure, cap, opts)?;
            Ok((a, basis))
        })
        .collect()
}

fn sample_points(base: &BaseWeight, n: usize, count: usize) -> Vec<f64> {
    let (lo, hi) = match base {
        BaseWeight::Jacobi(_) => (-1.0, 1.0),
        BaseWeight::Laguerre { .. } => (0.0, 4.0 * (n as f64 + 1.0)),
        BaseWeight::Hermite => {
            let r = (2.0 * n as f64 + 2.0).sqrt() + 1.0;
            (-r, r)
        }
    };
    (0..count)
        .map(|i| {
            let c = (std::f64::consts::PI * (i as f64 + 0.5) / count as f64).cos();
            0.5 * (lo + hi) - 0.5 * (hi - lo) * c
        })
        .collect()
}

/// Least-squares extraction of the `C_n^A` on a tensor grid of Chebyshev
/// points. Subsets with `|A| > n` have no kernel of degree `n - |A|` and are
/// left out.
pub fn kernel_decomposition(
    nu_basis: &OrthoBasis,
    modified: &[(Vec<f64>, OrthoBasis)],
    n: usize,
) -> Result<KernelDecomposition> {
    let cols: Vec<&(Vec<f64>, OrthoBasis)> =
        modified.iter().filter(|(a, _)| a.len() <= n).collect();
    let k = nu_basis.measure().masses.len();
    let g = (n + k + 3).max(8);
    let pts = sample_points(&nu_basis.measure().base, n, g);
    let diag: Vec<f64> = pts
        .iter()
        .map(|&x| nu_basis.cd_kernel(n, x, x))
        .collect::<Result<_>>()?;
    let kernels: Vec<Vec<Vec<f64>>> = cols
        .iter()
        .map(|(a, basis)| {
            let m = n - a.len();
            pts.iter()
                .map(|&x| {
                    let s: f64 = a.iter().map(|ai| x - ai).product();
                    basis
                        .eval_all(m, x)
                        .map(|v| v.into_iter().map(|p| p * s).collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()
        })
        .collect::<Result<_>>()?;
    let nu_vals: Vec<Vec<f64>> = pts
        .iter()
        .map(|&x| nu_basis.eval_all(n, x))
        .collect::<Result<_>>()?;

    let rows = g * g;
    let mut design = DMatrix::<f64>::zeros(rows, cols.len());
    let mut rhs = DVector::<f64>::zeros(rows);
    for i in 0..g {
        for j in 0..g {
            let r = i * g + j;
            let scale = (diag[i] * diag[j]).sqrt();
            rhs[r] = dot(&nu_vals[i], &nu_vals[j]) / scale;
            for (c, kern) in kernels.iter().enumerate() {
                design[(r, c)] = dot(&kern[i], &kern[j]) / scale;
            }
        }
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_FIT_CONDITION) {
        return Err(Error::IllConditionedFit(condition));
    }
    let coef = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::NumericalBreakdown(e.to_string()))?;
    let residual = (&design * &coef - &rhs).amax();
    Ok(KernelDecomposition {
        n,
        terms: cols
            .iter()
            .zip(coef.iter())
            .map(|((a, _), &c)| DecompositionTerm {
                subset: a.clone(),
                coefficient: c,
            })
            .collect(),
        residual,
        condition,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn subset_order() {
        let s = subsets(&[1.0, -1.0, 0.3]);
        assert_eq!(
            s,
            vec![
                vec![],
                vec![-1.0],
                vec![0.3],
                vec![1.0],
                vec![-1.0, 0.3],
                vec![-1.0, 1.0],
                vec![0.3, 1.0],
                vec![-1.0, 0.3, 1.0],
            ]
        );
    }

    #[test]
    fn degree_zero_with_one_mass() {
        let spec = MeasureSpec::legendre().with_mass(1.0, 1.0);
        let nu = OrthoBasis::build(&spec, 4, BuildOptions::default()).unwrap();
        let modified = modified_bases(&spec, 4, BuildOptions::default()).unwrap();
        let d = kernel_decomposition(&nu, &modified, 0).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert_relative_eq!(d.terms[0].coefficient, 2.0 / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn convex_combination_for_two_masses() {
        let spec = MeasureSpec::legendre()
            .with_mass(1.0, 0.5)
            .with_mass(0.3, 2.0);
        let nu = OrthoBasis::build(&spec, 12, BuildOptions::default()).unwrap();
        let modified = modified_bases(&spec, 12, BuildOptions::default()).unwrap();
        for n in 2..=12 {
            let d = kernel_decomposition(&nu, &modified, n).unwrap();
            assert!(d.residual < 1e-9, "n = {n}: residual {}", d.residual);
            assert!((d.sum() - 1.0).abs() < 1e-9, "n = {n}: sum {}", d.sum());
            assert!(d
                .terms
                .iter()
                .all(|t| t.coefficient > 0.0 && t.coefficient < 1.0));
        }
    }
}
