//! Measure and weight specifications.
//!
//! A [`MeasureSpec`] describes `nu = mu + sum_i M_i delta_{a_i}` where `mu` is a
//! generalized Jacobi, Laguerre or Hermite weight. Power weights `u`, `v` on
//! `[-1, 1]` are described by [`PowerWeightSpec`]; [`check_conditions`]
//! evaluates the exponent inequalities that characterise uniform boundedness
//! of `u S_n(v^{-1} .)` on `L^p(nu)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interior algebraic singularity `|x - t|^gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    pub t: f64,
    pub gamma: f64,
}

/// `(1-x)^alpha (1+x)^beta prod_i |x - t_i|^{gamma_i}` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenJacobiSpec {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub singularities: Vec<Singularity>,
}

impl GenJacobiSpec {
    pub fn jacobi(alpha: f64, beta: f64) -> Self {
        GenJacobiSpec {
            alpha,
            beta,
            singularities: Vec::new(),
        }
    }

    pub fn legendre() -> Self {
        Self::jacobi(0.0, 0.0)
    }

    pub fn with_singularity(mut self, t: f64, gamma: f64) -> Self {
        self.singularities.push(Singularity { t, gamma });
        self
    }

    pub fn is_classical(&self) -> bool {
        self.singularities.is_empty()
    }

    /// Weight value at `x`; zero outside `[-1, 1]`.
    pub fn weight(&self, x: f64) -> f64 {
        if !(-1.0..=1.0).contains(&x) {
            return 0.0;
        }
        self.weight_with_offsets(x, 1.0 + x, 1.0 - x)
    }

    /// Weight value using separately supplied distances to `-1` and `+1`, so
    /// that points extremely close to an endpoint keep full relative accuracy.
    pub fn weight_with_offsets(&self, x: f64, from_minus_one: f64, to_plus_one: f64) -> f64 {
        let mut w = pow0(to_plus_one, self.alpha) * pow0(from_minus_one, self.beta);
        for s in &self.singularities {
            w *= pow0((x - s.t).abs(), s.gamma);
        }
        w
    }

    /// Breakpoints of the weight in increasing order with their exponents,
    /// including both endpoints.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.singularities.iter().map(|s| (s.t, s.gamma)).collect();
        pts.push((-1.0, self.beta));
        pts.push((1.0, self.alpha));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts
    }

    fn validate(&self) -> Result<()> {
        check_exponent("alpha", self.alpha)?;
        check_exponent("beta", self.beta)?;
        for (i, s) in self.singularities.iter().enumerate() {
            check_exponent(&format!("gamma[{i}]"), s.gamma)?;
            if !(s.t > -1.0 && s.t < 1.0) {
                return Err(Error::LocationOutsideSupport(s.t));
            }
        }
        check_distinct(self.singularities.iter().map(|s| s.t))
    }
}

/// `x^0` is taken to be 1 even at `x = 0`.
fn pow0(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        x.powf(e)
    }
}

fn check_exponent(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > -1.0 {
        Ok(())
    } else {
        Err(Error::ExponentOutOfRange {
            name: name.to_string(),
            value,
        })
    }
}

fn check_distinct(points: impl Iterator<Item = f64>) -> Result<()> {
    let mut pts: Vec<f64> = points.collect();
    pts.sort_by(f64::total_cmp);
    for pair in pts.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::DuplicateLocation(pair[0]));
        }
    }
    Ok(())
}

/// Absolutely continuous part of the measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseWeight {
    Jacobi(GenJacobiSpec),
    /// `x^alpha e^{-x}` on `[0, inf)`.
    Laguerre {
        alpha: f64,
    },
    /// `e^{-x^2}` on the real line.
    Hermite,
}

impl BaseWeight {
    pub fn support(&self) -> (f64, f64) {
        match self {
            BaseWeight::Jacobi(_) => (-1.0, 1.0),
            BaseWeight::Laguerre { .. } => (0.0, f64::INFINITY),
            BaseWeight::Hermite => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match self {
            BaseWeight::Jacobi(j) => j.weight(x),
            BaseWeight::Laguerre { alpha } => {
                if x < 0.0 {
                    0.0
                } else {
                    pow0(x, *alpha) * (-x).exp()
                }
            }
            BaseWeight::Hermite => (-x * x).exp(),
        }
    }

    pub fn as_jacobi(&self) -> Option<&GenJacobiSpec> {
        match self {
            BaseWeight::Jacobi(j) => Some(j),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassPoint {
    pub location: f64,
    pub mass: f64,
}

impl MassPoint {
    pub fn new(location: f64, mass: f64) -> Self {
        MassPoint { location, mass }
    }
}

/// `nu = mu + sum_i M_i delta_{a_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub base: BaseWeight,
    #[serde(default)]
    pub masses: Vec<MassPoint>,
}

impl MeasureSpec {
    pub fn new(base: BaseWeight) -> Self {
        MeasureSpec {
            base,
            masses: Vec::new(),
        }
    }

    pub fn legendre() -> Self {
        Self::new(BaseWeight::Jacobi(GenJacobiSpec::legendre()))
    }

    pub fn jacobi(spec: GenJacobiSpec) -> Self {
        Self::new(BaseWeight::Jacobi(spec))
    }

    pub fn laguerre(alpha: f64) -> Self {
        Self::new(BaseWeight::Laguerre { alpha })
    }

    pub fn hermite() -> Self {
        Self::new(BaseWeight::Hermite)
    }

    pub fn with_mass(mut self, location: f64, mass: f64) -> Self {
        self.masses.push(MassPoint { location, mass });
        self
    }

    /// The same base without point masses.
    pub fn base_only(&self) -> MeasureSpec {
        MeasureSpec::new(self.base.clone())
    }

    pub fn total_point_mass(&self) -> f64 {
        self.masses.iter().map(|m| m.mass).sum()
    }

    /// Mass locations sorted increasingly.
    pub fn mass_locations(&self) -> Vec<f64> {
        let mut locs: Vec<f64> = self.masses.iter().map(|m| m.location).collect();
        locs.sort_by(f64::total_cmp);
        locs
    }

    pub fn mass_at(&self, x: f64) -> Option<f64> {
        self.masses.iter().find(|m| m.location == x).map(|m| m.mass)
    }

    /// Checks every structural invariant and returns the spec unchanged.
    pub fn validate(self) -> Result<MeasureSpec> {
        self.check()?;
        Ok(self)
    }

    pub fn check(&self) -> Result<()> {
        match &self.base {
            BaseWeight::Jacobi(j) => j.validate()?,
            BaseWeight::Laguerre { alpha } => check_exponent("alpha", *alpha)?,
            BaseWeight::Hermite => {}
        }
        let (lo, hi) = self.base.support();
        for m in &self.masses {
            if !m.location.is_finite() || m.location < lo || m.location > hi {
                return Err(Error::LocationOutsideSupport(m.location));
            }
            if !(m.mass > 0.0) || !m.mass.is_finite() {
                return Err(Error::MassNotPositive {
                    location: m.location,
                    mass: m.mass,
                });
            }
        }
        check_distinct(self.masses.iter().map(|m| m.location))
    }
}

/// `(1-x)^a (1+x)^b prod_i |x - t_i|^{g_i}` away from the mass points, with
/// explicitly prescribed finite positive values at the mass points.
///
/// Used both for `u` (exponents a, b, g) and `v` (exponents A, B, G).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerWeightSpec {
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    /// Exponents aligned with the singularities of the base weight.
    #[serde(default)]
    pub g: Vec<f64>,
    /// Values at the mass points, aligned with `MeasureSpec::masses`; an empty
    /// list means the value 1 everywhere.
    #[serde(default, rename = "atMass")]
    pub at_mass: Vec<f64>,
}

impl PowerWeightSpec {
    pub fn unit() -> Self {
        PowerWeightSpec {
            a: 0.0,
            b: 0.0,
            g: Vec::new(),
            at_mass: Vec::new(),
        }
    }

    pub fn edges(a: f64, b: f64) -> Self {
        PowerWeightSpec {
            a,
            b,
            ..Self::unit()
        }
    }

    pub fn is_unit(&self) -> bool {
        self.a == 0.0
            && self.b == 0.0
            && self.g.iter().all(|&g| g == 0.0)
            && self.at_mass.iter().all(|&v| v == 1.0)
    }

    /// Interior exponent for singularity `i` (zero when not given).
    pub fn interior(&self, i: usize) -> f64 {
        self.g.get(i).copied().unwrap_or(0.0)
    }

    pub fn validate_for(&self, spec: &MeasureSpec) -> Result<()> {
        let n_sing = spec
            .base
            .as_jacobi()
            .map(|j| j.singularities.len())
            .unwrap_or(0);
        if self.g.len() > n_sing {
            return Err(Error::InvalidWeight(format!(
                "{} interior exponents for {} singularities",
                self.g.len(),
                n_sing
            )));
        }
        if !self.at_mass.is_empty() && self.at_mass.len() != spec.masses.len() {
            return Err(Error::InvalidWeight(format!(
                "{} mass-point values for {} mass points",
                self.at_mass.len(),
                spec.masses.len()
            )));
        }
        for &v in &self.at_mass {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidWeight(format!(
                    "value {v} at a mass point must be finite and positive"
                )));
            }
        }
        Ok(())
    }

    /// Weight value at `x` for the measure `spec`; may be `0` or `inf` at
    /// `+-1` or at a singularity.
    pub fn eval(&self, spec: &MeasureSpec, x: f64) -> f64 {
        if let Some(i) = spec.masses.iter().position(|m| m.location == x) {
            return self.at_mass.get(i).copied().unwrap_or(1.0);
        }
        let mut w = pow0(1.0 - x, self.a) * pow0(1.0 + x, self.b);
        if let Some(j) = spec.base.as_jacobi() {
            for (i, s) in j.singularities.iter().enumerate() {
                w *= pow0((x - s.t).abs(), self.interior(i));
            }
        }
        w
    }
}

/// Which family of inequalities a line belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionGroup {
    /// Upper bounds on the `v` exponents (strict).
    VUpper,
    /// Lower bounds on the `u` exponents (strict).
    ULower,
    /// `v` exponents not larger than `u` exponents (non-strict).
    Ordering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionLine {
    pub group: ConditionGroup,
    /// `"+1"`, `"-1"` or `"t=<location>"`.
    pub site: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Slack of the inequality: positive when satisfied with room to spare
    /// (zero is still satisfied for the non-strict ordering lines).
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub p: f64,
    pub lines: Vec<ConditionLine>,
    pub verdict: bool,
    /// Mass points sitting exactly on an interior singularity; the kernel
    /// envelope is not known there and such configurations are only flagged.
    pub masses_on_singularities: Vec<f64>,
}

impl ConditionReport {
    pub fn group(&self, group: ConditionGroup) -> impl Iterator<Item = &ConditionLine> {
        self.lines.iter().filter(move |l| l.group == group)
    }
}

/// Evaluates the exponent inequalities for `(u, v, p)` against a
/// generalized Jacobi base. The edge thresholds are `min(1/4, (e+1)/2)`, the
/// interior ones `min(1/2, (gamma+1)/2)`.
pub fn check_conditions(
    spec: &MeasureSpec,
    u: &PowerWeightSpec,
    v: &PowerWeightSpec,
    p: f64,
) -> Result<ConditionReport> {
    spec.check()?;
    u.validate_for(spec)?;
    v.validate_for(spec)?;
    let jac = spec.base.as_jacobi().ok_or_else(|| {
        Error::Unsupported("exponent conditions need a generalized Jacobi base".into())
    })?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!(
            "p = {p} must lie in (1, inf)"
        )));
    }
    let shift = 1.0 / p - 0.5;
    let mut lines = Vec::new();

    let mut sites: Vec<(String, f64, f64, f64, f64)> = vec![
        // (site, base exponent, u exponent, v exponent, cap)
        ("+1".into(), jac.alpha, u.a, v.a, 0.25),
        ("-1".into(), jac.beta, u.b, v.b, 0.25),
    ];
    for (i, s) in jac.singularities.iter().enumerate() {
        sites.push((
            format!("t={}", s.t),
            s.gamma,
            u.interior(i),
            v.interior(i),
            0.5,
        ));
    }

    for (site, e, _ue, ve, cap) in &sites {
        let bound = cap.min((e + 1.0) / 2.0);
        let lhs = ve + (e + 1.0) * shift;
        lines.push(ConditionLine {
            group: ConditionGroup::VUpper,
            site: site.clone(),
            lhs,
            rhs: bound,
            margin: bound - lhs,
            holds: lhs < bound,
        });
    }
    for (site, e, ue, _, cap) in &sites {
        let bound = -cap.min((e + 1.0) / 2.0);
        let lhs = ue + (e + 1.0) * shift;
        lines.push(ConditionLine {
            group: ConditionGroup::ULower,
            site: site.clone(),
            lhs,
            rhs: bound,
            margin: lhs - bound,
            holds: lhs > bound,
        });
    }
    for (site, _, ue, ve, _) in &sites {
        lines.push(ConditionLine {
            group: ConditionGroup::Ordering,
            site: site.clone(),
            lhs: *ve,
            rhs: *ue,
            margin: ue - ve,
            holds: ve <= ue,
        });
    }

    let masses_on_singularities = spec
        .masses
        .iter()
        .filter(|m| jac.singularities.iter().any(|s| s.t == m.location))
        .map(|m| m.location)
        .collect();
    let verdict = lines.iter().all(|l| l.holds);
    Ok(ConditionReport {
        p,
        lines,
        verdict,
        masses_on_singularities,
    })
}

/// Endpoints `(p0, p1)` of the mean convergence interval for a Jacobi weight,
/// using the larger of the two exponents.
pub fn mean_convergence_endpoints(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let m = alpha.max(beta);
    if m <= -0.5 {
        return Err(Error::NoEndpoint(m));
    }
    let p0 = 4.0 * (m + 1.0) / (2.0 * m + 3.0);
    let p1 = 4.0 * (m + 1.0) / (2.0 * m + 1.0);
    debug_assert!(p0 < 2.0 && 2.0 < p1);
    Ok((p0, p1))
}

/// Base measure multiplied by `prod_{a in A} (x - a)^2`, together with the
/// subset `A` so that `w^A(x) = prod |x - a|^{1 - 2/p}` can be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelModified {
    pub measure: MeasureSpec,
    pub subset: Vec<f64>,
}

impl ChristoffelModified {
    pub fn weight_a(&self, x: f64, p: f64) -> f64 {
        let e = 1.0 - 2.0 / p;
        self.subset.iter().map(|a| pow0((x - a).abs(), e)).product()
    }
}

/// Multiplies a base weight by `prod (x - r)^2` over the given roots.
pub fn christoffel_multiply(base: &BaseWeight, roots: &[f64]) -> Result<BaseWeight> {
    let mut out = base.clone();
    for &r in roots {
        out = match out {
            BaseWeight::Jacobi(mut j) => {
                if r == 1.0 {
                    j.alpha += 2.0;
                } else if r == -1.0 {
                    j.beta += 2.0;
                } else if let Some(s) = j.singularities.iter_mut().find(|s| s.t == r) {
                    s.gamma += 2.0;
                } else if r > -1.0 && r < 1.0 {
                    j.singularities.push(Singularity { t: r, gamma: 2.0 });
                } else {
                    return Err(Error::LocationOutsideSupport(r));
                }
                BaseWeight::Jacobi(j)
            }
            BaseWeight::Laguerre { alpha } if r == 0.0 => {
                BaseWeight::Laguerre { alpha: alpha + 2.0 }
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "Christoffel factor (x - {r})^2 on {:?} is not representable",
                    other
                )))
            }
        };
    }
    Ok(out)
}

/// `d mu^A = prod_{a in A} (x - a)^2 d mu` for a subset `A` of the mass
/// locations of `spec`. The result carries no point masses.
pub fn christoffel_modified(spec: &MeasureSpec, subset: &[f64]) -> Result<ChristoffelModified> {
    for &a in subset {
        if spec.mass_at(a).is_none() {
            return Err(Error::UnknownLocation(a));
        }
    }
    let base = christoffel_multiply(&spec.base, subset)?;
    let mut sorted = subset.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ChristoffelModified {
        measure: MeasureSpec::new(base),
        subset: sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        assert!(MeasureSpec::legendre()
            .with_mass(1.0, 1.0)
            .validate()
            .is_ok());
        let bad = MeasureSpec::jacobi(GenJacobiSpec::jacobi(-1.5, 0.0)).validate();
        assert!(matches!(bad, Err(Error::ExponentOutOfRange { .. })));
        let dup = MeasureSpec::legendre()
            .with_mass(0.5, 1.0)
            .with_mass(0.5, 2.0)
            .validate();
        assert_eq!(dup, Err(Error::DuplicateLocation(0.5)));
        let neg = MeasureSpec::legendre().with_mass(0.2, 0.0).validate();
        assert!(matches!(neg, Err(Error::MassNotPositive { .. })));
        let outside = MeasureSpec::legendre().with_mass(1.5, 1.0).validate();
        assert_eq!(outside, Err(Error::LocationOutsideSupport(1.5)));
        let dup_t = MeasureSpec::jacobi(
            GenJacobiSpec::legendre()
                .with_singularity(0.1, 1.0)
                .with_singularity(0.1, 2.0),
        )
        .validate();
        assert_eq!(dup_t, Err(Error::DuplicateLocation(0.1)));
    }

    #[test]
    fn mass_on_singularity_is_allowed() {
        let spec = MeasureSpec::jacobi(GenJacobiSpec::legendre().with_singularity(0.0, 1.0))
            .with_mass(0.0, 1.0)
            .validate()
            .unwrap();
        let r = check_conditions(
            &spec,
            &PowerWeightSpec::unit(),
            &PowerWeightSpec::unit(),
            2.0,
        )
        .unwrap();
        assert_eq!(r.masses_on_singularities, vec![0.0]);
    }

    fn legendre_report(p: f64) -> ConditionReport {
        let unit = PowerWeightSpec::unit();
        check_conditions(&MeasureSpec::legendre(), &unit, &unit, p).unwrap()
    }

    #[test]
    fn legendre_unit_weights() {
        let r = legendre_report(2.0);
        assert!(r.verdict);
        for l in r
            .group(ConditionGroup::VUpper)
            .chain(r.group(ConditionGroup::ULower))
        {
            assert_eq!(l.margin, 0.25);
        }
        for l in r.group(ConditionGroup::Ordering) {
            assert_eq!(l.margin, 0.0);
            assert!(l.holds);
        }

        // At the endpoint p = 4 the upper lines hold but the strict lower
        // bound becomes an equality.
        let r = legendre_report(4.0);
        assert_eq!(r.lines[0].lhs, -0.25);
        assert!(r.group(ConditionGroup::VUpper).all(|l| l.holds));
        assert!(!r.verdict);

        let r = legendre_report(4.5);
        assert!(!r.verdict);
        let first_lower = r.group(ConditionGroup::ULower).next().unwrap();
        assert!((first_lower.lhs - (1.0 / 4.5 - 0.5)).abs() < 1e-15);
        assert!(!first_lower.holds);
    }

    #[test]
    fn legendre_window_boundaries() {
        assert!(!legendre_report(4.0 / 3.0).verdict);
        assert!(legendre_report(1.34).verdict);
        assert!(legendre_report(3.99).verdict);
        assert!(!legendre_report(1.25).verdict);
        assert!(!legendre_report(4.01).verdict);
    }

    #[test]
    fn endpoints() {
        let (p0, p1) = mean_convergence_endpoints(0.0, 0.0).unwrap();
        assert!((p0 - 4.0 / 3.0).abs() < 1e-15 && (p1 - 4.0).abs() < 1e-15);
        let (p0, p1) = mean_convergence_endpoints(0.5, -0.5).unwrap();
        assert!((p0 - 1.5).abs() < 1e-15 && (p1 - 3.0).abs() < 1e-15);
        let (q0, q1) = mean_convergence_endpoints(-0.5, 0.5).unwrap();
        assert_eq!((p0, p1), (q0, q1));
        assert_eq!(
            mean_convergence_endpoints(-0.5, -0.5),
            Err(Error::NoEndpoint(-0.5))
        );
    }

    #[test]
    fn endpoints_monotone_in_exponent() {
        let mut prev = mean_convergence_endpoints(-0.49, -0.9).unwrap();
        for k in 1..200 {
            let m = -0.49 + 0.05 * k as f64;
            let cur = mean_convergence_endpoints(m, -0.9).unwrap();
            assert!(cur.0 > prev.0, "p0 increases towards 2 at m = {m}");
            assert!(cur.1 < prev.1);
            assert!(cur.0 < 2.0 && cur.1 > 2.0);
            prev = cur;
        }
    }

    #[test]
    fn christoffel_examples() {
        let spec = MeasureSpec::legendre().with_mass(1.0, 1.0);
        let m = christoffel_modified(&spec, &[1.0]).unwrap();
        assert_eq!(
            m.measure,
            MeasureSpec::jacobi(GenJacobiSpec::jacobi(2.0, 0.0))
        );

        let m = christoffel_modified(&spec, &[]).unwrap();
        assert_eq!(m.measure, MeasureSpec::legendre());
        assert_eq!(m.weight_a(0.3, 3.0), 1.0);

        let spec = MeasureSpec::legendre().with_mass(0.0, 1.0);
        let m = christoffel_modified(&spec, &[0.0]).unwrap();
        let j = m.measure.base.as_jacobi().unwrap();
        assert!((j.weight(0.5) - 0.25).abs() < 1e-15);
        assert_eq!(m.weight_a(0.5, 2.0), 1.0);

        assert_eq!(
            christoffel_modified(&spec, &[0.5]),
            Err(Error::UnknownLocation(0.5))
        );

        let lag = MeasureSpec::laguerre(0.5).with_mass(0.0, 1.0);
        let m = christoffel_modified(&lag, &[0.0]).unwrap();
        assert_eq!(m.measure.base, BaseWeight::Laguerre { alpha: 2.5 });
    }

    #[test]
    fn christoffel_bumps_existing_singularity() {
        let spec = MeasureSpec::jacobi(GenJacobiSpec::legendre().with_singularity(0.2, 0.5))
            .with_mass(0.2, 1.0);
        let m = christoffel_modified(&spec, &[0.2]).unwrap();
        let j = m.measure.base.as_jacobi().unwrap();
        assert_eq!(j.singularities, vec![Singularity { t: 0.2, gamma: 2.5 }]);
    }

    #[test]
    fn json_schema_keys() {
        let json = r#"{
            "base": {"kind": "jacobi", "alpha": 0.5, "beta": 0,
                     "singularities": [{"t": 0.0, "gamma": 1.0}]},
            "masses": [{"location": 1.0, "mass": 2.0}]
        }"#;
        let spec: MeasureSpec = serde_json::from_str(json).unwrap();
        assert_eq!(
            spec,
            MeasureSpec::jacobi(GenJacobiSpec::jacobi(0.5, 0.0).with_singularity(0.0, 1.0))
                .with_mass(1.0, 2.0)
        );
        let w: PowerWeightSpec =
            serde_json::from_str(r#"{"a": 0.1, "b": -0.1, "g": [0.2], "atMass": [3.0]}"#).unwrap();
        assert_eq!(w.at_mass, vec![3.0]);
        let back: MeasureSpec =
            serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn power_weight_values() {
        let spec = MeasureSpec::legendre().with_mass(1.0, 1.0);
        let u = PowerWeightSpec {
            a: -0.5,
            b: 0.0,
            g: vec![],
            at_mass: vec![2.0],
        };
        assert_eq!(u.eval(&spec, 1.0), 2.0);
        assert!((u.eval(&spec, 0.75) - 2.0).abs() < 1e-15);
        assert_eq!(u.eval(&MeasureSpec::legendre(), 1.0), f64::INFINITY);
    }

    fn gen_spec() -> impl Strategy<Value = (GenJacobiSpec, PowerWeightSpec, PowerWeightSpec, f64)> {
        (
            -0.9f64..2.0,
            -0.9f64..2.0,
            -0.9f64..2.0,
            prop::array::uniform3(-1.0f64..1.0),
            prop::array::uniform3(-1.0f64..1.0),
            1.1f64..8.0,
        )
            .prop_map(|(al, be, ga, u, v, p)| {
                let spec = GenJacobiSpec::jacobi(al, be).with_singularity(0.1, ga);
                let uw = PowerWeightSpec {
                    a: u[0],
                    b: u[1],
                    g: vec![u[2]],
                    at_mass: vec![],
                };
                let vw = PowerWeightSpec {
                    a: v[0],
                    b: v[1],
                    g: vec![v[2]],
                    at_mass: vec![],
                };
                (spec, uw, vw, p)
            })
    }

    proptest! {
        #[test]
        fn verdict_is_conjunction((spec, u, v, p) in gen_spec()) {
            let r = check_conditions(&MeasureSpec::jacobi(spec), &u, &v, p).unwrap();
            prop_assert_eq!(r.verdict, r.lines.iter().all(|l| l.holds));
            for l in &r.lines {
                match l.group {
                    ConditionGroup::Ordering => prop_assert_eq!(l.holds, l.margin >= 0.0),
                    _ => prop_assert_eq!(l.holds, l.margin > 0.0),
                }
            }
        }

        #[test]
        fn raising_u_exponents_relaxes((spec, u, v, p) in gen_spec(), which in 0usize..3, bump in 0.0f64..1.0) {
            let measure = MeasureSpec::jacobi(spec);
            let before = check_conditions(&measure, &u, &v, p).unwrap();
            let mut u2 = u.clone();
            match which { 0 => u2.a += bump, 1 => u2.b += bump, _ => u2.g[0] += bump }
            let after = check_conditions(&measure, &u2, &v, p).unwrap();
            for (l0, l1) in before.lines.iter().zip(&after.lines) {
                match l0.group {
                    ConditionGroup::VUpper => prop_assert_eq!(l0.margin, l1.margin),
                    _ => prop_assert!(l1.margin >= l0.margin),
                }
            }
        }

        #[test]
        fn lowering_v_exponents_relaxes_upper_bounds((spec, u, v, p) in gen_spec(), which in 0usize..3, bump in 0.0f64..1.0) {
            let measure = MeasureSpec::jacobi(spec);
            let before = check_conditions(&measure, &u, &v, p).unwrap();
            let mut v2 = v.clone();
            match which { 0 => v2.a -= bump, 1 => v2.b -= bump, _ => v2.g[0] -= bump }
            let after = check_conditions(&measure, &u, &v2, p).unwrap();
            for (l0, l1) in before.lines.iter().zip(&after.lines) {
                if l0.group == ConditionGroup::VUpper {
                    prop_assert!(l1.margin >= l0.margin);
                }
            }
        }

        #[test]
        fn christoffel_composes(a in -0.99f64..0.99, b in -0.99f64..0.99, x in -1.0f64..1.0, p in 1.1f64..6.0) {
            prop_assume!((a - b).abs() > 1e-3);
            let spec = MeasureSpec::legendre().with_mass(a, 1.0).with_mass(b, 1.0).with_mass(1.0, 0.5);
            let once = christoffel_modified(&spec, &[a, b, 1.0]).unwrap();
            let first = christoffel_multiply(&spec.base, &[a]).unwrap();
            let twice = christoffel_multiply(&first, &[b, 1.0]).unwrap();
            let w1 = once.measure.base.density(x);
            let w2 = twice.density(x);
            prop_assert!((w1 - w2).abs() <= 1e-12 * w1.abs().max(1e-300));
            let ma = christoffel_modified(&spec, &[a]).unwrap();
            let mb = christoffel_modified(&spec, &[b, 1.0]).unwrap();
            let wa = ma.weight_a(x, p) * mb.weight_a(x, p);
            let wab = once.weight_a(x, p);
            prop_assert!((wa - wab).abs() <= 1e-12 * wab.abs().max(1e-300));
        }
    }
}
