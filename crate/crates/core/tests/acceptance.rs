//! Acceptance suite. Every criterion prints one PASS/FAIL line followed by
//! indented details; the process exits non-zero if any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ortho_mass::grid::{Grid, GridFunction};
use ortho_mass::measure::{
    check_conditions, BaseWeight, GenJacobiSpec, MeasureSpec, PowerWeightSpec,
};
use ortho_mass::norms::{
    lorentz_norm, run_probe, standard_sets, weak_type_probe, LorentzIndex, OperatorKind,
    ProbeConfig, ProbeOptions, ProbeReport, TargetNorm, Verdict,
};
use ortho_mass::opoly::{kernel_decomposition, modified_bases, BuildOptions, OrthoBasis};
use ortho_mass::quadrature::tanh_sinh_jacobi_rule;
use ortho_mass::transforms::{
    commutator_psi_parts, envelope_ratio, pollard_measure, pollard_parts, q_at_zero_closed_form,
    LaguerreMassKernel, PollardEvaluator, Symbol,
};
use ortho_mass_oracle::{exact_gram_schmidt, rational_moments, RationalBase};

type Outcome = Result<Vec<String>, Vec<String>>;
type Criterion = (&'static str, fn() -> Outcome);

struct Report {
    details: Vec<String>,
    ok: bool,
}

impl Report {
    fn new() -> Self {
        Report {
            details: Vec::new(),
            ok: true,
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.ok &= ok;
        self.details
            .push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("     {line}"));
    }

    fn finish(self) -> Outcome {
        if self.ok {
            Ok(self.details)
        } else {
            Err(self.details)
        }
    }
}

fn seconds(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn random_polynomial(degree: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn horner(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * y + a)
}

fn orthonormality() -> Outcome {
    const N: usize = 50;
    let mut rep = Report::new();
    let start = Instant::now();
    let halves = [-0.5, 0.0, 0.5];
    let mut worst = 0.0f64;
    for &alpha in &halves {
        for &beta in &halves {
            let jac = GenJacobiSpec::jacobi(alpha, beta).with_singularity(0.0, 1.0);
            let spec = MeasureSpec::jacobi(jac.clone())
                .with_mass(-1.0, 0.5)
                .with_mass(0.3, 1.0)
                .with_mass(1.0, 2.0);
            let basis = OrthoBasis::build(&spec, N, BuildOptions::default())
                .map_err(|e| vec![format!("build failed: {e}")])?;
            // Gram matrix on a tanh-sinh rule, unrelated to the rules used to
            // build the recurrence.
            let rule = tanh_sinh_jacobi_rule(&jac, 9);
            let mut gram = vec![vec![0.0; N + 1]; N + 1];
            let mut accumulate = |x: f64, w: f64| {
                let v = basis.eval_all(N, x).unwrap();
                for i in 0..=N {
                    for j in 0..=i {
                        gram[i][j] += w * v[i] * v[j];
                    }
                }
            };
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                accumulate(x, w);
            }
            for m in &spec.masses {
                accumulate(m.location, m.mass);
            }
            let err = (0..=N)
                .flat_map(|i| (0..=i).map(move |j| (i, j)))
                .map(|(i, j)| (gram[i][j] - f64::from(u8::from(i == j))).abs())
                .fold(0.0, f64::max);
            rep.note(format!(
                "alpha={alpha} beta={beta}: max Gram residual {err:.2e}"
            ));
            worst = worst.max(err);
        }
    }
    let elapsed = seconds(start.elapsed());
    rep.check(
        worst < 1e-10,
        format!("max Gram residual {worst:.2e} < 1e-10"),
    );
    rep.check(elapsed < 10.0, format!("runtime {elapsed:.2}s < 10s"));
    rep.finish()
}

fn oracle_equivalence() -> Outcome {
    const CAP: usize = 12;
    let mut rep = Report::new();
    let start = Instant::now();
    let jac = |a: f64, b: f64| MeasureSpec::jacobi(GenJacobiSpec::jacobi(a, b));
    let configs = vec![
        jac(0.0, 0.0).with_mass(1.0, 1.0),
        jac(0.0, 0.0).with_mass(-1.0, 0.5).with_mass(0.5, 2.0),
        jac(1.0, 0.0).with_mass(0.0, 1.0),
        jac(2.0, 1.0).with_mass(0.25, 0.5).with_mass(-1.0, 3.0),
        jac(1.0, 1.0).with_mass(-0.5, 2.0).with_mass(0.5, 2.0),
        jac(0.0, 3.0)
            .with_mass(0.75, 0.125)
            .with_mass(-0.75, 0.125)
            .with_mass(1.0, 1.0),
        MeasureSpec::laguerre(0.0).with_mass(0.0, 1.0),
        MeasureSpec::laguerre(1.0)
            .with_mass(0.0, 0.5)
            .with_mass(2.0, 0.25),
    ];
    let mut worst = 0.0f64;
    for spec in &configs {
        let base = match &spec.base {
            BaseWeight::Jacobi(j) => RationalBase::jacobi(j.alpha, j.beta),
            BaseWeight::Laguerre { alpha } => RationalBase::laguerre(*alpha),
            BaseWeight::Hermite => unreachable!(),
        }
        .map_err(|e| vec![format!("oracle base: {e}")])?;
        let masses: Vec<(f64, f64)> = spec.masses.iter().map(|m| (m.location, m.mass)).collect();
        let exact = rational_moments(&base, &masses, CAP)
            .and_then(|m| exact_gram_schmidt(&m, CAP))
            .map_err(|e| vec![format!("oracle: {e}")])?;
        let coeffs = OrthoBasis::build(spec, CAP, BuildOptions::default())
            .and_then(|b| b.monomial_coefficients(CAP))
            .map_err(|e| vec![format!("basis: {e}")])?;
        let err = coeffs
            .iter()
            .zip(&exact)
            .map(|(got, want)| {
                let want = want.orthonormal();
                let scale = want.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                got.iter()
                    .zip(&want)
                    .fold(0.0f64, |m, (g, w)| m.max((g - w).abs()))
                    / scale
            })
            .fold(0.0, f64::max);
        worst = worst.max(err);
    }
    let elapsed = seconds(start.elapsed());
    rep.check(
        worst < 1e-12,
        format!(
            "{} configurations, max relative coefficient error {worst:.2e} < 1e-12",
            configs.len()
        ),
    );
    rep.check(elapsed < 5.0, format!("runtime {elapsed:.2}s < 5s"));
    rep.finish()
}

fn kernel_decomposition_identity() -> Outcome {
    const CAP: usize = 30;
    let mut rep = Report::new();
    let jac = |a: f64, b: f64| MeasureSpec::jacobi(GenJacobiSpec::jacobi(a, b));
    let configs = [
        MeasureSpec::legendre().with_mass(1.0, 1.0),
        jac(0.5, -0.5).with_mass(0.3, 0.5),
        MeasureSpec::legendre()
            .with_mass(1.0, 0.5)
            .with_mass(0.3, 2.0),
        jac(-0.5, 0.5).with_mass(-1.0, 1.0).with_mass(0.3, 1.0),
    ];
    for spec in &configs {
        let k = spec.masses.len();
        let nu = OrthoBasis::build(spec, CAP, BuildOptions::default())
            .map_err(|e| vec![format!("build: {e}")])?;
        let modified =
            modified_bases(spec, CAP, BuildOptions::default()).map_err(|e| vec![format!("{e}")])?;
        let (mut res, mut sum_err, mut range_ok) = (0.0f64, 0.0f64, true);
        let mut failure = None;
        // with fewer than k+1 kernel terms available the coefficients cannot
        // sum to one; the identity is checked from n = k on
        for n in k..=CAP {
            match kernel_decomposition(&nu, &modified, n) {
                Ok(d) => {
                    res = res.max(d.residual);
                    sum_err = sum_err.max((d.sum() - 1.0).abs());
                    range_ok &= d
                        .terms
                        .iter()
                        .all(|t| t.coefficient > 0.0 && t.coefficient < 1.0);
                }
                Err(e) => failure = failure.or(Some(format!("n = {n}: {e}"))),
            }
        }
        let locs = spec.mass_locations();
        rep.check(
            failure.is_none(),
            format!(
                "k={k} masses {locs:?}: fits succeed {}",
                failure.unwrap_or_default()
            ),
        );
        rep.check(
            res < 1e-8,
            format!("k={k} masses {locs:?}: residual {res:.2e} < 1e-8"),
        );
        rep.check(
            sum_err <= 1e-8,
            format!("k={k} masses {locs:?}: |sum C - 1| {sum_err:.2e} <= 1e-8"),
        );
        rep.check(
            range_ok,
            format!("k={k} masses {locs:?}: every C in (0, 1)"),
        );
    }
    rep.finish()
}

fn kernel_envelopes() -> Outcome {
    let mut rep = Report::new();
    let xs: Vec<f64> = (0..=4000)
        .map(|j| (std::f64::consts::PI * j as f64 / 4000.0).cos())
        .collect();
    let degrees: Vec<usize> = (1..=200).collect();
    for a in [1.0, 0.3] {
        let spec = MeasureSpec::legendre().with_mass(a, 1.0);
        let basis = OrthoBasis::build(&spec, 200, BuildOptions::default())
            .map_err(|e| vec![format!("build: {e}")])?;
        let ratio = envelope_ratio(&basis, a, &degrees, &xs).map_err(|e| vec![format!("{e}")])?;
        let (s100, s200) = (ratio.sup_up_to(100), ratio.sup_up_to(200));
        let change = (s200 / s100 - 1.0).abs();
        rep.check(
            s200.is_finite() && change <= 0.10,
            format!(
                "mass at {a}: sup ratio {s100:.4} (N=100), {s200:.4} (N=200), change {:.2}% <= 10%",
                100.0 * change
            ),
        );
    }
    rep.finish()
}

fn pollard_reconstruction() -> Outcome {
    const N_MAX: usize = 40;
    let mut rep = Report::new();
    let spec = MeasureSpec::legendre();
    let setup = || -> ortho_mass::Result<_> {
        let p = OrthoBasis::build(&spec, N_MAX + 2, BuildOptions::default())?;
        let q = OrthoBasis::build(&pollard_measure(&spec)?, N_MAX + 1, BuildOptions::default())?;
        let grid = Grid::for_measure(&spec, N_MAX + 60)?;
        let points: Vec<f64> = (0..9).map(|i| -0.85 + 0.2125 * i as f64).collect();
        let ev = PollardEvaluator::new(&p, &q, N_MAX, &points)?;
        Ok((p, grid, ev))
    };
    let (p, grid, ev) = setup().map_err(|e| vec![format!("setup: {e}")])?;
    let c = random_polynomial(10, 5);
    let f = |y: f64| horner(&c, y);
    let mut worst = 0.0f64;
    let mut last = None;
    for n in 0..=N_MAX {
        let parts =
            pollard_parts(&p, &grid, &ev, &f, n).map_err(|e| vec![format!("n = {n}: {e}")])?;
        worst = worst.max(parts.residual());
        last = Some((parts.r, parts.s));
    }
    let (r, s) = last.unwrap();
    rep.check(
        worst < 1e-8,
        format!("max reconstruction residual over n <= 40: {worst:.2e} < 1e-8"),
    );
    rep.check(
        (r + 0.5).abs() < 0.05,
        format!("r_40 = {r:.5}, |r_40 + 1/2| < 0.05"),
    );
    rep.check(
        (s - 0.5).abs() < 0.05,
        format!("s_40 = {s:.5}, |s_40 - 1/2| < 0.05"),
    );
    rep.finish()
}

struct ProbeSetup {
    spec: MeasureSpec,
    basis: OrthoBasis,
    grid: Arc<Grid>,
    degrees: Vec<usize>,
}

fn probe_setup(spec: MeasureSpec, n_max: usize) -> Result<ProbeSetup, Vec<String>> {
    let basis = OrthoBasis::build(&spec, n_max, BuildOptions::default())
        .map_err(|e| vec![format!("build: {e}")])?;
    let grid = Grid::for_measure(&spec, 4 * n_max).map_err(|e| vec![format!("grid: {e}")])?;
    let degrees = (10..=n_max).step_by(10).collect();
    Ok(ProbeSetup {
        spec,
        basis,
        grid,
        degrees,
    })
}

fn strong_probe(
    s: &ProbeSetup,
    operator: OperatorKind,
    p: f64,
) -> Result<(ProbeReport, f64), Vec<String>> {
    let cfg = ProbeConfig {
        operator,
        target: TargetNorm::Strong,
        p,
        u: PowerWeightSpec::unit(),
        v: PowerWeightSpec::unit(),
        degrees: s.degrees.clone(),
        options: ProbeOptions::default(),
    };
    let start = Instant::now();
    let report = run_probe(&s.basis, &s.grid, &cfg).map_err(|e| vec![format!("p = {p}: {e}")])?;
    Ok((report, seconds(start.elapsed())))
}

fn describe(report: &ProbeReport) -> String {
    let first = report.entries.first().map_or(f64::NAN, |e| e.estimate);
    let last = report.entries.last().map_or(f64::NAN, |e| e.estimate);
    let (gamma, res) = report
        .growth
        .as_ref()
        .map_or((f64::NAN, f64::NAN), |g| (g.gamma, g.residual));
    format!(
        "verdict {:?}, gamma {gamma:.4}, fit residual {res:.4}, estimate {first:.4} -> {last:.4}",
        report.verdict
    )
}

fn mean_convergence_window() -> Outcome {
    let mut rep = Report::new();
    let setup = probe_setup(MeasureSpec::legendre().with_mass(1.0, 1.0), 200)?;
    let unit = PowerWeightSpec::unit();
    for (p, expected) in [
        (1.5, Verdict::Bounded),
        (2.0, Verdict::Bounded),
        (3.0, Verdict::Bounded),
        (1.25, Verdict::Growing),
        (4.5, Verdict::Growing),
    ] {
        let conditions = check_conditions(&setup.spec, &unit, &unit, p)
            .map_err(|e| vec![format!("conditions: {e}")])?;
        let (report, elapsed) = strong_probe(&setup, OperatorKind::PartialSum, p)?;
        let agrees = match report.verdict {
            Verdict::Bounded => conditions.verdict,
            Verdict::Growing => !conditions.verdict,
            Verdict::Inconclusive => false,
        };
        rep.check(
            report.verdict == expected && agrees && elapsed < 120.0,
            format!(
                "p={p}: expected {expected:?}, {}; conditions hold: {}; {elapsed:.1}s",
                describe(&report),
                conditions.verdict
            ),
        );
    }
    rep.finish()
}

fn endpoint_behavior() -> Outcome {
    let mut rep = Report::new();
    let setup = probe_setup(MeasureSpec::legendre().with_mass(1.0, 1.0), 200)?;
    let (strong, _) = strong_probe(&setup, OperatorKind::PartialSum, 4.0)?;
    rep.check(
        strong.verdict == Verdict::Growing,
        format!("strong p=4: {}", describe(&strong)),
    );
    let sets = standard_sets(&setup.grid, &setup.spec, 20, 0);
    let weak = weak_type_probe(
        &setup.basis,
        &setup.grid,
        4.0,
        &PowerWeightSpec::unit(),
        &sets,
        &setup.degrees,
        &ProbeOptions::default(),
    )
    .map_err(|e| vec![format!("weak probe: {e}")])?;
    rep.check(
        weak.verdict == Verdict::Bounded,
        format!(
            "restricted weak p=4 over {} sets: {}",
            sets.len(),
            describe(&weak)
        ),
    );
    let at = |n: usize| {
        weak.entries
            .iter()
            .find(|e| e.n == n)
            .map_or(f64::NAN, |e| e.estimate)
    };
    let (m100, m200) = (at(100), at(200));
    let change = (m200 / m100 - 1.0).abs();
    rep.check(
        change <= 0.15,
        format!(
            "max ratio {m100:.4} (N=100), {m200:.4} (N=200), change {:.2}% <= 15%",
            100.0 * change
        ),
    );
    rep.finish()
}

fn commutator() -> Outcome {
    let mut rep = Report::new();
    let setup = probe_setup(MeasureSpec::legendre().with_mass(0.3, 1.0), 120)?;
    let (report, elapsed) = strong_probe(
        &setup,
        OperatorKind::Commutator {
            symbol: Symbol::LogOneMinus,
        },
        2.0,
    )?;
    rep.check(
        report.verdict == Verdict::Bounded,
        format!(
            "[M_b, S_n] with b = log(1-x), p=2: {}; {elapsed:.1}s",
            describe(&report)
        ),
    );
    for e in &report.entries {
        rep.note(format!("n={:>3} estimate {:.6}", e.n, e.estimate));
    }

    const N: usize = 20;
    let mu = MeasureSpec::legendre();
    let split = || -> ortho_mass::Result<_> {
        let p = OrthoBasis::build(&mu, N + 2, BuildOptions::default())?;
        let q = OrthoBasis::build(&pollard_measure(&mu)?, N + 1, BuildOptions::default())?;
        let grid = Grid::for_measure(&mu, N + 60)?;
        let points: Vec<f64> = (0..9).map(|i| -0.85 + 0.2125 * i as f64).collect();
        let ev = PollardEvaluator::new(&p, &q, N, &points)?;
        let c = random_polynomial(10, 8);
        commutator_psi_parts(&p, &grid, &ev, &Symbol::LogOneMinus, &|y| horner(&c, y), N)
    };
    let parts = split().map_err(|e| vec![format!("split: {e}")])?;
    let res = parts.residual();
    rep.check(
        res < 1e-7,
        format!("four-part split at n=20: residual {res:.2e} < 1e-7"),
    );
    rep.finish()
}

fn laguerre_mass_point() -> Outcome {
    let mut rep = Report::new();
    for alpha in [0.0, 1.0] {
        let k = LaguerreMassKernel::new(alpha, 1.0, 200).map_err(|e| vec![format!("{e}")])?;
        let rows = (0..=200)
            .map(|n| k.row(n))
            .collect::<ortho_mass::Result<Vec<_>>>()
            .map_err(|e| vec![format!("{e}")])?;
        let band: Vec<f64> = rows[20..].iter().map(|r| r.scaled_r).collect();
        let (lo, hi) = band
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        rep.check(
            hi / lo < 3.0,
            format!(
                "alpha={alpha}: r_n n^((alpha+1)/2) in [{lo:.4}, {hi:.4}], ratio {:.4} < 3",
                hi / lo
            ),
        );
        let monotone = rows
            .windows(2)
            .all(|w| w[1].kernel_at_zero >= w[0].kernel_at_zero);
        let growth = rows[200].kernel_at_zero / rows[100].kernel_at_zero;
        rep.check(
            monotone,
            format!("alpha={alpha}: L_n(0,0) nondecreasing for n <= 200"),
        );
        rep.check(
            growth < 1.05,
            format!("alpha={alpha}: L_200(0,0)/L_100(0,0) = {growth:.6} < 1.05"),
        );
        let err = rows[..=30]
            .iter()
            .map(|r| {
                let sign = if r.n % 2 == 0 { 1.0 } else { -1.0 };
                let want = sign * q_at_zero_closed_form(alpha, r.n);
                ((r.q_at_zero - want) / want).abs()
            })
            .fold(0.0, f64::max);
        rep.check(
            err < 1e-9,
            format!("alpha={alpha}: Q_n(0) against the Gamma formula, n <= 30: {err:.2e} < 1e-9"),
        );
    }
    rep.finish()
}

fn lorentz_machinery() -> Outcome {
    let mut rep = Report::new();
    let spec = MeasureSpec::legendre()
        .with_mass(1.0, 1.0)
        .with_mass(0.3, 0.5);
    let grid = Grid::for_measure(&spec, 60).map_err(|e| vec![format!("{e}")])?;
    let w = grid.weights();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut idx: Vec<usize> = (0..grid.len()).filter(|_| rng.random_bool(0.5)).collect();
        if idx.is_empty() {
            idx.push(rng.random_range(0..grid.len()));
        }
        let measure: f64 = idx.iter().map(|&i| w[i]).sum();
        let chi = GridFunction::indicator(&grid, &idx);
        for (p, r) in [(4.0, 1.0), (4.0, f64::INFINITY), (2.0, 2.0)] {
            let got = lorentz_norm(&chi, LorentzIndex::new(p, r).unwrap());
            let want = measure.powf(1.0 / p);
            worst = worst.max((got - want).abs() / want);
        }
    }
    rep.check(
        worst <= 1e-12,
        format!("indicators of 20 random sets: max relative error {worst:.2e} <= 1e-12"),
    );
    let mut violations = 0;
    for _ in 0..100 {
        let values: Vec<f64> = (0..grid.len())
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        let f = GridFunction::new(grid.clone(), values).unwrap();
        let p = rng.random_range(1.0..6.0);
        let r1 = rng.random_range(1.0..8.0);
        let r2 = r1 + rng.random_range(0.0..8.0);
        let norms: Vec<f64> = [r1, r2, f64::INFINITY]
            .iter()
            .map(|&r| lorentz_norm(&f, LorentzIndex::new(p, r).unwrap()))
            .collect();
        if norms.windows(2).any(|n| n[1] > n[0] * (1.0 + 1e-12)) {
            violations += 1;
        }
    }
    rep.check(violations == 0, format!("||f||_(p,r2) <= ||f||_(p,r1) <= ... <= weak on 100 random functions: {violations} violations"));
    rep.finish()
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("orthonormality with masses, N = 50", orthonormality),
        (
            "agreement with exact rational Gram-Schmidt",
            oracle_equivalence,
        ),
        (
            "kernel decomposition over subsets of masses",
            kernel_decomposition_identity,
        ),
        ("kernel envelopes at mass points", kernel_envelopes),
        (
            "Pollard reconstruction and limits of r_n, s_n",
            pollard_reconstruction,
        ),
        (
            "mean convergence window for Legendre + delta_1",
            mean_convergence_window,
        ),
        (
            "endpoint p = 4: strong vs restricted weak",
            endpoint_behavior,
        ),
        ("commutator with log(1-x)", commutator),
        ("Laguerre mass point at 0", laguerre_mass_point),
        ("Lorentz norms", lorentz_machinery),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, details) = match run() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {}: {name} ({:.1}s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            seconds(start.elapsed())
        );
        for d in details {
            println!("    {d}");
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
