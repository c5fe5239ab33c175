//! One function per subcommand. Each returns the JSON result and the CSV
//! table; `main` wraps them with the schema version and the config.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use ortho_mass::grid::{Grid, GridFunction};
use ortho_mass::measure::{
    check_conditions, mean_convergence_endpoints, BaseWeight, ConditionReport, GenJacobiSpec,
};
use ortho_mass::norms::{
    run_probe, standard_sets, weak_type_probe, OperatorKind, ProbeConfig, ProbeReport, TargetNorm,
    Verdict,
};
use ortho_mass::opoly::{kernel_decomposition, modified_bases, BuildOptions, OrthoBasis};
use ortho_mass::transforms::{
    commutator, maximal_op, pollard_measure, pollard_parts, split_partial_sum, LaguerreMassKernel,
    PollardEvaluator,
};
use ortho_mass::Error;

use crate::config::{ExperimentConfig, ProbeMode, TestFunction};
use crate::error::CliError;

pub struct Output {
    pub result: Value,
    pub csv: String,
}

type CmdResult = Result<Output, CliError>;

fn table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("{header}\n");
    for row in rows {
        s += &row.join(",");
        s.push('\n');
    }
    s
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("results serialise")
}

fn basis(cfg: &ExperimentConfig, cap: usize) -> Result<OrthoBasis, CliError> {
    Ok(OrthoBasis::build(
        &cfg.measure,
        cap,
        BuildOptions::default(),
    )?)
}

fn jacobi(cfg: &ExperimentConfig) -> Result<&GenJacobiSpec, CliError> {
    cfg.measure
        .base
        .as_jacobi()
        .ok_or_else(|| Error::Unsupported("this command needs a weight on [-1, 1]".into()).into())
}

fn grid_function(cfg: &ExperimentConfig, grid: &Arc<Grid>) -> Result<GridFunction, CliError> {
    if let TestFunction::Atom { location } = cfg.function {
        let i = grid
            .atom_index(location)
            .ok_or(Error::UnknownLocation(location))?;
        return Ok(GridFunction::indicator(grid, &[i]));
    }
    Ok(GridFunction::from_fn(grid, |x| cfg.function.eval(x)))
}

fn partial_setup(cfg: &ExperimentConfig) -> Result<(OrthoBasis, GridFunction), CliError> {
    let b = basis(cfg, cfg.n)?;
    let grid = Grid::for_measure(&cfg.measure, cfg.grid_size())?;
    let f = grid_function(cfg, &grid)?;
    Ok((b, f))
}

pub fn recurrence(cfg: &ExperimentConfig) -> CmdResult {
    let rec = basis(cfg, cfg.n)?.recurrence().truncated(cfg.n);
    Ok(Output {
        csv: rec.to_csv(),
        result: to_value(&rec),
    })
}

pub fn basis_values(cfg: &ExperimentConfig) -> CmdResult {
    let b = basis(cfg, cfg.n)?;
    let values = cfg
        .points
        .iter()
        .map(|&x| b.eval_all(cfg.n, x))
        .collect::<Result<Vec<_>, _>>()?;
    let header = std::iter::once("x".to_string())
        .chain((0..=cfg.n).map(|k| format!("P_{k}")))
        .collect::<Vec<_>>()
        .join(",");
    let csv = table(
        &header,
        cfg.points.iter().zip(&values).map(|(x, v)| {
            std::iter::once(x.to_string())
                .chain(v.iter().map(f64::to_string))
                .collect()
        }),
    );
    let result = json!({
        "recurrence": b.recurrence().truncated(cfg.n + 1),
        "points": cfg.points,
        "values": values,
    });
    Ok(Output { result, csv })
}

pub fn kernel(cfg: &ExperimentConfig) -> CmdResult {
    let b = basis(cfg, cfg.n)?;
    let ys = cfg.y.clone().unwrap_or_default();
    let mut rows = Vec::new();
    for &x in &cfg.points {
        for &y in &ys {
            rows.push((x, y, b.cd_kernel(cfg.n, x, y)?));
        }
    }
    let decomposition = match (&cfg.measure.base, cfg.measure.masses.is_empty()) {
        (BaseWeight::Jacobi(_), false) => {
            let modified = modified_bases(&cfg.measure, cfg.n, BuildOptions::default())?;
            Some(kernel_decomposition(&b, &modified, cfg.n)?)
        }
        _ => None,
    };
    let csv = table(
        "x,y,kernel",
        rows.iter()
            .map(|(x, y, k)| vec![x.to_string(), y.to_string(), k.to_string()]),
    );
    let result = json!({
        "n": cfg.n,
        "rows": rows.iter().map(|(x, y, k)| json!({"x": x, "y": y, "kernel": k})).collect::<Vec<_>>(),
        "decomposition": decomposition,
    });
    Ok(Output { result, csv })
}

pub fn partial_sum(cfg: &ExperimentConfig) -> CmdResult {
    let (b, f) = partial_setup(cfg)?;
    let rows = cfg
        .points
        .iter()
        .map(|&x| {
            let s = split_partial_sum(&b, &f, cfg.n, x)?;
            let masses: f64 = s.mass_terms.iter().map(|t| t.1).sum();
            Ok((x, s.total(), s.continuous, masses))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let csv = table(
        "x,partial_sum,continuous,mass_terms",
        rows.iter().map(|r| {
            vec![
                r.0.to_string(),
                r.1.to_string(),
                r.2.to_string(),
                r.3.to_string(),
            ]
        }),
    );
    let result = rows
        .iter()
        .map(|r| json!({"x": r.0, "partial_sum": r.1, "continuous": r.2, "mass_terms": r.3}))
        .collect();
    Ok(Output {
        result: Value::Array(result),
        csv,
    })
}

fn pointwise(
    cfg: &ExperimentConfig,
    column: &str,
    eval: impl Fn(f64) -> Result<f64, Error>,
) -> CmdResult {
    let rows = cfg
        .points
        .iter()
        .map(|&x| eval(x).map(|v| (x, v)))
        .collect::<Result<Vec<_>, _>>()?;
    let csv = table(
        &format!("x,{column}"),
        rows.iter().map(|(x, v)| vec![x.to_string(), v.to_string()]),
    );
    let result = rows
        .iter()
        .map(|(x, v)| json!({"x": x, column: v}))
        .collect();
    Ok(Output {
        result: Value::Array(result),
        csv,
    })
}

pub fn maximal(cfg: &ExperimentConfig) -> CmdResult {
    let (b, f) = partial_setup(cfg)?;
    pointwise(cfg, "maximal", |x| maximal_op(&b, &f, cfg.n, x))
}

pub fn commutator_values(cfg: &ExperimentConfig) -> CmdResult {
    let (b, f) = partial_setup(cfg)?;
    if let Some(a) = cfg
        .measure
        .mass_locations()
        .into_iter()
        .find(|&a| !cfg.symbol.eval(a).is_finite())
    {
        return Err(
            Error::InvalidWeight(format!("symbol is not finite at the mass point {a}")).into(),
        );
    }
    pointwise(cfg, "commutator", |x| {
        commutator(&b, |y| cfg.symbol.eval(y), &f, cfg.n, x)
    })
}

pub fn pollard(cfg: &ExperimentConfig) -> CmdResult {
    jacobi(cfg)?;
    if let Some(&x) = cfg.points.iter().find(|x| x.abs() >= 1.0) {
        return Err(Error::PointOnBoundary(x).into());
    }
    let degrees = cfg.degrees();
    let n_max = degrees.iter().copied().max().unwrap_or(0);
    let p = basis(cfg, n_max + 2)?;
    let q = OrthoBasis::build(
        &pollard_measure(&cfg.measure)?,
        n_max + 1,
        BuildOptions::default(),
    )?;
    let grid = Grid::for_measure(&cfg.measure, cfg.grid_size().max(n_max + 60))?;
    let ev = PollardEvaluator::new(&p, &q, n_max, &cfg.points)?;
    let f = |y: f64| cfg.function.eval(y);
    let parts = degrees
        .iter()
        .map(|&n| pollard_parts(&p, &grid, &ev, &f, n))
        .collect::<Result<Vec<_>, _>>()?;
    let csv = table(
        "n,r,s,asymmetry,condition,fit_residual,reconstruction_residual",
        parts.iter().map(|pp| {
            [
                pp.n as f64,
                pp.r,
                pp.s,
                pp.fit.asymmetry,
                pp.fit.condition,
                pp.fit.residual,
                pp.residual(),
            ]
            .iter()
            .map(f64::to_string)
            .collect()
        }),
    );
    let result = parts
        .iter()
        .map(|pp| json!({"parts": pp, "reconstruction_residual": pp.residual()}))
        .collect();
    Ok(Output {
        result: Value::Array(result),
        csv,
    })
}

#[derive(Serialize)]
struct ProbeOutcome {
    p: f64,
    report: ProbeReport,
    conditions: Option<ConditionReport>,
    /// Whether the probe verdict matches the analytic conditions; only set
    /// for strong probes of `S_n` with a decisive verdict.
    agreement: Option<bool>,
}

pub fn probe(cfg: &ExperimentConfig, mode: ProbeMode) -> CmdResult {
    let degrees = cfg.degrees().to_vec();
    let n_max = degrees.iter().copied().max().unwrap_or(0);
    let b = basis(cfg, n_max)?;
    let grid = Grid::for_measure(&cfg.measure, cfg.grid_size())?;
    let opts = cfg.probe_options();
    let mut outcomes = Vec::new();
    for p in cfg.p.values() {
        let report = if mode == ProbeMode::RestrictedWeak {
            let sets = standard_sets(&grid, &cfg.measure, cfg.random_sets, cfg.seed);
            weak_type_probe(&b, &grid, p, &cfg.u, &sets, &degrees, &opts)?
        } else {
            let (operator, target) = match mode {
                ProbeMode::Strong => (OperatorKind::PartialSum, TargetNorm::Strong),
                ProbeMode::Weak => (OperatorKind::PartialSum, TargetNorm::Weak),
                ProbeMode::Maximal => (OperatorKind::Maximal, TargetNorm::Strong),
                ProbeMode::ContinuousPart => (OperatorKind::ContinuousPart, TargetNorm::Strong),
                ProbeMode::Commutator => (
                    OperatorKind::Commutator { symbol: cfg.symbol },
                    TargetNorm::Strong,
                ),
                ProbeMode::RestrictedWeak => unreachable!(),
            };
            let pc = ProbeConfig {
                operator,
                target,
                p,
                u: cfg.u.clone(),
                v: cfg.v.clone(),
                degrees: degrees.clone(),
                options: opts.clone(),
            };
            run_probe(&b, &grid, &pc)?
        };
        let conditions = match cfg.measure.base {
            BaseWeight::Jacobi(_) => Some(check_conditions(&cfg.measure, &cfg.u, &cfg.v, p)?),
            _ => None,
        };
        let agreement = match (&conditions, mode, report.verdict) {
            (Some(c), ProbeMode::Strong, Verdict::Bounded) => Some(c.verdict),
            (Some(c), ProbeMode::Strong, Verdict::Growing) => Some(!c.verdict),
            _ => None,
        };
        outcomes.push(ProbeOutcome {
            p,
            report,
            conditions,
            agreement,
        });
    }
    let mut csv = String::new();
    for o in &outcomes {
        let g = o.report.growth.as_ref();
        let _ = writeln!(
            csv,
            "# p={} verdict={:?} gamma={} fit_residual={} conditions={} agreement={}",
            o.p,
            o.report.verdict,
            g.map_or(f64::NAN, |g| g.gamma),
            g.map_or(f64::NAN, |g| g.residual),
            o.conditions
                .as_ref()
                .map_or("none".to_string(), |c| c.verdict.to_string()),
            o.agreement.map_or("none".to_string(), |a| a.to_string()),
        );
    }
    csv += &table(
        "p,n,estimate,maximizer,iterations",
        outcomes.iter().flat_map(|o| {
            o.report.entries.iter().map(move |e| {
                vec![
                    o.p.to_string(),
                    e.n.to_string(),
                    e.estimate.to_string(),
                    format!("\"{}\"", e.maximizer.replace('"', "'")),
                    e.iterations.to_string(),
                ]
            })
        }),
    );
    Ok(Output {
        result: to_value(&outcomes),
        csv,
    })
}

pub fn laguerre_mass(cfg: &ExperimentConfig) -> CmdResult {
    let BaseWeight::Laguerre { alpha } = cfg.measure.base else {
        return Err(Error::Unsupported("laguerre-mass needs a Laguerre base".into()).into());
    };
    let mass = match cfg.measure.masses.as_slice() {
        [m] if m.location == 0.0 => m.mass,
        _ => {
            return Err(
                Error::Unsupported("laguerre-mass needs exactly one mass, at 0".into()).into(),
            )
        }
    };
    let n_max = cfg.degrees().iter().copied().max().unwrap_or(0);
    let k = LaguerreMassKernel::new(alpha, mass, n_max)?;
    let rows = cfg
        .degrees()
        .iter()
        .map(|&n| k.row(n))
        .collect::<Result<Vec<_>, _>>()?;
    let csv = table(
        "n,kernel_at_zero,q_at_zero,r,scaled_r",
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.kernel_at_zero.to_string(),
                r.q_at_zero.to_string(),
                r.r.to_string(),
                r.scaled_r.to_string(),
            ]
        }),
    );
    Ok(Output {
        result: to_value(&rows),
        csv,
    })
}

pub fn endpoints(cfg: &ExperimentConfig) -> CmdResult {
    let j = jacobi(cfg)?;
    let (p0, p1) = mean_convergence_endpoints(j.alpha, j.beta)?;
    let csv = table(
        "alpha,beta,p0,p1",
        [[j.alpha, j.beta, p0, p1]
            .iter()
            .map(f64::to_string)
            .collect()],
    );
    Ok(Output {
        result: json!({"alpha": j.alpha, "beta": j.beta, "p0": p0, "p1": p1}),
        csv,
    })
}

pub fn conditions(cfg: &ExperimentConfig) -> CmdResult {
    let reports = cfg
        .p
        .values()
        .into_iter()
        .map(|p| check_conditions(&cfg.measure, &cfg.u, &cfg.v, p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::new();
    for r in &reports {
        let _ = writeln!(csv, "# p={} verdict={}", r.p, r.verdict);
    }
    csv += &table(
        "p,group,site,lhs,rhs,margin,holds",
        reports.iter().flat_map(|r| {
            r.lines.iter().map(move |l| {
                vec![
                    r.p.to_string(),
                    to_value(l.group).as_str().unwrap_or_default().to_string(),
                    l.site.clone(),
                    l.lhs.to_string(),
                    l.rhs.to_string(),
                    l.margin.to_string(),
                    l.holds.to_string(),
                ]
            })
        }),
    );
    Ok(Output {
        result: to_value(&reports),
        csv,
    })
}
