//! Experiment configuration: JSON file, command-line overrides, resolution
//! of defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use ortho_mass::measure::{BaseWeight, GenJacobiSpec, MassPoint, MeasureSpec, PowerWeightSpec};
use ortho_mass::norms::ProbeOptions;
use ortho_mass::transforms::Symbol;

use crate::error::CliError;

/// One exponent or a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Exponents {
    One(f64),
    Sweep(Vec<f64>),
}

impl Exponents {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Exponents::One(p) => vec![*p],
            Exponents::Sweep(ps) => ps.clone(),
        }
    }
}

/// Functions `f` fed to the partial-sum style commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// Coefficients in increasing degree.
    Polynomial { coefficients: Vec<f64> },
    /// `1` on `[lo, hi]`, atoms included.
    Indicator { lo: f64, hi: f64 },
    /// `1` at the atom at `location` only.
    Atom { location: f64 },
    /// `|x - t|^exponent`.
    Power { t: f64, exponent: f64 },
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
            TestFunction::Indicator { lo, hi } => f64::from(u8::from(*lo <= x && x <= *hi)),
            TestFunction::Atom { location } => f64::from(u8::from(x == *location)),
            TestFunction::Power { t, exponent } => (x - t).abs().powf(*exponent),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeMode {
    Strong,
    Weak,
    RestrictedWeak,
    Maximal,
    Commutator,
    ContinuousPart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "legendre")]
    pub measure: MeasureSpec,
    #[serde(default = "PowerWeightSpec::unit")]
    pub u: PowerWeightSpec,
    #[serde(default = "PowerWeightSpec::unit")]
    pub v: PowerWeightSpec,
    #[serde(default = "two")]
    pub p: Exponents,
    /// Degree cap.
    #[serde(default = "twenty")]
    pub n: usize,
    /// Degrees probed or tabulated; filled in by [`ExperimentConfig::resolve`].
    #[serde(default)]
    pub degrees: Option<Vec<usize>>,
    /// Gauss points of the discretisation grid.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "trials")]
    pub trials: usize,
    /// Evaluation points `x`.
    #[serde(default = "points")]
    pub points: Vec<f64>,
    /// Second kernel arguments; defaults to the mass locations.
    #[serde(default)]
    pub y: Option<Vec<f64>>,
    #[serde(default = "function")]
    pub function: TestFunction,
    #[serde(default = "symbol")]
    pub symbol: Symbol,
    #[serde(default = "mode")]
    pub mode: ProbeMode,
    /// Random unions in the restricted weak-type set family.
    #[serde(default = "random_sets")]
    pub random_sets: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn legendre() -> MeasureSpec {
    MeasureSpec::legendre()
}

fn two() -> Exponents {
    Exponents::One(2.0)
}

fn twenty() -> usize {
    20
}

fn trials() -> usize {
    ProbeOptions::default().trials
}

fn points() -> Vec<f64> {
    vec![-0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8]
}

fn function() -> TestFunction {
    TestFunction::Polynomial {
        coefficients: vec![1.0, 1.0, 0.5],
    }
}

fn symbol() -> Symbol {
    Symbol::LogOneMinus
}

fn mode() -> ProbeMode {
    ProbeMode::Strong
}

fn random_sets() -> usize {
    20
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every field has a default")
    }
}

/// Base weights selectable with `--base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BaseKind {
    Legendre,
    Chebyshev,
    Jacobi,
    Laguerre,
    Hermite,
}

/// Command-line values that replace fields of the configuration file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub base: Option<BaseKind>,
    /// Exponent at `+1` for `--base jacobi`, or of `x` for `--base laguerre`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Exponent at `-1` for `--base jacobi`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Point mass `location:mass`; repeatable, replaces the configured masses.
    #[arg(long = "mass", global = true, value_parser = parse_mass, allow_hyphen_values = true)]
    pub masses: Vec<MassPoint>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Exponent; repeat for a sweep.
    #[arg(long = "p", global = true)]
    pub p: Vec<f64>,
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub mode: Option<ProbeMode>,
}

fn parse_mass(s: &str) -> Result<MassPoint, String> {
    let (loc, mass) = s
        .split_once(':')
        .ok_or_else(|| format!("expected location:mass, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok(MassPoint::new(parse(loc)?, parse(mass)?))
}

impl ExperimentConfig {
    pub fn load(overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match &overrides.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => ExperimentConfig::default(),
        };
        cfg.apply(overrides);
        Ok(cfg)
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(base) = o.base {
            let alpha = o.alpha.unwrap_or(0.0);
            let beta = o.beta.unwrap_or(0.0);
            self.measure.base = match base {
                BaseKind::Legendre => BaseWeight::Jacobi(GenJacobiSpec::legendre()),
                BaseKind::Chebyshev => BaseWeight::Jacobi(GenJacobiSpec::jacobi(-0.5, -0.5)),
                BaseKind::Jacobi => BaseWeight::Jacobi(GenJacobiSpec::jacobi(alpha, beta)),
                BaseKind::Laguerre => BaseWeight::Laguerre { alpha },
                BaseKind::Hermite => BaseWeight::Hermite,
            };
        }
        if !o.masses.is_empty() {
            self.measure.masses = o.masses.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(n) = o.n {
            self.n = n;
            self.degrees = None;
        }
        match o.p.as_slice() {
            [] => {}
            [p] => self.p = Exponents::One(*p),
            ps => self.p = Exponents::Sweep(ps.to_vec()),
        }
        if o.grid.is_some() {
            self.grid = o.grid;
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
    }

    /// Fills in the derived fields, `default_degrees` when no degrees are
    /// configured.
    pub fn resolve(mut self, default_degrees: impl FnOnce(usize) -> Vec<usize>) -> Self {
        if self.degrees.is_none() {
            self.degrees = Some(default_degrees(self.n));
        }
        if self.grid.is_none() {
            self.grid = Some(4 * self.n.max(10));
        }
        if self.y.is_none() {
            let locs = self.measure.mass_locations();
            self.y = Some(if locs.is_empty() { vec![0.0] } else { locs });
        }
        self
    }

    pub fn degrees(&self) -> &[usize] {
        self.degrees.as_deref().unwrap_or_default()
    }

    pub fn grid_size(&self) -> usize {
        self.grid.unwrap_or(4 * self.n.max(10))
    }

    pub fn probe_options(&self) -> ProbeOptions {
        ProbeOptions {
            trials: self.trials,
            seed: self.seed,
            ..ProbeOptions::default()
        }
    }
}

/// Every degree up to `n`.
pub fn all_degrees(n: usize) -> Vec<usize> {
    (0..=n).collect()
}

/// About twenty evenly spaced degrees ending at `n`.
pub fn probe_degrees(n: usize) -> Vec<usize> {
    let step = (n / 20).max(1);
    (1..=n / step).map(|k| k * step).collect()
}
