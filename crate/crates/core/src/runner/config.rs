use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Truncation, C64, DEFAULT_TAIL};
use crate::model::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Single,
    Local,
    Common,
    Effective,
    Rates,
    Sweep,
    Calibrate,
    Validate,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Single => "single",
            Scenario::Local => "local",
            Scenario::Common => "common",
            Scenario::Effective => "effective",
            Scenario::Rates => "rates",
            Scenario::Sweep => "sweep",
            Scenario::Calibrate => "calibrate",
            Scenario::Validate => "validate",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum OutputFormat {
    #[default]
    #[serde(rename = "csv")]
    #[value(name = "csv")]
    Csv,
    #[serde(rename = "csv+svg")]
    #[value(name = "csv+svg")]
    CsvSvg,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationChoice {
    #[default]
    PerMode,
    TotalNumber,
}

impl From<TruncationChoice> for Truncation {
    fn from(t: TruncationChoice) -> Self {
        match t {
            TruncationChoice::PerMode => Truncation::PerMode,
            TruncationChoice::TotalNumber => Truncation::TotalNumber,
        }
    }
}

/// Basis of the full two-cavity model used by sweeps and validation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    #[default]
    Local,
    Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepSymbol {
    KappaM,
    Phi,
    OmegaRatio,
}

/// Solver routes a sweep can request; the order is the row order within a grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepSolver {
    ClosedForm,
    Rates,
    Full,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationChoice {
    #[default]
    Coherent,
    Liouvillian,
}

/// Initial state for time evolution: `"vacuum"` or `"fock:n1,n2"`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitialState {
    #[default]
    Vacuum,
    Fock([usize; 2]),
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialState::Vacuum => f.write_str("vacuum"),
            InitialState::Fock([a, b]) => write!(f, "fock:{a},{b}"),
        }
    }
}

impl std::str::FromStr for InitialState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "vacuum" {
            return Ok(InitialState::Vacuum);
        }
        let bad = || format!("expected \"vacuum\" or \"fock:n1,n2\", got {s:?}");
        let body = s.strip_prefix("fock:").ok_or_else(bad)?;
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        let n: Vec<usize> = parts
            .iter()
            .map(|p| p.parse().map_err(|_| bad()))
            .collect::<std::result::Result<_, _>>()?;
        match n.as_slice() {
            [a] => Ok(InitialState::Fock([*a, 0])),
            [a, b] => Ok(InitialState::Fock([*a, *b])),
            _ => Err(bad()),
        }
    }
}

impl Serialize for InitialState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InitialState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A real number written either literally or as a multiple of π
/// (`"pi"`, `"0.9pi"`, `"pi/2"`, `"3pi/4"`, `"-pi"`).
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Num(f64),
    Expr(String),
}

impl Scalar {
    fn value(&self) -> std::result::Result<f64, String> {
        match self {
            Scalar::Num(x) => Ok(*x),
            Scalar::Expr(s) => parse_scalar(s),
        }
    }
}

fn parse_scalar(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let bad = || format!("cannot read {s:?} as a number");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t, 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some(coeff) => {
            let coeff = coeff.trim();
            let c = match coeff {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c
                    .strip_suffix('*')
                    .unwrap_or(c)
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let v = value / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

/// Grid given as `"start:stop:step"` (inclusive of `stop` when it lands on the grid)
/// or as an explicit list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum GridInput {
    Range(String),
    List(Vec<Scalar>),
}

/// Expands `"a:b:step"` into `a, a+step, …, ≤ b`.
pub fn parse_range(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(format!("grid {spec:?} is not of the form start:stop:step"));
    };
    let (a, b, step) = (parse_scalar(a)?, parse_scalar(b)?, parse_scalar(step)?);
    if !(step > 0.0) {
        return Err(format!("grid step must be positive, got {step}"));
    }
    if b < a {
        return Err(format!("grid stop {b} is below start {a}"));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize + 1;
    if n > 1_000_000 {
        return Err(format!("grid {spec:?} has {n} points"));
    }
    Ok((0..n).map(|i| a + i as f64 * step).collect())
}

impl GridInput {
    fn values(&self) -> std::result::Result<Vec<f64>, String> {
        let v = match self {
            GridInput::Range(s) => parse_range(s)?,
            GridInput::List(l) => l
                .iter()
                .map(Scalar::value)
                .collect::<std::result::Result<_, _>>()?,
        };
        if v.is_empty() {
            return Err("grid is empty".into());
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(format!("grid value {x} is not finite"));
        }
        Ok(v)
    }
}

/// Complex input: `1.5`, `[re, im]`, `{ re = .., im = .. }` or `{ abs = .., arg = .. }`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
    Cartesian(Cartesian),
    Polar(Polar),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Cartesian {
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Polar {
    abs: f64,
    arg: Scalar,
}

impl ComplexInput {
    fn value(&self) -> std::result::Result<C64, String> {
        Ok(match self {
            ComplexInput::Real(x) => C64::new(*x, 0.0),
            ComplexInput::Pair([re, im]) => C64::new(*re, *im),
            ComplexInput::Cartesian(c) => C64::new(c.re, c.im),
            ComplexInput::Polar(p) => C64::from_polar(p.abs, p.arg.value()?),
        })
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scenario: Option<Scenario>,
    #[serde(default)]
    system: SystemInput,
    #[serde(default)]
    numerics: NumericsInput,
    sweep: Option<SweepInput>,
    calibrate: Option<CalibrateInput>,
    #[serde(default)]
    output: OutputInput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemInput {
    kappa: Option<f64>,
    kappa1: Option<f64>,
    kappa2: Option<f64>,
    kappa_m: Option<f64>,
    omega: Option<ComplexInput>,
    omega1: Option<ComplexInput>,
    omega2: Option<ComplexInput>,
    xi1: Option<ComplexInput>,
    xi2: Option<ComplexInput>,
    phi: Option<Scalar>,
    omega_cav: Option<f64>,
    fiber_length: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NumericsInput {
    cutoff: Option<usize>,
    truncation: Option<TruncationChoice>,
    tail: Option<f64>,
    basis: Option<Basis>,
    t_final: Option<f64>,
    n_samples: Option<usize>,
    dt_max: Option<f64>,
    rtol: Option<f64>,
    atol: Option<f64>,
    dt: Option<f64>,
    n_traj: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    initial: Option<InitialState>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepInput {
    symbol: SweepSymbol,
    grid: GridInput,
    phi: Option<Vec<Scalar>>,
    solvers: Option<Vec<SweepSolver>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrateInput {
    magnitude: Option<GridInput>,
    phase: Option<GridInput>,
    method: Option<CalibrationChoice>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputInput {
    dir: Option<PathBuf>,
    format: Option<OutputFormat>,
}

/// Resolved numerical settings. Every field has a value (or an explicit `None`
/// meaning "derive it from the model").
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Numerics {
    /// Fixed cutoff; `None` applies the Poisson-tail recommendation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    pub truncation: TruncationChoice,
    /// Poisson tail bound used by the cutoff recommendation.
    pub tail: f64,
    pub basis: Basis,
    pub t_final: f64,
    pub n_samples: usize,
    /// Integrator step bound; `None` uses `0.05 / total rate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    pub rtol: f64,
    pub atol: f64,
    /// Trajectory step; `None` uses half the largest admissible step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Number of quantum-jump trajectories; 0 skips the unraveling.
    pub n_traj: usize,
    pub seed: u64,
    /// Thread count. Left out of the echoed config because it cannot change results.
    #[serde(skip)]
    pub workers: Option<usize>,
    pub initial: InitialState,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub symbol: SweepSymbol,
    pub grid: Vec<f64>,
    /// Φ values swept alongside the main grid (ignored when `symbol = "phi"`).
    pub phi: Vec<f64>,
    pub solvers: Vec<SweepSolver>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrateConfig {
    /// `|Ω₁/Ω₂|` values.
    pub magnitude: Vec<f64>,
    /// `arg(Ω₁/Ω₂)` values.
    pub phase: Vec<f64>,
    pub method: CalibrationChoice,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputConfig {
    /// Not echoed: output location does not affect content.
    #[serde(skip)]
    pub dir: PathBuf,
    pub format: OutputFormat,
}

/// A fully resolved run configuration. Serializing it gives the config echoed
/// into every CSV header.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub system: SystemSection,
    pub numerics: Numerics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibrate: Option<CalibrateConfig>,
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemSection {
    #[serde(flatten)]
    pub params: SystemParams,
    /// Fiber length in meters, for the regime check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fiber_length: Option<f64>,
}

/// Command-line settings that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub workers: Option<usize>,
}

/// Φ values used for a κ_m sweep when the config lists none.
pub const DEFAULT_PHI_GRID: [f64; 3] = [PI / 2.0, 0.75 * PI, 0.9 * PI];

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn field<T>(name: &str, r: std::result::Result<T, String>) -> Result<T> {
    r.map_err(|e| config_err(format!("{name}: {e}")))
}

fn exclusive<T: Clone>(
    short: &str,
    short_v: &Option<T>,
    long: &str,
    long_v: &Option<T>,
) -> Result<Option<T>> {
    match (short_v, long_v) {
        (Some(_), Some(_)) => Err(config_err(format!(
            "system.{short} conflicts with system.{long}; give one of them"
        ))),
        (Some(v), None) | (None, Some(v)) => Ok(Some(v.clone())),
        (None, None) => Ok(None),
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Reads and validates a config file. `scenario` (from the command line) wins over
/// the file's `scenario` key only if they agree; one of them must be present.
pub fn parse_config(path: &Path, scenario: Option<Scenario>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, scenario).map_err(|e| match e {
        Error::Config(m) => config_err(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_config_str(text: &str, scenario: Option<Scenario>) -> Result<RunConfig> {
    let file: FileConfig =
        toml::from_str(text).map_err(|e| config_err(e.to_string().trim_end().to_string()))?;
    let scenario = match (scenario, file.scenario) {
        (Some(a), Some(b)) if a != b => {
            return Err(config_err(format!(
                "scenario {a} requested but the file says scenario = \"{b}\""
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(config_err("no scenario given")),
    };
    let params = resolve_system(&file.system)?;
    if let Some(len) = file.system.fiber_length {
        positive("system.fiber_length", len)?;
    }
    let numerics = resolve_numerics(&file.numerics)?;
    let sweep = match (&file.sweep, scenario) {
        (Some(s), _) => Some(resolve_sweep(s, &params)?),
        (None, Scenario::Sweep) => {
            return Err(config_err("scenario sweep needs a [sweep] section"))
        }
        (None, _) => None,
    };
    let calibrate = match (&file.calibrate, scenario) {
        (Some(c), _) => Some(resolve_calibrate(c)?),
        (None, Scenario::Calibrate) => Some(resolve_calibrate(&CalibrateInput::default())?),
        (None, _) => None,
    };
    Ok(RunConfig {
        scenario,
        system: SystemSection {
            params,
            fiber_length: file.system.fiber_length,
        },
        numerics,
        sweep,
        calibrate,
        output: OutputConfig {
            dir: file
                .output
                .dir
                .clone()
                .unwrap_or_else(|| PathBuf::from("out")),
            format: file.output.format.unwrap_or_default(),
        },
    })
}

fn complex(name: &str, v: &Option<ComplexInput>) -> Result<Option<C64>> {
    v.as_ref().map(|c| field(name, c.value())).transpose()
}

/// Defaults: `κ₁ = κ₂ = 1`, `κ_m = 8`, `Ω₁ = Ω₂ = 1`, `ξ₁ = 1`, `ξ₂ = e^{iΦ}ξ₁` with `Φ = π/2`.
fn resolve_system(s: &SystemInput) -> Result<SystemParams> {
    let kappa1 = exclusive("kappa", &s.kappa, "kappa1", &s.kappa1)?;
    let kappa2 = exclusive("kappa", &s.kappa, "kappa2", &s.kappa2)?;
    let omega1 = complex("system.omega1", &s.omega1)?;
    let omega2 = complex("system.omega2", &s.omega2)?;
    let omega = complex("system.omega", &s.omega)?;
    let omega1 = exclusive("omega", &omega, "omega1", &omega1)?;
    let omega2 = exclusive("omega", &omega, "omega2", &omega2)?;
    let xi1 = complex("system.xi1", &s.xi1)?.unwrap_or(C64::new(1.0, 0.0));
    let xi2 = complex("system.xi2", &s.xi2)?;
    let phi = s
        .phi
        .as_ref()
        .map(|p| field("system.phi", p.value()))
        .transpose()?;
    let xi2 = match (xi2, phi) {
        (Some(_), Some(_)) => {
            return Err(config_err(
                "system.phi conflicts with system.xi2; give one of them",
            ))
        }
        (Some(x), None) => x,
        (None, phi) => C64::from_polar(xi1.norm(), xi1.arg() + phi.unwrap_or(PI / 2.0)),
    };
    let params = SystemParams {
        kappa1: kappa1.unwrap_or(1.0),
        kappa2: kappa2.unwrap_or(1.0),
        kappa_m: s.kappa_m.unwrap_or(8.0),
        omega1: omega1.unwrap_or(C64::new(1.0, 0.0)),
        omega2: omega2.unwrap_or(C64::new(1.0, 0.0)),
        xi1,
        xi2,
        omega_cav: s.omega_cav,
    };
    params.validate().map_err(|e| match e {
        Error::Argument(m) => config_err(format!("system.{m}")),
        other => other,
    })?;
    Ok(params)
}

fn resolve_numerics(n: &NumericsInput) -> Result<Numerics> {
    let tail = n.tail.unwrap_or(DEFAULT_TAIL);
    if !(tail > 0.0 && tail < 1.0) {
        return Err(config_err(format!(
            "numerics.tail must lie in (0, 1), got {tail}"
        )));
    }
    let t_final = positive("numerics.t_final", n.t_final.unwrap_or(10.0))?;
    let n_samples = n.n_samples.unwrap_or(101);
    if n_samples < 2 {
        return Err(config_err(format!(
            "numerics.n_samples must be at least 2, got {n_samples}"
        )));
    }
    if let Some(c) = n.cutoff {
        if c == 0 {
            return Err(config_err("numerics.cutoff must be at least 1"));
        }
    }
    if let Some(w) = n.workers {
        if w == 0 {
            return Err(config_err("numerics.workers must be at least 1"));
        }
    }
    Ok(Numerics {
        cutoff: n.cutoff,
        truncation: n.truncation.unwrap_or_default(),
        tail,
        basis: n.basis.unwrap_or_default(),
        t_final,
        n_samples,
        dt_max: n
            .dt_max
            .map(|v| positive("numerics.dt_max", v))
            .transpose()?,
        rtol: positive("numerics.rtol", n.rtol.unwrap_or(1e-9))?,
        atol: positive("numerics.atol", n.atol.unwrap_or(1e-11))?,
        dt: n.dt.map(|v| positive("numerics.dt", v)).transpose()?,
        n_traj: n.n_traj.unwrap_or(0),
        seed: n.seed.unwrap_or(0),
        workers: n.workers,
        initial: n.initial.unwrap_or_default(),
    })
}

/// Equal losses, equal drives and `|ξ₁| = |ξ₂|`: the setting of the closed-form populations.
pub fn is_symmetric(p: &SystemParams) -> bool {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    close(p.kappa1, p.kappa2)
        && (p.omega1 - p.omega2).norm() <= 1e-12 * p.omega1.norm().max(1.0)
        && close(p.xi1.norm(), p.xi2.norm())
}

fn resolve_sweep(s: &SweepInput, system: &SystemParams) -> Result<SweepConfig> {
    let grid = field("sweep.grid", s.grid.values())?;
    if s.symbol == SweepSymbol::KappaM {
        if let Some(x) = grid.iter().find(|x| **x < 0.0) {
            return Err(config_err(format!(
                "sweep.grid: kappa_m must be non-negative, got {x}"
            )));
        }
    }
    let phi = match (&s.phi, s.symbol) {
        (Some(_), SweepSymbol::Phi) => {
            return Err(config_err(
                "sweep.phi cannot be given when sweeping phi itself",
            ))
        }
        (Some(list), _) => {
            let v: Vec<f64> = list
                .iter()
                .map(|x| field("sweep.phi", x.value()))
                .collect::<Result<_>>()?;
            if v.is_empty() {
                return Err(config_err("sweep.phi is empty"));
            }
            v
        }
        (None, SweepSymbol::KappaM) => DEFAULT_PHI_GRID.to_vec(),
        (None, _) => vec![(system.xi2 / system.xi1).arg()],
    };
    let mut solvers = s.solvers.clone().unwrap_or_else(|| {
        if is_symmetric(system) && s.symbol != SweepSymbol::OmegaRatio {
            vec![SweepSolver::ClosedForm, SweepSolver::Rates]
        } else {
            vec![SweepSolver::Rates]
        }
    });
    solvers.sort();
    solvers.dedup();
    if solvers.is_empty() {
        return Err(config_err("sweep.solvers is empty"));
    }
    if solvers.contains(&SweepSolver::ClosedForm) {
        if !is_symmetric(system) {
            return Err(config_err(
                "sweep.solvers: closed_form needs kappa1 = kappa2, omega1 = omega2 and |xi1| = |xi2|",
            ));
        }
        if s.symbol == SweepSymbol::OmegaRatio {
            return Err(config_err(
                "sweep.solvers: closed_form needs omega1 = omega2 and cannot sweep omega_ratio",
            ));
        }
    }
    Ok(SweepConfig {
        symbol: s.symbol,
        grid,
        phi,
        solvers,
    })
}

fn resolve_calibrate(c: &CalibrateInput) -> Result<CalibrateConfig> {
    let magnitude = match &c.magnitude {
        Some(g) => field("calibrate.magnitude", g.values())?,
        None => parse_range("0.25:2:0.25").expect("valid default"),
    };
    if let Some(x) = magnitude.iter().find(|x| **x < 0.0) {
        return Err(config_err(format!(
            "calibrate.magnitude must be non-negative, got {x}"
        )));
    }
    let phase = match &c.phase {
        Some(g) => field("calibrate.phase", g.values())?,
        None => parse_range("-pi:pi:pi/12").expect("valid default"),
    };
    Ok(CalibrateConfig {
        magnitude,
        phase,
        method: c.method.unwrap_or_default(),
    })
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if let Some(seed) = o.seed {
            self.numerics.seed = seed;
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }
        if o.workers.is_some() {
            self.numerics.workers = o.workers;
        }
    }

    /// The resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs serialize")
    }

    pub fn truncation(&self) -> Truncation {
        self.numerics.truncation.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = parse_range("0:20:0.5").unwrap();
        assert_eq!(g.len(), 41);
        assert_eq!(g[40], 20.0);
        assert_eq!(parse_range("0:1:0.3").unwrap().len(), 4);
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
    }

    #[test]
    fn pi_expressions() {
        for (s, v) in [
            ("pi", PI),
            ("0.9pi", 0.9 * PI),
            ("pi/2", PI / 2.0),
            ("3pi/4", 0.75 * PI),
            ("-pi", -PI),
            ("2.5", 2.5),
        ] {
            assert!((parse_scalar(s).unwrap() - v).abs() < 1e-15, "{s}");
        }
        assert!(parse_scalar("tau").is_err());
    }

    #[test]
    fn minimal_single_config() {
        let c = parse_config_str(
            "scenario = \"single\"\n[system]\nomega = 1\nkappa = 1\n",
            None,
        )
        .unwrap();
        assert_eq!(c.scenario, Scenario::Single);
        assert_eq!(c.system.params.kappa1, 1.0);
        assert_eq!(c.numerics.cutoff, None);
        assert_eq!(c.numerics.dt_max, None);
        assert_eq!(c.numerics.tail, DEFAULT_TAIL);
    }

    #[test]
    fn negative_rate_names_the_field() {
        let e = parse_config_str("[system]\nkappa1 = -1\n", Some(Scenario::Local)).unwrap_err();
        assert!(
            matches!(&e, Error::Config(m) if m.contains("kappa1")),
            "{e}"
        );
    }

    #[test]
    fn unknown_key_and_bad_syntax_are_config_errors() {
        let e = parse_config_str("[system]\nkapa1 = 1\n", Some(Scenario::Local)).unwrap_err();
        assert!(matches!(&e, Error::Config(m) if m.contains("kapa1")), "{e}");
        let e = parse_config_str("[system]\nkappa1 = \n", Some(Scenario::Local)).unwrap_err();
        assert!(
            matches!(&e, Error::Config(m) if m.contains("line 2")),
            "{e}"
        );
    }

    #[test]
    fn shorthand_conflicts() {
        assert!(
            parse_config_str("[system]\nkappa = 1\nkappa1 = 2\n", Some(Scenario::Local)).is_err()
        );
        assert!(parse_config_str("[system]\nphi = 1\nxi2 = 1\n", Some(Scenario::Local)).is_err());
        assert!(parse_config_str("scenario = \"rates\"", Some(Scenario::Local)).is_err());
    }

    #[test]
    fn complex_forms() {
        let c = parse_config_str(
            "[system]\nomega1 = [1, 2]\nomega2 = { re = 0.5 }\nxi1 = { abs = 2, arg = \"pi/2\" }\nphi = \"pi\"\n",
            Some(Scenario::Local),
        )
        .unwrap();
        assert_eq!(c.system.params.omega1, C64::new(1.0, 2.0));
        assert_eq!(c.system.params.omega2, C64::new(0.5, 0.0));
        assert!((c.system.params.xi1 - C64::new(0.0, 2.0)).norm() < 1e-15);
        assert!((c.system.params.xi2 - C64::new(0.0, -2.0)).norm() < 1e-15);
    }

    #[test]
    fn sweep_defaults() {
        let c = parse_config_str(
            "[sweep]\nsymbol = \"kappa_m\"\ngrid = \"0:20:0.5\"\n",
            Some(Scenario::Sweep),
        )
        .unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.grid.len(), 41);
        assert_eq!(s.phi, DEFAULT_PHI_GRID.to_vec());
        assert_eq!(s.solvers, vec![SweepSolver::ClosedForm, SweepSolver::Rates]);
        assert!(parse_config_str("", Some(Scenario::Sweep)).is_err());
        let asym = "[system]\nkappa1 = 1\nkappa2 = 0.5\n[sweep]\nsymbol = \"kappa_m\"\ngrid = [1, 2]\nsolvers = [\"closed_form\"]\n";
        assert!(parse_config_str(asym, Some(Scenario::Sweep)).is_err());
    }

    #[test]
    fn resolved_config_parses_back() {
        let text = "[system]\nkappa1 = 1\nkappa2 = 0.5\nphi = \"pi/2\"\n[numerics]\nseed = 7\nworkers = 2\n[sweep]\nsymbol = \"kappa_m\"\ngrid = \"1:3:1\"\n";
        let c = parse_config_str(text, Some(Scenario::Sweep)).unwrap();
        let echoed = c.to_toml();
        assert!(!echoed.contains("workers"));
        let back = parse_config_str(&echoed, None).unwrap();
        assert_eq!(back.system, c.system);
        assert_eq!(back.sweep, c.sweep);
        assert_eq!(back.numerics.seed, 7);
    }
}
