//! Command-line front end behind the `radsing` binary.
//!
//! Every subcommand reads its parameters from flags and, optionally, from a
//! TOML or JSON file given with `--config`. File keys are the flag names
//! with `-` replaced by `_` (`--rel-tol` is `rel_tol`, `--T` is `t_end`);
//! flags win over the file. The JSON payload goes to stdout, everything else
//! to stderr.
//!
//! Exit codes: 0 success, 1 failed check or computation, 2 usage or
//! configuration error, 3 integration stopped by a regime event.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::analysis::suite::{run_suite, SuiteGrid};
use crate::analysis::{flux_identity_check, psi_residual, run_sweep, SweepConfig};
use crate::classifier::{
    classify, default_slope_bracket, find_separatrix, separatrix_decay_rate, ManifoldFit,
    Separatrix, Thresholds,
};
use crate::error::Error;
use crate::ode::{
    default_t0, integrate_psi, integrate_radial, Event, Frame, IntegratorConfig, Sample, Stats,
    Trajectory,
};
use crate::params::{constant_a, limit_coefficients, validate_exponents, Exponents};
use crate::transform::{from_psi_state, PsiState};

/// Overrides the default output directory (`radsing-out`).
pub const OUTPUT_DIR_ENV: &str = "RADSING_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "radsing-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EVENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "radsing", version, about = "Radial singular solutions of -Δu = u^α |log u|^β")]
pub struct Cli {
    /// TOML or JSON file with the subcommand's parameters.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print A, a0, b0, ζ0 and λ± for the given exponents.
    Constants(ConstantsArgs),
    /// Integrate one trajectory and write it as CSV.
    Simulate(SimulateArgs),
    /// Integrate one trajectory in the ψ frame and classify it.
    Classify(ClassifyArgs),
    /// Bisect the initial slope for the stable manifold of 0.
    Separatrix(SeparatrixArgs),
    /// Run a classification sweep over a grid of exponents.
    Sweep(SweepArgs),
    /// Run the invariant suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ExponentArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
}

impl ExponentArgs {
    fn exponents(&self) -> Result<Exponents, CliError> {
        let n = self.n.ok_or_else(|| missing("n"))?;
        let alpha = self.alpha.ok_or_else(|| missing("alpha"))?;
        let beta = self.beta.ok_or_else(|| missing("beta"))?;
        Ok(validate_exponents(n, alpha, beta)?)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ToleranceArgs {
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub max_step: Option<f64>,
}

impl ToleranceArgs {
    fn integrator(&self, e: &Exponents) -> Result<IntegratorConfig, CliError> {
        let mut cfg = IntegratorConfig::for_exponents(e);
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if let Some(v) = self.max_step {
            cfg.max_step = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub conv_tol: Option<f64>,
    #[arg(long)]
    pub zero_tol: Option<f64>,
    #[arg(long)]
    pub tail_fraction: Option<f64>,
    #[arg(long)]
    pub fit_window: Option<f64>,
}

impl ThresholdArgs {
    fn thresholds(&self, e: &Exponents) -> Result<Thresholds, CliError> {
        let mut th = Thresholds::for_exponents(e);
        if let Some(v) = self.conv_tol {
            th.conv_tol = v;
        }
        if let Some(v) = self.zero_tol {
            th.zero_tol = v;
        }
        if let Some(v) = self.tail_fraction {
            th.tail_fraction = v;
        }
        if let Some(v) = self.fit_window {
            th.fit_window = v;
        }
        th.validate()?;
        Ok(th)
    }
}

/// Initial data in the ψ frame.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct StartArgs {
    /// Starting time; defaults to `max(5, 2|β|/(α-1))`.
    #[arg(long)]
    pub t0: Option<f64>,
    /// Final time.
    #[arg(long = "T", visible_alias = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub psi0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub dpsi0: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ConstantsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exponents: ExponentArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameArg {
    Physical,
    Ef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// JSON summary on stdout, CSV written to a file.
    Json,
    /// CSV on stdout, JSON summary on stderr.
    Csv,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exponents: ExponentArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub start: StartArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerances: ToleranceArgs,
    /// Integration frame (default `ef`).
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    /// Output selector (default `json`).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// CSV path; defaults to a name derived from the parameters inside the
    /// output directory.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exponents: ExponentArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub start: StartArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub thresholds: ThresholdArgs,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SeparatrixArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub exponents: ExponentArgs,
    #[arg(long)]
    pub t0: Option<f64>,
    /// Starting value; defaults to `A/4`.
    #[arg(long)]
    pub psi0: Option<f64>,
    /// Lower end of the slope bracket; defaults to `-5 max(A, psi0)`.
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    /// Upper end of the slope bracket; defaults to 0.
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Also fit the decay rate along the separatrix (default true).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub fit: Option<bool>,
    #[command(flatten)]
    #[serde(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub thresholds: ThresholdArgs,
}

/// Sweep flags; the config file may in addition carry `grid` and `cells`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub ensemble: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub thresholds: ThresholdArgs,
    /// Run the trajectory checks (default true).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub verify: Option<bool>,
    /// Per-trajectory CSV directory, relative to the output directory.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridArg {
    Default,
    Quick,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// `default`: 100 states per cell; `quick`: 10.
    #[arg(long, value_enum)]
    pub grid: Option<GridArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Run(err)
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Run(err.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Run(err) => match err {
                Error::OutOfRange { .. }
                | Error::InvalidConfig(_)
                | Error::Config(_)
                | Error::BracketInvalid { .. }
                | Error::NonpositiveTime(_)
                | Error::DomainError { .. } => EXIT_USAGE,
                Error::Event(_) => EXIT_EVENT,
                _ => EXIT_CHECK,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Run(err) => write!(f, "{err}"),
        }
    }
}

fn missing(key: &str) -> CliError {
    CliError::Usage(format!(
        "missing --{} (config key `{key}`)",
        key.replace('_', "-")
    ))
}

/// Reads a config file into a JSON object; `.json` files are JSON, all
/// others TOML.
pub fn load_config(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = if path.extension().is_some_and(|x| x == "json") {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    } else {
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    };
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::Usage(format!("{}: expected a table", path.display()))),
    }
}

/// Overlays the flags that were given on the file values. `extra` lists file
/// keys accepted besides the flag names.
pub fn merge<T: Serialize + DeserializeOwned>(
    file: Option<Map<String, Value>>,
    flags: &T,
    extra: &[&str],
) -> Result<Value, CliError> {
    let Value::Object(given) = serde_json::to_value(flags).expect("flags serialize") else {
        unreachable!("flag structs serialize to objects");
    };
    let mut merged = file.unwrap_or_default();
    if let Some(key) = merged
        .keys()
        .find(|k| !given.contains_key(*k) && !extra.contains(&k.as_str()))
    {
        return Err(CliError::Usage(format!("unknown config key `{key}`")));
    }
    for (k, v) in given {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    Ok(Value::Object(merged))
}

fn resolve<T: Serialize + DeserializeOwned>(
    file: Option<Map<String, Value>>,
    flags: &T,
) -> Result<T, CliError> {
    let merged = merge(file, flags, &[])?;
    serde_json::from_value(merged).map_err(|e| CliError::Usage(format!("config: {e}")))
}

/// Output directory: flag or config value, then the environment, then
/// `radsing-out`.
pub fn output_dir(configured: Option<&Path>) -> PathBuf {
    configured
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    writeln!(out, "{text}")?;
    Ok(())
}

/// Parses `args` and runs the subcommand, returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let file = cli.config.as_deref().map(load_config).transpose()?;
    match cli.command {
        Command::Constants(a) => cmd_constants(resolve(file, &a)?, out),
        Command::Simulate(a) => cmd_simulate(resolve(file, &a)?, out, err),
        Command::Classify(a) => cmd_classify(resolve(file, &a)?, out),
        Command::Separatrix(a) => cmd_separatrix(resolve(file, &a)?, out),
        Command::Sweep(a) => cmd_sweep(file, &a, out, err),
        Command::Verify(a) => cmd_verify(resolve(file, &a)?, out, err),
    }
}

#[derive(Debug, Serialize)]
struct ConstantsReport {
    n: u32,
    alpha: f64,
    beta: f64,
    #[serde(rename = "A")]
    a: f64,
    a0: f64,
    b0: f64,
    zeta0: f64,
    k: f64,
    lambda_minus: f64,
    lambda_plus: f64,
    identity_residual: f64,
}

fn cmd_constants(a: ConstantsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let e = a.exponents.exponents()?;
    let c = limit_coefficients(&e);
    let nm2 = e.dim() - 2.0;
    print_json(
        out,
        &ConstantsReport {
            n: e.n(),
            alpha: e.alpha(),
            beta: e.beta(),
            a: c.a,
            a0: c.a0,
            b0: c.b0,
            zeta0: c.zeta0,
            k: e.log_power(),
            lambda_minus: c.lambda_minus,
            lambda_plus: c.lambda_plus,
            identity_residual: c.a0 * c.a0 + 4.0 * c.b0 - nm2 * nm2,
        },
    )?;
    Ok(EXIT_OK)
}

fn start_state(e: &Exponents, s: &StartArgs) -> Result<PsiState, CliError> {
    Ok(PsiState {
        t: s.t0.unwrap_or_else(|| default_t0(e)),
        psi: s.psi0.ok_or_else(|| missing("psi0"))?,
        psi_t: s.dpsi0.unwrap_or(0.0),
    })
}

fn end_time(p: &PsiState, s: &StartArgs, default_length: f64) -> Result<f64, CliError> {
    let t_end = s.t_end.unwrap_or(p.t + default_length);
    if !(t_end > p.t) {
        return Err(CliError::Usage(format!("--T = {t_end} must exceed t0 = {}", p.t)));
    }
    Ok(t_end)
}

#[derive(Debug, Serialize)]
struct SimulateReport {
    n: u32,
    alpha: f64,
    beta: f64,
    #[serde(rename = "A")]
    a: f64,
    frame: Frame,
    t0: f64,
    t_end: f64,
    psi0: f64,
    dpsi0: f64,
    samples: usize,
    stats: Stats,
    event: Option<Event>,
    first: Option<Sample>,
    last: Option<Sample>,
    psi_residual: Option<f64>,
    flux_defect: Option<f64>,
    csv: Option<PathBuf>,
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let e = a.exponents.exponents()?;
    let cfg = a.tolerances.integrator(&e)?;
    let p = start_state(&e, &a.start)?;
    let t_end = end_time(&p, &a.start, 100.0)?;
    let frame = a.frame.unwrap_or(FrameArg::Ef);
    let traj = match frame {
        FrameArg::Ef => integrate_psi(p, t_end, &e, &cfg)?,
        FrameArg::Physical => integrate_radial(from_psi_state(p, &e)?, (-t_end).exp(), &e, &cfg)?,
    };
    let ef: Option<Trajectory> = match frame {
        FrameArg::Ef => Some(traj.clone()),
        FrameArg::Physical => traj.to_emden_fowler(&e, &cfg).ok(),
    };
    let psi_residual = ef.as_ref().and_then(|t| psi_residual(t, &e).ok());
    let flux_defect = flux_identity_check(&traj, &e).ok();

    let format = a.format.unwrap_or(Format::Json);
    let csv = match format {
        Format::Csv => None,
        Format::Json => {
            let path = a.csv.clone().unwrap_or_else(|| {
                output_dir(a.out_dir.as_deref()).join(format!(
                    "simulate_n{}_alpha{}_beta{}_{}.csv",
                    e.n(),
                    e.alpha(),
                    e.beta(),
                    traj.frame.name()
                ))
            });
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let mut w = BufWriter::new(File::create(&path)?);
            traj.write_csv(&mut w)?;
            w.flush()?;
            Some(path)
        }
    };
    let report = SimulateReport {
        n: e.n(),
        alpha: e.alpha(),
        beta: e.beta(),
        a: constant_a(&e),
        frame: traj.frame,
        t0: p.t,
        t_end,
        psi0: p.psi,
        dpsi0: p.psi_t,
        samples: traj.samples.len(),
        stats: traj.stats,
        event: traj.event().copied(),
        first: traj.first().copied(),
        last: traj.last().copied(),
        psi_residual,
        flux_defect,
        csv,
    };
    match format {
        Format::Json => print_json(out, &report)?,
        Format::Csv => {
            traj.write_csv(&mut *out)?;
            print_json(err, &report)?;
        }
    }
    if let Some(ev) = traj.event() {
        writeln!(err, "integration stopped by {:?} at x = {}", ev.kind, ev.x)?;
        return Ok(EXIT_EVENT);
    }
    Ok(EXIT_OK)
}

fn cmd_classify(a: ClassifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let e = a.exponents.exponents()?;
    let cfg = a.tolerances.integrator(&e)?;
    let th = a.thresholds.thresholds(&e)?;
    let p = start_state(&e, &a.start)?;
    let t_end = end_time(&p, &a.start, 300.0)?;
    let traj = integrate_psi(p, t_end, &e, &cfg)?;
    let c = classify(&traj, &e, &th)?;
    print_json(out, &c)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct SeparatrixReport {
    n: u32,
    alpha: f64,
    beta: f64,
    #[serde(rename = "A")]
    a: f64,
    lambda_minus: f64,
    bracket: (f64, f64),
    separatrix: Separatrix,
    fit: Option<ManifoldFit>,
    rate_relative_error: Option<f64>,
}

fn cmd_separatrix(a: SeparatrixArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let e = a.exponents.exponents()?;
    let cfg = a.tolerances.integrator(&e)?;
    let th = a.thresholds.thresholds(&e)?;
    let big_a = constant_a(&e);
    let t0 = a.t0.unwrap_or_else(|| default_t0(&e));
    let psi0 = a.psi0.unwrap_or(0.25 * big_a);
    let (dlo, dhi) = default_slope_bracket(&e, psi0);
    let bracket = (a.lo.unwrap_or(dlo), a.hi.unwrap_or(dhi));
    let sep = find_separatrix(&e, t0, psi0, bracket, &th, &cfg)?;
    let lm = limit_coefficients(&e).lambda_minus;
    let fit = if a.fit.unwrap_or(true) {
        Some(separatrix_decay_rate(&e, &sep, &cfg)?)
    } else {
        None
    };
    print_json(
        out,
        &SeparatrixReport {
            n: e.n(),
            alpha: e.alpha(),
            beta: e.beta(),
            a: big_a,
            lambda_minus: lm,
            bracket,
            separatrix: sep,
            rate_relative_error: fit.map(|f| (f.rate - lm).abs() / lm.abs()),
            fit,
        },
    )?;
    Ok(EXIT_OK)
}

/// Builds the sweep configuration from the file, the flags and the output
/// directory.
pub fn sweep_config(file: Option<Map<String, Value>>, a: &SweepArgs) -> Result<SweepConfig, CliError> {
    let mut merged = merge(file, a, &["grid", "cells"])?;
    let obj = merged.as_object_mut().expect("merge returns an object");
    let out_dir = obj
        .remove("out_dir")
        .filter(|v| !v.is_null())
        .map(|v| serde_json::from_value::<PathBuf>(v).map_err(|e| CliError::Usage(format!("out_dir: {e}"))))
        .transpose()?;
    obj.retain(|_, v| !v.is_null());
    let mut cfg: SweepConfig =
        serde_json::from_value(merged).map_err(|e| CliError::Usage(format!("config: {e}")))?;
    if let Some(dir) = cfg.csv_dir.take() {
        cfg.csv_dir = Some(if dir.is_absolute() {
            dir
        } else {
            output_dir(out_dir.as_deref()).join(dir)
        });
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sweep(
    file: Option<Map<String, Value>>,
    a: &SweepArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let cfg = sweep_config(file, a)?;
    if let Some(dir) = &cfg.csv_dir {
        fs::create_dir_all(dir)?;
    }
    let report = run_sweep(&cfg)?;
    let t = &report.totals;
    writeln!(
        err,
        "{} cells, {} trajectories: {} to A, {} decay, {} hit zero, {} blow up, {} undetermined, {} errors",
        report.cells.len(),
        t.total(),
        t.converges_to_a,
        t.decays_to_zero,
        t.hits_zero,
        t.blow_up,
        t.undetermined,
        t.errors
    )?;
    writeln!(out, "{}", report.to_json())?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let grid = match a.grid.unwrap_or(GridArg::Default) {
        GridArg::Default => SuiteGrid::Default,
        GridArg::Quick => SuiteGrid::Quick,
    };
    let report = run_suite(grid, a.seed.unwrap_or(0), a.jobs)?;
    for c in &report.checks {
        writeln!(err, "{}", c.line())?;
    }
    writeln!(
        err,
        "{}",
        if report.passed { "all checks passed" } else { "some checks failed" }
    )?;
    print_json(out, &report)?;
    Ok(if report.passed { EXIT_OK } else { EXIT_CHECK })
}
