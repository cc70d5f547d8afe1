//! Argument parsing, dispatch and output for the `qtherm` binary.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a property or identity check failed |
//! | 2 | invalid flags or parameter values |
//! | 3 | unreadable or malformed input file |
//! | 4 | domain error in the computation |
//! | 5 | solver failure (no real root, non-convergence, unreachable target) |

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use qtherm_core::deformation::{
    additive_dual, bath_q_from_count, fluctuation_q, multiplicative_dual, rescaled_fluctuation, transform, DeformParam,
    FluctuatingBath, HeatBath, ScaleFactor,
};
use qtherm_core::entropy::{avg_hybrid, escort, escort_mean, hybrid, renyi, shannon, tsallis, Distribution};
use qtherm_core::maxent::{
    series_radius, solve_maxent_renyi_with, solve_maxent_shannon_limit_with, solve_maxent_with, trinomial_series,
    Constraint, MaxEntProblem, MaxEntSolution, RootMethod, SolverOptions, TrinomialProblem, DEFAULT_OMEGA_BRACKET,
};
use qtherm_core::qalgebra::{dist_add, dist_div, dist_mul, dist_sub, exp_scaling, log_scaling, IdentityCheck};
use qtherm_core::{EnergySpectrum, Error as CoreError};

use crate::check::{self, CheckConfig, Suite};
use crate::io::{fmt_real, read_column, write_csv, ReadError};

/// Residual above which a converged MaxEnt solution is still rejected.
pub const RESIDUAL_LIMIT: f64 = 1e-8;
/// Environment variable that overrides `check --seed`.
pub const SEED_ENV: &str = "QTHERM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitStatus {
    Success = 0,
    PropertyFailure = 1,
    Usage = 2,
    Parse = 3,
    Domain = 4,
    Solver = 5,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error("{0}")]
    InvalidData(String),
    #[error("{0}")]
    Domain(CoreError),
    #[error("{0}")]
    Solver(CoreError),
    #[error("{0} check(s) failed")]
    PropertyFailure(usize),
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) => ExitStatus::Usage,
            CliError::Read(_) | CliError::InvalidData(_) | CliError::Output(_) => ExitStatus::Parse,
            CliError::Domain(_) => ExitStatus::Domain,
            CliError::Solver(_) => ExitStatus::Solver,
            CliError::PropertyFailure(_) => ExitStatus::PropertyFailure,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        if e.is_solver_failure() {
            CliError::Solver(e)
        } else {
            CliError::Domain(e)
        }
    }
}

/// Parameter validation failures are flag errors, not domain errors.
fn flag<T>(r: qtherm_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Debug, Parser)]
#[command(name = "qtherm", version, about = "Tsallis index rescaling: group action, q-algebra, entropies, MaxEnt")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rescale q by alpha and print both dualities.
    Transform(TransformArgs),
    /// Entropy of a distribution read from a file.
    Entropy(EntropyArgs),
    /// Escort distribution of order r.
    Escort(EscortArgs),
    /// MaxEnt distribution for an energy spectrum read from a file.
    Maxent(MaxentArgs),
    /// Root of 1 - x + b x^alpha = 0 on the branch through x(0) = 1.
    Trinomial(TrinomialArgs),
    /// Finite heat bath and temperature-fluctuation indices.
    Heatbath(HeatbathArgs),
    /// Evaluate both sides of the rescaling identities at one point.
    AlgebraCheck(AlgebraArgs),
    /// Run the seeded property suites.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntropyKind {
    Tsallis,
    Shannon,
    Renyi,
    Hybrid,
    AvgHybrid,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Probability file: one value per line, optional header `p`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: EntropyKind,
    /// Entropic index; not used by `shannon`.
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EscortArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    /// Energy file; adds the escort mean to the output.
    #[arg(long)]
    pub energies: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Functional {
    Tsallis,
    Renyi,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("constraint").required(true).args(["omega", "target_mean"]))]
pub struct MaxentArgs {
    /// Energy file: one level per line, optional header `E`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    /// Scale factor, or `inf` for the Shannon limit.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: String,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Escort mean to reach by searching over omega.
    #[arg(long, allow_negative_numbers = true)]
    pub target_mean: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_OMEGA_BRACKET.0)]
    pub omega_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_OMEGA_BRACKET.1)]
    pub omega_max: f64,
    #[arg(long, value_enum, default_value_t = Functional::Tsallis)]
    pub entropy: Functional,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TrinomialArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    /// Sum the generalized-binomial series instead of solving directly.
    #[arg(long)]
    pub series: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct HeatbathArgs {
    /// Number of bath particles.
    #[arg(long, required_unless_present = "capacity")]
    pub n: Option<u64>,
    /// Heat capacity of the reservoir (in units of k_B).
    #[arg(long, allow_negative_numbers = true, requires = "rel_fluct", conflicts_with = "n")]
    pub capacity: Option<f64>,
    /// Relative inverse-temperature fluctuation.
    #[arg(long, requires = "capacity")]
    pub rel_fluct: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = IdentityCheck::TOLERANCE)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    /// Overridden by the QTHERM_SEED environment variable.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Random cases per sampled property.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Multiplies every tolerance; harness self-test only.
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub tol_scale: f64,
    /// Machine-readable report; plain text lines when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { ExitStatus::Usage as i32 } else { ExitStatus::Success as i32 };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => ExitStatus::Success as i32,
        Err(e) => {
            let _ = writeln!(err, "qtherm: {e}");
            e.status() as i32
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Transform(a) => run_transform(&a, out),
        Command::Entropy(a) => run_entropy(&a, out),
        Command::Escort(a) => run_escort(&a, out),
        Command::Maxent(a) => run_maxent(&a, out),
        Command::Trinomial(a) => run_trinomial(&a, out),
        Command::Heatbath(a) => run_heatbath(&a, out),
        Command::AlgebraCheck(a) => run_algebra_check(&a, out),
        Command::Check(a) => run_check(&a, out),
    }
}

/// Prints a flat record as one JSON object or a header plus one CSV row.
fn emit_record(out: &mut dyn Write, format: Format, fields: &[(&str, Value)]) -> Result<(), CliError> {
    match format {
        Format::Json => {
            let obj: serde_json::Map<String, Value> = fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            writeln!(out, "{}", Value::Object(obj))?;
        }
        Format::Csv => {
            let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
            let row: Vec<String> = fields.iter().map(|(_, v)| csv_field(v)).collect();
            write_csv(out, &header, &[row])?;
        }
    }
    Ok(())
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), fmt_real),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn num(x: f64) -> Value {
    json!(x)
}

fn run_transform(a: &TransformArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let q = flag(DeformParam::new(a.q))?;
    let alpha = flag(ScaleFactor::new(a.alpha))?;
    let qa = transform(q, alpha)?;
    let add = additive_dual(q);
    let (mul, mul_outside) = match multiplicative_dual(q) {
        Ok(d) => (num(d.q.value()), json!(d.outside_canonical_range)),
        Err(_) => (Value::Null, Value::Null),
    };
    emit_record(
        out,
        a.format,
        &[
            ("q", num(q.value())),
            ("alpha", num(alpha.value())),
            ("q_alpha", num(qa.value())),
            ("additive_dual", num(add.q.value())),
            ("additive_dual_outside_0_2", json!(add.outside_canonical_range)),
            ("multiplicative_dual", mul),
            ("multiplicative_dual_outside_0_2", mul_outside),
        ],
    )
}

fn load_distribution(path: &std::path::Path) -> Result<(Distribution, f64), CliError> {
    let values = read_column(path, "p")?;
    let sum: f64 = values.iter().sum();
    let p = Distribution::new(values).map_err(|e| CliError::InvalidData(format!("{}: {e}", path.display())))?;
    Ok((p, sum))
}

fn run_entropy(a: &EntropyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let q = match (a.kind, a.q) {
        (EntropyKind::Shannon, _) => None,
        (_, Some(q)) => Some(flag(DeformParam::new(q))?),
        (_, None) => return Err(CliError::Usage(format!("--q is required for --kind {:?}", a.kind).to_lowercase())),
    };
    let (p, sum) = load_distribution(&a.input)?;
    let value = match (a.kind, q) {
        (EntropyKind::Shannon, _) => shannon(&p),
        (EntropyKind::Tsallis, Some(q)) => tsallis(&p, q)?,
        (EntropyKind::Renyi, Some(q)) => renyi(&p, q)?,
        (EntropyKind::Hybrid, Some(q)) => hybrid(&p, q)?,
        (EntropyKind::AvgHybrid, Some(q)) => avg_hybrid(&p, q)?,
        (_, None) => unreachable!("q checked above"),
    };
    let kind = match a.kind {
        EntropyKind::Tsallis => "tsallis",
        EntropyKind::Shannon => "shannon",
        EntropyKind::Renyi => "renyi",
        EntropyKind::Hybrid => "hybrid",
        EntropyKind::AvgHybrid => "avg-hybrid",
    };
    emit_record(
        out,
        a.format,
        &[
            ("kind", json!(kind)),
            ("q", q.map_or(Value::Null, |q| num(q.value()))),
            ("value", num(value)),
            ("n", json!(p.len())),
            ("input_sum", num(sum)),
            ("renormalized", json!(p.renormalized())),
        ],
    )
}

fn run_escort(a: &EscortArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !a.r.is_finite() {
        return Err(CliError::Usage("r must be finite".into()));
    }
    let (p, _) = load_distribution(&a.input)?;
    let rho = escort(&p, a.r)?;
    let mean = match &a.energies {
        Some(path) => Some(escort_mean(&p, &read_column(path, "E")?, a.r)?),
        None => None,
    };
    match a.format {
        Format::Json => {
            let mut obj = json!({ "r": a.r, "p": rho.probs() });
            if let Some(m) = mean {
                obj["escort_mean"] = num(m);
            }
            writeln!(out, "{obj}")?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                rho.probs().iter().enumerate().map(|(i, x)| vec![i.to_string(), fmt_real(*x)]).collect();
            write_csv(&mut *out, &["i", "p"], &rows)?;
            if let Some(m) = mean {
                writeln!(out, "# escort_mean,{}", fmt_real(m))?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct LevelRow {
    i: usize,
    #[serde(rename = "E")]
    e: f64,
    p: f64,
}

#[derive(Debug, Serialize)]
struct MaxentReport {
    levels: Vec<LevelRow>,
    #[serde(rename = "Z_q")]
    z_q: f64,
    #[serde(rename = "Z_q_alpha")]
    z_q_alpha: f64,
    phi: f64,
    escort_mean: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
    omega: f64,
    /// Max deviation of `p^(1-q)` from its best affine fit in `E`; alpha = 1 only.
    #[serde(skip_serializing_if = "Option::is_none")]
    affinity_residual: Option<f64>,
}

impl MaxentReport {
    fn new(levels: &[f64], s: &MaxEntSolution, affinity_q: Option<f64>) -> Self {
        MaxentReport {
            levels: levels.iter().zip(s.probs.probs()).enumerate().map(|(i, (&e, &p))| LevelRow { i, e, p }).collect(),
            z_q: s.z_q.z,
            z_q_alpha: s.z_q_alpha.z,
            phi: s.phi,
            escort_mean: s.escort_mean,
            residual: s.stationarity_residual,
            iterations: s.iterations,
            converged: s.converged,
            omega: s.omega,
            affinity_residual: affinity_q.map(|q| check::affinity_residual(levels, s.probs.probs(), q)),
        }
    }

    fn write(&self, out: &mut dyn Write, format: Format) -> Result<(), CliError> {
        match format {
            Format::Json => writeln!(out, "{}", serde_json::to_string(self).map_err(io::Error::from)?)?,
            Format::Csv => {
                let rows: Vec<Vec<String>> =
                    self.levels.iter().map(|r| vec![r.i.to_string(), fmt_real(r.e), fmt_real(r.p)]).collect();
                write_csv(&mut *out, &["i", "E", "p"], &rows)?;
                for (k, v) in [
                    ("Z_q", fmt_real(self.z_q)),
                    ("Z_q_alpha", fmt_real(self.z_q_alpha)),
                    ("phi", fmt_real(self.phi)),
                    ("escort_mean", fmt_real(self.escort_mean)),
                    ("residual", fmt_real(self.residual)),
                    ("iterations", self.iterations.to_string()),
                    ("converged", self.converged.to_string()),
                    ("omega", fmt_real(self.omega)),
                ] {
                    writeln!(out, "# {k},{v}")?;
                }
                if let Some(r) = self.affinity_residual {
                    writeln!(out, "# affinity_residual,{}", fmt_real(r))?;
                }
            }
        }
        Ok(())
    }
}

fn parse_alpha(s: &str) -> Result<Option<ScaleFactor>, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(None),
        other => {
            let v: f64 = other.parse().map_err(|_| CliError::Usage(format!("invalid alpha `{s}`")))?;
            let alpha = flag(ScaleFactor::new(v))?;
            if v <= 0.0 {
                return Err(CliError::Usage("maxent needs alpha > 0".into()));
            }
            Ok(Some(alpha))
        }
    }
}

fn run_maxent(a: &MaxentArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let q = flag(DeformParam::new(a.q))?;
    let alpha = parse_alpha(&a.alpha)?;
    let constraint = match (a.omega, a.target_mean) {
        (Some(w), None) if w.is_finite() => Constraint::Omega(w),
        (None, Some(t)) if t.is_finite() => Constraint::TargetMean { target: t, bracket: (a.omega_min, a.omega_max) },
        _ => return Err(CliError::Usage("give exactly one finite --omega or --target-mean".into())),
    };
    if a.max_iter == 0 {
        return Err(CliError::Usage("--max-iter must be at least 1".into()));
    }
    let opts = SolverOptions { max_iterations: a.max_iter, ..SolverOptions::default() };
    let levels = read_column(&a.input, "E")?;
    let spectrum = EnergySpectrum::new(levels.clone())
        .map_err(|e| CliError::InvalidData(format!("{}: {e}", a.input.display())))?;

    let result = match alpha {
        None => solve_maxent_shannon_limit_with(&spectrum, q, &constraint, &opts),
        Some(alpha) => {
            let problem = flag(MaxEntProblem::new(spectrum, q, alpha, constraint))?;
            match a.entropy {
                Functional::Tsallis => solve_maxent_with(&problem, &opts),
                Functional::Renyi => solve_maxent_renyi_with(&problem, &opts),
            }
        }
    };
    let affinity_q = (alpha.map(|al| al.value()) == Some(1.0)).then_some(a.q);
    match result {
        Ok(s) => {
            MaxentReport::new(&levels, &s, affinity_q).write(out, a.format)?;
            if s.stationarity_residual <= RESIDUAL_LIMIT {
                Ok(())
            } else {
                Err(CliError::Solver(CoreError::NonConvergence { partial: Box::new(s) }))
            }
        }
        Err(CoreError::NonConvergence { partial }) => {
            MaxentReport::new(&levels, &partial, affinity_q).write(out, a.format)?;
            Err(CliError::Solver(CoreError::NonConvergence { partial }))
        }
        Err(e) => {
            if e.is_solver_failure() && a.format == Format::Json {
                writeln!(out, "{}", failure_json(&e))?;
            }
            Err(e.into())
        }
    }
}

fn failure_json(e: &CoreError) -> Value {
    let mut obj = json!({ "error": e.to_string(), "converged": false });
    match *e {
        CoreError::NoRealRoot { b, level, .. } => {
            obj["level"] = json!(level);
            obj["b"] = num(b);
        }
        CoreError::LambertDomain { x, level } => {
            obj["level"] = json!(level);
            obj["x"] = num(x);
        }
        _ => {}
    }
    obj
}

fn run_trinomial(a: &TrinomialArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let alpha = flag(ScaleFactor::new(a.alpha))?;
    if !a.b.is_finite() {
        return Err(CliError::Usage("b must be finite".into()));
    }
    let problem = TrinomialProblem::new(alpha, a.b)?;
    let (x, method, terms) = if a.series {
        let s = trinomial_series(alpha, a.b, 4000, 1e-18)?;
        (s.x, "series".to_string(), Some(s.terms_used))
    } else {
        let root = problem.solve()?;
        let (name, terms) = match root.method {
            RootMethod::Series { terms } => ("series", Some(terms)),
            RootMethod::Linear => ("linear", None),
            RootMethod::QuadraticInSqrt => ("quadratic-in-sqrt", None),
            RootMethod::Quadratic => ("quadratic", None),
            RootMethod::Bracketed => ("bracketed", None),
            RootMethod::Trivial => ("trivial", None),
        };
        (root.x, name.to_string(), terms)
    };
    emit_record(
        out,
        a.format,
        &[
            ("alpha", num(alpha.value())),
            ("b", num(a.b)),
            ("x", num(x)),
            ("method", json!(method)),
            ("terms", json!(terms)),
            ("residual", num(problem.residual(x))),
            ("series_radius", num(series_radius(alpha))),
        ],
    )
}

fn run_heatbath(a: &HeatbathArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let alpha = a.alpha.map(|v| flag(ScaleFactor::new(v))).transpose()?;
    if let Some(n) = a.n {
        let bath = flag(HeatBath::new(n))?;
        let mut fields = vec![("n", json!(n)), ("q", num(bath.q().value()))];
        if let Some(al) = alpha {
            let n_alpha = bath.rescale(al).map_err(|e| CliError::Usage(e.to_string()))?;
            fields.push(("alpha", num(al.value())));
            fields.push(("n_alpha", num(n_alpha)));
            fields.push(("q_alpha", num(transform(bath.q(), al)?.value())));
            fields.push(("q_of_n_alpha", num(bath_q_from_count(n_alpha)?.value())));
        }
        return emit_record(out, a.format, &fields);
    }
    let (c, rel) = match (a.capacity, a.rel_fluct) {
        (Some(c), Some(r)) => (c, r),
        _ => return Err(CliError::Usage("give --n, or --capacity with --rel-fluct".into())),
    };
    let bath = flag(FluctuatingBath::new(c, rel))?;
    let mut fields = vec![("capacity", num(c)), ("rel_fluct", num(rel)), ("q", num(fluctuation_q(bath)?.value()))];
    if let Some(al) = alpha {
        fields.push(("alpha", num(al.value())));
        fields.push(("rel_fluct_alpha", num(flag(rescaled_fluctuation(rel, al))?)));
    }
    emit_record(out, a.format, &fields)
}

fn run_algebra_check(a: &AlgebraArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let q = flag(DeformParam::new(a.q))?;
    let alpha = flag(ScaleFactor::new(a.alpha))?;
    if !a.x.is_finite() || !a.y.is_finite() {
        return Err(CliError::Usage("x and y must be finite".into()));
    }
    if !(a.tol >= 0.0) {
        return Err(CliError::Usage("--tol must be non-negative".into()));
    }
    let checks: [(&str, qtherm_core::Result<IdentityCheck>); 6] = [
        ("dist_add", dist_add(a.x, a.y, q, alpha)),
        ("dist_sub", dist_sub(a.x, a.y, q, alpha)),
        ("dist_mul", dist_mul(a.x, a.y, q, alpha)),
        ("dist_div", dist_div(a.x, a.y, q, alpha)),
        ("exp_scaling", exp_scaling(a.x, q, alpha)),
        ("log_scaling", log_scaling(a.x, q, alpha)),
    ];
    let mut failed = 0;
    let mut rows = Vec::new();
    for (name, c) in checks {
        let (lhs, rhs, gap, outcome) = match c {
            Ok(c) => {
                let ok = c.holds(a.tol);
                failed += usize::from(!ok);
                (Some(c.lhs), Some(c.rhs), Some(c.gap()), if ok { "holds" } else { "fails" })
            }
            Err(CoreError::DomainMismatch { .. }) => (None, None, None, "domain_mismatch"),
            Err(_) => (None, None, None, "undefined"),
        };
        rows.push((name, lhs, rhs, gap, outcome));
    }
    match a.format {
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(n, l, r, g, o)| json!({ "identity": n, "lhs": l, "rhs": r, "gap": g, "outcome": o }))
                .collect();
            let obj = json!({ "x": a.x, "y": a.y, "q": a.q, "alpha": a.alpha, "tol": a.tol, "checks": items });
            writeln!(out, "{obj}")?;
        }
        Format::Csv => {
            let opt = |v: &Option<f64>| v.map(fmt_real).unwrap_or_default();
            let table: Vec<Vec<String>> =
                rows.iter().map(|(n, l, r, g, o)| vec![n.to_string(), opt(l), opt(r), opt(g), o.to_string()]).collect();
            write_csv(out, &["identity", "lhs", "rhs", "gap", "outcome"], &table)?;
        }
    }
    if failed > 0 {
        Err(CliError::PropertyFailure(failed))
    } else {
        Ok(())
    }
}

fn run_check(a: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let seed = match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{s}` is not a seed")))?,
        Err(_) => a.seed,
    };
    if !(a.tol_scale >= 0.0) {
        return Err(CliError::Usage("--tol-scale must be non-negative".into()));
    }
    let cfg = CheckConfig { seed, samples: a.samples.max(1), tol_scale: a.tol_scale };
    let report = check::run(a.suite, &cfg);
    match a.format {
        None => {
            for r in &report.results {
                writeln!(out, "{r}")?;
            }
            writeln!(
                out,
                "{}/{} properties passed (seed {seed})",
                report.results.len() - report.failed_count(),
                report.results.len()
            )?;
        }
        Some(Format::Json) => {
            let props: Vec<Value> = report
                .results
                .iter()
                .map(|r| {
                    json!({
                        "property": format!("{}.{}", r.suite, r.name),
                        "passed": r.passed(),
                        "cases": r.cases,
                        "failures": r.failures,
                        "worst": if r.worst.is_finite() { num(r.worst) } else { Value::Null },
                        "tolerance": r.tolerance,
                    })
                })
                .collect();
            let obj = json!({ "seed": seed, "samples": cfg.samples, "passed": report.passed(), "properties": props });
            writeln!(out, "{obj}")?;
        }
        Some(Format::Csv) => {
            let rows: Vec<Vec<String>> = report
                .results
                .iter()
                .map(|r| {
                    vec![
                        format!("{}.{}", r.suite, r.name),
                        r.passed().to_string(),
                        r.cases.to_string(),
                        r.failures.to_string(),
                        fmt_real(r.worst),
                        fmt_real(r.tolerance),
                    ]
                })
                .collect();
            write_csv(out, &["property", "passed", "cases", "failures", "worst", "tolerance"], &rows)?;
        }
    }
    let failed = report.failed_count();
    if failed > 0 {
        Err(CliError::PropertyFailure(failed))
    } else {
        Ok(())
    }
}
