//! Command-line surface: `solve`, `cnf`, `csp`, `analyze` and `verify`.
//!
//! Every command produces a [`CmdOutput`] holding the exit code and the text
//! for stdout, so runs can be compared in-process as well as from the binary.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::csp::{
    self, parse_dimacs, parse_instance_json, parse_scheme, parse_template_json, CspError,
    CspInstance, CspStatus, CspTemplate, Encoder, ThresholdScheme,
};
use crate::domain::{fmt_rational, parse_rational, DomainError, IntervalSet, LinearProgram, Rational};
use crate::oracle::suites::{run_suite, Suite, VerifyOptions};
use crate::oracle::OracleError;
use crate::potential::{iteration_budget, PotentialTable};
use crate::walk::{
    self, optimize, restart_rng, run_walk, ObjectiveMode, WalkConfig, WalkContext, WalkError,
    WalkOutcome, WalkStatus,
};

pub const EXIT_SOLVED: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_EXHAUSTED: i32 = 2;
pub const EXIT_RELAXATION_INFEASIBLE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INPUT: i32 = 65;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_RESTART_CAP: u64 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "erelax", version, about = "Random walks for E-relaxations of 0-1 programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find y in E^n with Ay <= b, or maximize an objective over such points.
    Solve(SolveArgs),
    /// Solve a DIMACS CNF formula through its LP encoding and threshold rounding.
    Cnf(CnfArgs),
    /// Solve a CSP instance over a template given as JSON.
    Csp(CspArgs),
    /// Print potentials, quanta, traction, starting distributions and T for a set E.
    Analyze(AnalyzeArgs),
    /// Run the independent oracle suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Restarts {
    Auto,
    Fixed(u64),
}

impl FromStr for Restarts {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Restarts::Auto);
        }
        s.parse()
            .map(Restarts::Fixed)
            .map_err(|_| format!("expected `auto` or a nonnegative integer, got `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Feasible,
    Optimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EncoderKind {
    Direct,
    Basic,
}

/// Options shared by every command that walks.
#[derive(Args, Debug, Clone)]
pub struct WalkArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Draw the seed from the operating system instead.
    #[arg(long, conflicts_with = "seed")]
    pub entropy: bool,
    /// `auto` for ⌈n·(2 - meas(E))^n⌉.
    #[arg(long, default_value = "auto")]
    pub restarts: Restarts,
    #[arg(long, default_value_t = DEFAULT_RESTART_CAP)]
    pub max_restarts: u64,
    /// Override the per-restart step budget T.
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Include the step-by-step trajectory of the reported restart.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long)]
    pub lp: PathBuf,
    /// Interval set such as `0,1/3;2/3,1`.
    #[arg(long = "E", required_unless_present = "e_file")]
    pub e: Option<String>,
    /// File holding the interval set.
    #[arg(long = "E-file", conflicts_with = "e")]
    pub e_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Feasible)]
    pub mode: Mode,
    /// Objective coefficients `c1,c2,...` for optimize mode.
    #[arg(long, allow_hyphen_values = true)]
    pub objective: Option<String>,
    /// Bisect over integer thresholds.
    #[arg(long)]
    pub integral: bool,
    #[arg(long, default_value = "1/1000")]
    pub tolerance: String,
    #[command(flatten)]
    pub walk: WalkArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CnfArgs {
    pub file: PathBuf,
    /// Maximum clause width.
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = EncoderKind::Direct)]
    pub encoder: EncoderKind,
    #[command(flatten)]
    pub walk: WalkArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CspArgs {
    #[arg(long)]
    pub template: PathBuf,
    #[arg(long)]
    pub instance: PathBuf,
    /// Interval set on the first line, labels as a 0/1 string on the second.
    #[arg(long)]
    pub scheme: PathBuf,
    #[command(flatten)]
    pub walk: WalkArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyzeArgs {
    #[arg(long = "E")]
    pub e: String,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub instances: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_FAILURE,
        }
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::RestartBudgetTooLarge { .. }
            | WalkError::NonIntegralObjective
            | WalkError::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<CspError> for CliError {
    fn from(e: CspError) -> Self {
        match e {
            CspError::Walk(w) => w.into(),
            CspError::RoundingFailed => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Internal(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmdOutput {
    pub code: i32,
    pub stdout: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub step: u64,
    pub sigma: Vec<usize>,
    /// `(variable, interval)`, both 0-indexed; absent on the solving probe.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub taken: Option<(usize, usize)>,
}

/// The run report; field order is fixed so identical runs print identical bytes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub status: &'static str,
    pub witness: Option<Vec<String>>,
    pub restarts_used: u64,
    pub steps_used: u64,
    pub seed: u64,
    #[serde(rename = "T")]
    pub t: u64,
    #[serde(rename = "R")]
    pub r: u64,
    pub per_restart_steps: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TraceStep>>,
}

impl RunReport {
    fn new(seed: u64, t: u64, r: u64) -> Self {
        Self {
            status: "exhausted",
            witness: None,
            restarts_used: 0,
            steps_used: 0,
            seed,
            t,
            r,
            per_restart_steps: Vec::new(),
            objective_value: None,
            probes: None,
            assignment: None,
            delta: None,
            trajectory: None,
        }
    }

    fn absorb(&mut self, out: &WalkOutcome) {
        self.status = match out.status {
            WalkStatus::Solved(_) => "solved",
            WalkStatus::Exhausted => "exhausted",
        };
        self.witness = out.witness().map(fmt_vec);
        self.restarts_used = out.restarts_used;
        self.steps_used = out.steps_used;
        self.per_restart_steps = out.per_restart_steps.clone();
    }

    fn exit_code(&self) -> i32 {
        match self.status {
            "solved" => EXIT_SOLVED,
            "relaxation_infeasible" => EXIT_RELAXATION_INFEASIBLE,
            _ => EXIT_EXHAUSTED,
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => to_json(self),
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "status: {}", self.status);
                if let Some(w) = &self.witness {
                    let _ = writeln!(s, "witness: {}", w.join(" "));
                }
                if let Some(v) = &self.objective_value {
                    let _ = writeln!(s, "objective: {v}");
                }
                if let Some(a) = &self.assignment {
                    let lits: Vec<String> = a.iter().map(i64::to_string).collect();
                    let _ = writeln!(s, "v {} 0", lits.join(" "));
                }
                let _ = writeln!(
                    s,
                    "restarts: {}/{}  steps: {}  T: {}  seed: {}",
                    self.restarts_used, self.r, self.steps_used, self.t, self.seed
                );
                s
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn fmt_vec(v: &[Rational]) -> Vec<String> {
    v.iter().map(fmt_rational).collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn resolve_seed(args: &WalkArgs) -> u64 {
    if args.entropy {
        rand::random()
    } else {
        args.seed
    }
}

fn restart_budget(ctx: &WalkContext, args: &WalkArgs) -> Result<u64, CliError> {
    match args.restarts {
        Restarts::Fixed(r) => Ok(r),
        Restarts::Auto => ctx.auto_restarts(args.max_restarts).map_err(|e| {
            CliError::Usage(format!(
                "{e}: the auto budget n·(2 - meas(E))^n = {} restarts; pass --restarts N or raise --max-restarts",
                fmt_rational(&ctx.restart_scale())
            ))
        }),
    }
}

fn apply_steps(ctx: WalkContext, args: &WalkArgs) -> WalkContext {
    match args.steps {
        Some(t) => ctx.with_budget(t),
        None => ctx,
    }
}

/// Replays the reported restart with an observer.
fn trajectory(ctx: &WalkContext, seed: u64, out: &WalkOutcome) -> Result<Vec<TraceStep>, CliError> {
    let Some(index) = out.restarts_used.checked_sub(1) else {
        return Ok(Vec::new());
    };
    let mut steps = Vec::new();
    run_walk(ctx, restart_rng(seed, index), false, |rec| {
        steps.push(TraceStep {
            step: rec.step,
            sigma: rec.sigma.to_vec(),
            taken: rec.taken.map(|m| (m.var, m.interval)),
        })
    })?;
    Ok(steps)
}

fn walk_config(args: &WalkArgs, seed: u64, restarts: u64) -> WalkConfig {
    WalkConfig {
        seed,
        restarts,
        jobs: args.jobs,
        verify_strategies: cfg!(debug_assertions),
    }
}

fn parse_objective(text: &str, n: usize) -> Result<Vec<Rational>, CliError> {
    let c = text
        .split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad --objective: {e}")))?;
    if c.len() != n {
        return Err(CliError::Usage(format!(
            "--objective has {} coefficients, the program has {n} variables",
            c.len()
        )));
    }
    Ok(c)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<CmdOutput, CliError> {
    let e_text = match (&args.e, &args.e_file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => read(p)?.trim().to_string(),
        (None, None) => return Err(CliError::Usage("one of --E or --E-file is required".into())),
    };
    let e: IntervalSet = e_text.parse()?;
    let lp = LinearProgram::parse(&read(&args.lp)?)?.with_uniform_set(e);
    let seed = resolve_seed(&args.walk);
    let ctx = apply_steps(WalkContext::new(lp.clone())?, &args.walk);
    let restarts = restart_budget(&ctx, &args.walk)?;
    let config = walk_config(&args.walk, seed, restarts);
    let mut report = RunReport::new(seed, ctx.budget(), restarts);

    if args.mode == Mode::Optimize {
        let text = args
            .objective
            .as_deref()
            .ok_or_else(|| CliError::Usage("--mode optimize needs --objective".into()))?;
        let c = parse_objective(text, lp.n())?;
        let mode = if args.integral {
            ObjectiveMode::Integral
        } else {
            let tol = parse_rational(&args.tolerance)
                .map_err(|e| CliError::Usage(format!("bad --tolerance: {e}")))?;
            if tol <= Rational::from_integer(0.into()) {
                return Err(CliError::Usage("--tolerance must be positive".into()));
            }
            ObjectiveMode::Tolerance(tol)
        };
        match optimize(&lp, &c, &mode, &config) {
            Err(WalkError::RelaxationInfeasible) => report.status = "relaxation_infeasible",
            Err(e) => return Err(e.into()),
            Ok(None) => {}
            Ok(Some(best)) => {
                if !lp.is_relaxed_solution(&best.witness) {
                    return Err(CliError::Internal("witness failed re-verification".into()));
                }
                report.status = "solved";
                report.witness = Some(fmt_vec(&best.witness));
                report.objective_value = Some(fmt_rational(&best.value));
                report.probes = Some(best.probes);
                report.restarts_used = best.restarts_used;
                report.steps_used = best.steps_used;
            }
        }
    } else {
        match walk::solve(&ctx, &config) {
            Err(WalkError::RelaxationInfeasible) => report.status = "relaxation_infeasible",
            Err(e) => return Err(e.into()),
            Ok(out) => {
                if let Some(y) = out.witness() {
                    if !lp.is_relaxed_solution(y) {
                        return Err(CliError::Internal("witness failed re-verification".into()));
                    }
                }
                report.absorb(&out);
                if args.walk.trace {
                    report.trajectory = Some(trajectory(&ctx, seed, &out)?);
                }
            }
        }
    }
    Ok(CmdOutput {
        code: report.exit_code(),
        stdout: report.render(args.walk.format),
    })
}

fn solve_instance(
    instance: &CspInstance,
    scheme: &ThresholdScheme,
    encoder: &Encoder,
    args: &WalkArgs,
) -> Result<CmdOutput, CliError> {
    let seed = resolve_seed(args);
    let (ctx, delta) = csp::prepare(instance, scheme, encoder)?;
    let ctx = apply_steps(ctx, args);
    let restarts = restart_budget(&ctx, args)?;
    let mut report = RunReport::new(seed, ctx.budget(), restarts);
    report.delta = Some(fmt_rational(&delta));
    let config = walk_config(args, seed, restarts);
    let walk_out = match walk::solve(&ctx, &config) {
        Err(WalkError::RelaxationInfeasible) => {
            report.status = "relaxation_infeasible";
            return Ok(CmdOutput {
                code: report.exit_code(),
                stdout: report.render(args.format),
            });
        }
        other => other?,
    };
    report.absorb(&walk_out);
    if args.trace {
        report.trajectory = Some(trajectory(&ctx, seed, &walk_out)?);
    }
    let outcome = csp::finish(instance, scheme, walk_out, delta)?;
    if let CspStatus::Solved(a) = &outcome.status {
        report.assignment = Some(
            a.iter()
                .enumerate()
                .map(|(i, &b)| if b { i as i64 + 1 } else { -(i as i64 + 1) })
                .collect(),
        );
    }
    Ok(CmdOutput {
        code: report.exit_code(),
        stdout: report.render(args.format),
    })
}

pub fn cmd_cnf(args: &CnfArgs) -> Result<CmdOutput, CliError> {
    let instance = parse_dimacs(&read(&args.file)?)?;
    let scheme = ThresholdScheme::ksat(args.k).map_err(|e| CliError::Usage(e.to_string()))?;
    // width check against k happens during encoding for both encoders
    let direct = Encoder::Direct { k: args.k };
    direct.encode(&instance)?;
    let encoder = match args.encoder {
        EncoderKind::Direct => direct,
        EncoderKind::Basic => Encoder::Basic(CspTemplate::new(
            instance.constraints().iter().map(|c| (*c.relation).clone()),
        )),
    };
    solve_instance(&instance, &scheme, &encoder, &args.walk)
}

pub fn cmd_csp(args: &CspArgs) -> Result<CmdOutput, CliError> {
    let template = parse_template_json(&read(&args.template)?)?;
    let instance = parse_instance_json(&read(&args.instance)?, &template)?;
    let scheme = parse_scheme(&read(&args.scheme)?)?;
    solve_instance(&instance, &scheme, &Encoder::Basic(template), &args.walk)
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    #[serde(rename = "E")]
    pub e: String,
    pub n: usize,
    pub meas: String,
    pub two_minus_meas: String,
    pub u0: Vec<String>,
    pub u1: Vec<String>,
    pub gamma: String,
    pub tau: Option<String>,
    pub q_canonical: Vec<String>,
    pub beta: String,
    pub beta_q: Vec<String>,
    #[serde(rename = "T")]
    pub t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn analyze_report(e: &IntervalSet, n: usize) -> Result<AnalyzeReport, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let table = PotentialTable::build(e);
    let meas = e.measure();
    let tau = table.traction().ok().map(fmt_rational);
    let (t, note) = match iteration_budget(n, &table) {
        Ok(t) => (Some(t), None),
        Err(err) => (None, Some(err.to_string())),
    };
    Ok(AnalyzeReport {
        e: e.to_string(),
        n,
        two_minus_meas: fmt_rational(&(Rational::from_integer(2.into()) - &meas)),
        meas: fmt_rational(&meas),
        u0: fmt_vec(table.u0()),
        u1: fmt_vec(table.u1()),
        gamma: fmt_rational(table.quanta()),
        tau,
        q_canonical: fmt_vec(table.q_canonical()),
        beta: fmt_rational(table.beta()),
        beta_q: fmt_vec(table.beta_q()),
        t,
        note,
    })
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<CmdOutput, CliError> {
    let e: IntervalSet = args.e.parse()?;
    Ok(CmdOutput {
        code: EXIT_SOLVED,
        stdout: to_json(&analyze_report(&e, args.n)?),
    })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<CmdOutput, CliError> {
    let opts = VerifyOptions {
        n: args.n,
        instances: args.instances,
        seed: args.seed,
        trials: args.trials,
    };
    let reports = run_suite(args.suite, &opts)?;
    let passed = reports.iter().all(|r| r.passed);
    Ok(CmdOutput {
        code: if passed { EXIT_SOLVED } else { EXIT_FAILURE },
        stdout: to_json(&serde_json::json!({ "passed": passed, "suites": reports })),
    })
}

pub fn execute(command: &Command) -> Result<CmdOutput, CliError> {
    match command {
        Command::Solve(a) => cmd_solve(a),
        Command::Cnf(a) => cmd_cnf(a),
        Command::Csp(a) => cmd_csp(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Parses `args`, runs the command, prints its output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_SOLVED };
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("erelax").chain(args.iter().copied()))
    }

    #[test]
    fn restarts_values() {
        assert_eq!("auto".parse::<Restarts>(), Ok(Restarts::Auto));
        assert_eq!("12".parse::<Restarts>(), Ok(Restarts::Fixed(12)));
        assert!("-1".parse::<Restarts>().is_err());
    }

    #[test]
    fn missing_e_is_a_usage_error() {
        let err = parse(&["solve", "--lp", "x.lp"]).unwrap_err();
        assert!(err.use_stderr());
        assert_eq!(run(["erelax", "solve", "--lp", "x.lp"]), EXIT_USAGE);
    }

    #[test]
    fn bogus_suite_is_a_usage_error() {
        assert_eq!(run(["erelax", "verify", "--suite", "bogus"]), EXIT_USAGE);
    }

    #[test]
    fn analyze_e3() {
        let r = analyze_report(&IntervalSet::ksat(3).unwrap(), 5).unwrap();
        assert_eq!(r.beta, "3/4");
        assert_eq!(r.tau.as_deref(), Some("2"));
        assert_eq!(r.gamma, "1/2");
        assert_eq!(r.t, Some(171));
        assert_eq!(r.two_minus_meas, "4/3");
    }

    #[test]
    fn analyze_full_interval_notes_missing_traction() {
        let r = analyze_report(&"0,1".parse().unwrap(), 3).unwrap();
        assert_eq!(r.beta, "1");
        assert_eq!(r.tau, None);
        assert!(r.note.is_some());
    }

    #[test]
    fn error_exit_codes() {
        assert_eq!(CliError::from(DomainError::OrderViolation).exit_code(), EXIT_INPUT);
        assert_eq!(
            CliError::from(CspError::ClauseTooWide { width: 4, k: 3 }).exit_code(),
            EXIT_INPUT
        );
        let budget = WalkError::RestartBudgetTooLarge {
            needed: "10".into(),
            cap: 1,
        };
        assert_eq!(CliError::from(budget).exit_code(), EXIT_USAGE);
    }
}
