//! Subcommands of the `caratheodory` binary. Each one returns a [`RunReport`]
//! plus a plain-text summary; `main` only prints them and sets the exit code.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use caratheodory::herglotz::{self, RecoverOptions};
use caratheodory::io::{self, FunctionFile, MeasureFile, SamplesFile};
use caratheodory::kernel::{self, SampleSet};
use caratheodory::linalg::{self, ComplexMatrix};
use caratheodory::{random, realization, selftest, Error};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "caratheodory", version, about = "Positive kernels, realizations and Herglotz measures of Carathéodory functions")]
pub struct Cli {
    /// Print the JSON run report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON run report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify positivity of k_φ on a sample set and count negative squares.
    CheckKernel(CheckKernelArgs),
    /// Synthesize an isometric realization from sampled values.
    Realize(RealizeArgs),
    /// Herglotz measures: recover, evaluate, round trip.
    #[command(subcommand)]
    Herglotz(HerglotzCommand),
    /// Run the randomized invariant suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct CheckKernelArgs {
    /// Function spec (JSON).
    pub spec: PathBuf,
    /// Sample set (JSON).
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub samples: Option<PathBuf>,
    /// Use N random points (the origin first) instead of a samples file.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative eigenvalue tolerance.
    #[arg(long, default_value_t = kernel::DEFAULT_KERNEL_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    /// Samples file with `values`.
    pub samples: PathBuf,
    /// Held-out samples with `values`, compared against the realization.
    #[arg(long)]
    pub holdout: Option<PathBuf>,
    /// Where to write the realization.
    #[arg(long, default_value = "realization.json")]
    pub out: PathBuf,
    /// Largest accepted holdout relative error.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
}

#[derive(Debug, Subcommand)]
pub enum HerglotzCommand {
    /// Recover a measure from a function spec.
    Recover(RecoverArgs),
    /// Evaluate a measure file at points of the disk.
    Eval(EvalArgs),
    /// Evaluate a measure, recover it again and compare moments.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Args, Clone)]
pub struct ScheduleArgs {
    /// Comma-separated radii in (0, 1); default 1 − 2^{−n}, n = 3..12.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Density cells on [0, 2π] (a power of two).
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Highest trigonometric moment in the table.
    #[arg(long, default_value_t = 8)]
    pub moments: usize,
}

impl ScheduleArgs {
    fn options(&self) -> RecoverOptions {
        let mut o = RecoverOptions { cells: self.grid, ..RecoverOptions::default() };
        if let Some(r) = &self.radii {
            o.radii = r.clone();
        }
        o
    }

    fn describe(&self) -> String {
        format!("radii={:?} grid={} moments={}", self.radii, self.grid, self.moments)
    }
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// Function spec (JSON).
    pub spec: PathBuf,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[arg(long, default_value = "measure.json")]
    pub out: PathBuf,
    /// Also write the moment table here.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Largest accepted validation error of the recovered measure.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Measure file (JSON).
    pub measure: PathBuf,
    /// Point `re` or `re,im`; repeatable.
    #[arg(long = "at", value_name = "Z", required = true, allow_hyphen_values = true)]
    pub at: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    /// Measure file; omit with `--random`.
    #[arg(required_unless_present = "random")]
    pub measure: Option<PathBuf>,
    /// Use a random measure instead.
    #[arg(long, conflicts_with = "measure")]
    pub random: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Size of the random measure.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// At most this many atoms in the random measure.
    #[arg(long, default_value_t = 2)]
    pub atoms: usize,
    /// Density cells of the random measure.
    #[arg(long, default_value_t = 256)]
    pub cells: usize,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Write the recovered measure here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Largest accepted moment deviation (spectral norm).
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// One of core, kernel, stieltjes, helly, realization, herglotz, full.
    #[arg(long, default_value = "full")]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Pass,
    Fail,
    Error,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Error => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the input file contents and the non-path arguments.
    pub inputs_digest: String,
    pub outcome: Outcome,
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
    pub version: String,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// A finished run: the report and the text summary.
#[derive(Debug, Clone)]
pub struct Run {
    pub report: RunReport,
    pub summary: String,
}

/// Failure of a command before it produced a verdict of its own.
struct Failure {
    outcome: Outcome,
    message: String,
    witness: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let witness = match &e {
            Error::NotPositive { min_eigenvalue, witness } => Some(json!({"min_eigenvalue": min_eigenvalue, "vector": witness})),
            Error::IndefiniteGram { n_negative, min_eigenvalue } => {
                Some(json!({"n_negative": n_negative, "min_eigenvalue": min_eigenvalue}))
            }
            Error::RelationDefect { defect, limit } => Some(json!({"relation_defect": defect, "limit": limit})),
            Error::BoundViolated { member, t, witness } => Some(json!({"member": member, "t": t, "vector": witness})),
            Error::NotCaratheodory { r, t, min_eigenvalue } => Some(json!({"r": r, "t": t, "min_eigenvalue": min_eigenvalue})),
            Error::NotIncreasing { t, min_eigenvalue } => Some(json!({"t": t, "min_eigenvalue": min_eigenvalue})),
            Error::SelectionFailed(m) | Error::NotConverged(m) => Some(json!({"reason": m})),
            _ => None,
        };
        let outcome = if witness.is_some() { Outcome::Fail } else { Outcome::Error };
        Failure { outcome, message, witness }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure { outcome: Outcome::Error, message: format!("{}: {e}", path.display()), witness: None }
}

/// Accumulates what a command reads, measures and writes.
struct Ctx {
    command: String,
    hasher: Sha256,
    metrics: BTreeMap<String, f64>,
    artifacts: Vec<String>,
    seed: Option<u64>,
    summary: String,
}

impl Ctx {
    fn new(command: &str) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        Self {
            command: command.to_string(),
            hasher,
            metrics: BTreeMap::new(),
            artifacts: Vec::new(),
            seed: None,
            summary: String::new(),
        }
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        String::from_utf8(bytes)
            .map_err(|_| Failure { outcome: Outcome::Error, message: format!("{}: not UTF-8", path.display()), witness: None })
    }

    fn parse<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T, Failure> {
        let text = self.read(path)?;
        io::from_json(&text).map_err(|e| Failure { outcome: Outcome::Error, message: format!("{}: {e}", path.display()), witness: None })
    }

    fn param(&mut self, text: &str) {
        self.hasher.update(b"\0");
        self.hasher.update(text.as_bytes());
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    fn write(&mut self, path: &Path, contents: &str) -> Result<(), Failure> {
        std::fs::write(path, contents).map_err(|e| io_error(path, e))?;
        self.artifacts.push(path.display().to_string());
        Ok(())
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    fn finish(self, outcome: Outcome, witness: Option<Value>, message: Option<String>) -> Run {
        let mut summary = self.summary;
        if let Some(m) = &message {
            let _ = writeln!(summary, "{m}");
        }
        let _ = writeln!(summary, "{}: {}", self.command, outcome.label());
        let report = RunReport {
            command: self.command,
            inputs_digest: format!("{:x}", self.hasher.finalize()),
            outcome,
            metrics: self.metrics,
            artifacts: self.artifacts,
            version: VERSION.to_string(),
            seed: self.seed,
            witness,
            message,
        };
        Run { report, summary }
    }
}

/// Runs one parsed command line.
pub fn execute(cli: &Cli) -> Run {
    let name = match &cli.command {
        Command::CheckKernel(_) => "check-kernel",
        Command::Realize(_) => "realize",
        Command::Herglotz(HerglotzCommand::Recover(_)) => "herglotz recover",
        Command::Herglotz(HerglotzCommand::Eval(_)) => "herglotz eval",
        Command::Herglotz(HerglotzCommand::Roundtrip(_)) => "herglotz roundtrip",
        Command::Selftest(_) => "selftest",
    };
    let mut ctx = Ctx::new(name);
    let verdict = match &cli.command {
        Command::CheckKernel(a) => check_kernel(&mut ctx, a),
        Command::Realize(a) => realize(&mut ctx, a),
        Command::Herglotz(HerglotzCommand::Recover(a)) => recover(&mut ctx, a),
        Command::Herglotz(HerglotzCommand::Eval(a)) => eval(&mut ctx, a),
        Command::Herglotz(HerglotzCommand::Roundtrip(a)) => roundtrip(&mut ctx, a),
        Command::Selftest(a) => run_selftest(&mut ctx, a),
    };
    match verdict {
        Ok((Outcome::Pass, _)) => ctx.finish(Outcome::Pass, None, None),
        Ok((outcome, witness)) => ctx.finish(outcome, Some(witness.unwrap_or(Value::Null)), None),
        Err(f) => {
            let witness = match f.outcome {
                Outcome::Fail => Some(f.witness.unwrap_or_else(|| json!({"reason": f.message.clone()}))),
                _ => f.witness,
            };
            ctx.finish(f.outcome, witness, Some(f.message))
        }
    }
}

type Verdict = Result<(Outcome, Option<Value>), Failure>;

fn pass_or_fail(pass: bool, witness: Value) -> Verdict {
    Ok(if pass { (Outcome::Pass, None) } else { (Outcome::Fail, Some(witness)) })
}

fn check_kernel(ctx: &mut Ctx, a: &CheckKernelArgs) -> Verdict {
    let spec: FunctionFile = ctx.parse(&a.spec)?;
    let phi = spec.to_function()?;
    let set = match (&a.samples, a.random) {
        (Some(path), _) => {
            let file: SamplesFile = ctx.parse(path)?;
            file.sample_set()?
        }
        (None, Some(count)) => {
            ctx.seed = Some(a.seed);
            ctx.param(&format!("random={count} seed={}", a.seed));
            let mut rng = random::rng(a.seed);
            SampleSet::new(random::disk_points(&mut rng, count, 0.0, 0.95, true))?
        }
        (None, None) => unreachable!("clap requires --samples or --random"),
    };
    ctx.param(&format!("tol={}", a.tol));
    let family = [set];
    let report = kernel::certify_positive_kernel_with(&phi, &family, a.tol)?;
    let n_negative = kernel::negative_squares_estimate(&phi, &family)?;
    ctx.metric("grams_checked", report.grams_checked as f64);
    ctx.metric("worst_eigenvalue", report.worst_eigenvalue);
    ctx.metric("worst_relative_eigenvalue", report.worst_relative_eigenvalue);
    ctx.metric("n_negative", n_negative as f64);
    ctx.metric("points", family[0].len() as f64);
    ctx.line(format!("points: {}", family[0].len()));
    ctx.line(format!("min eigenvalue: {:.6e} (relative {:.6e})", report.worst_eigenvalue, report.worst_relative_eigenvalue));
    ctx.line(format!("negative squares: {n_negative}"));
    pass_or_fail(
        report.pass,
        json!({
            "n_negative": n_negative,
            "min_eigenvalue": report.worst_eigenvalue,
            "set": report.worst_set,
            "vector": report.witness.as_ref().map(linalg::to_pairs),
        }),
    )
}

fn relative_error(got: &ComplexMatrix, want: &ComplexMatrix) -> f64 {
    linalg::spectral_norm(&(got - want)) / (1.0 + linalg::spectral_norm(want))
}

fn realize(ctx: &mut Ctx, a: &RealizeArgs) -> Verdict {
    let file: SamplesFile = ctx.parse(&a.samples)?;
    let points = file.points();
    let values = file.values()?;
    ctx.param(&format!("tolerance={}", a.tolerance));
    let syn = realization::synthesize(&points, &values)?;
    let r = &syn.realization;
    ctx.metric("isometry_defect", r.isometry_defect());
    ctx.metric("skew_defect", r.skew_defect());
    ctx.metric("relation_defect", syn.relation.defect);
    ctx.metric("section_rank", syn.section_rank as f64);
    ctx.metric("domain_rank", syn.relation.domain_rank as f64);
    ctx.metric("gram_condition", syn.gram_condition);
    ctx.metric("adjoint_defect", syn.adjoint_defect);
    ctx.line(format!("state dimension {}, relation defect {:.3e}", r.state_dim(), syn.relation.defect));
    ctx.line(format!("isometry defect {:.3e}, skew defect {:.3e}", r.isometry_defect(), r.skew_defect()));
    let mut pass = true;
    let mut witness = Value::Null;
    if let Some(path) = &a.holdout {
        let hold: SamplesFile = ctx.parse(path)?;
        let hold_values = hold.values()?;
        let mut worst = (0.0_f64, 0usize);
        for (k, (z, want)) in hold.points().iter().zip(&hold_values).enumerate() {
            let e = relative_error(&r.evaluate(*z)?, want);
            if e > worst.0 {
                worst = (e, k);
            }
        }
        ctx.metric("holdout_max_relative_error", worst.0);
        ctx.line(format!("holdout max relative error {:.3e}", worst.0));
        if worst.0 > a.tolerance {
            pass = false;
            witness = json!({"holdout_index": worst.1, "relative_error": worst.0, "tolerance": a.tolerance});
        }
    }
    ctx.write(&a.out, &io::realization_to_json(r)?)?;
    pass_or_fail(pass, witness)
}

fn moment_table(ctx: &mut Ctx, moments: &[ComplexMatrix], reference: Option<&[ComplexMatrix]>) -> String {
    let mut out = String::from(if reference.is_some() { "k norm deviation\n" } else { "k norm\n" });
    for (k, m) in moments.iter().enumerate() {
        let norm = linalg::spectral_norm(m);
        ctx.metric(&format!("moment_{k}_norm"), norm);
        match reference {
            Some(r) => {
                let dev = linalg::spectral_norm(&(m - &r[k]));
                ctx.metric(&format!("moment_{k}_deviation"), dev);
                let _ = writeln!(out, "{k} {norm:.12e} {dev:.6e}");
            }
            None => {
                let _ = writeln!(out, "{k} {norm:.12e}");
            }
        }
    }
    out
}

fn recovery_metrics(ctx: &mut Ctx, rec: &herglotz::Recovery) {
    ctx.metric("radius", rec.radius);
    ctx.metric("validation_error", rec.validation_error);
    ctx.metric("atoms", rec.measure.atoms().len() as f64);
    ctx.metric("selected_stages", rec.selection.subsequence.len() as f64);
    ctx.metric("selection_max_residual", rec.selection.max_residual);
    let lo = rec.stages.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min);
    ctx.metric("min_stage_eigenvalue", lo);
    ctx.line(format!(
        "stages {} (selected {:?}), radius {}, atoms {}",
        rec.stages.len(),
        rec.selection.subsequence,
        rec.radius,
        rec.measure.atoms().len()
    ));
    for atom in rec.measure.atoms() {
        ctx.line(format!("  atom t={:.6} trace={:.6e}", atom.t, linalg::trace_re(&atom.mass)));
    }
    ctx.line(format!("validation error {:.3e}", rec.validation_error));
}

fn recover(ctx: &mut Ctx, a: &RecoverArgs) -> Verdict {
    let spec: FunctionFile = ctx.parse(&a.spec)?;
    let phi = spec.to_function()?;
    ctx.param(&a.schedule.describe());
    ctx.param(&format!("tolerance={}", a.tolerance));
    let rec = herglotz::recover(&phi, &a.schedule.options())?;
    recovery_metrics(ctx, &rec);
    let table = moment_table(ctx, &rec.measure.trig_moments(a.schedule.moments), None);
    ctx.line(table.trim_end());
    ctx.write(&a.out, &io::measure_to_json(&rec.measure)?)?;
    if let Some(path) = &a.table {
        ctx.write(path, &table)?;
    }
    pass_or_fail(
        rec.validation_error <= a.tolerance,
        json!({"validation_error": rec.validation_error, "tolerance": a.tolerance}),
    )
}

fn parse_point(text: &str) -> Result<Complex64, Failure> {
    let bad = || Failure { outcome: Outcome::Error, message: format!("cannot parse point `{text}`; expected `re` or `re,im`"), witness: None };
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

fn format_matrix(m: &ComplexMatrix) -> String {
    let fmt = |z: Complex64| {
        if z.im == 0.0 {
            format!("{}", z.re)
        } else {
            format!("{}{:+}i", z.re, z.im)
        }
    };
    if m.nrows() == 1 && m.ncols() == 1 {
        return fmt(m[(0, 0)]);
    }
    let rows: Vec<String> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| fmt(m[(i, j)])).collect::<Vec<_>>().join(", ")).collect();
    format!("[[{}]]", rows.join("], ["))
}

fn eval(ctx: &mut Ctx, a: &EvalArgs) -> Verdict {
    let file: MeasureFile = ctx.parse(&a.measure)?;
    let mu = file.to_measure()?;
    for (k, text) in a.at.iter().enumerate() {
        let z = parse_point(text)?;
        ctx.param(&format!("at={}", text));
        let v = mu.eval(z)?;
        for i in 0..v.nrows() {
            for j in 0..v.ncols() {
                ctx.metric(&format!("value_{k}_{i}{j}_re"), v[(i, j)].re);
                ctx.metric(&format!("value_{k}_{i}{j}_im"), v[(i, j)].im);
            }
        }
        ctx.line(format!("phi({}) = {}", format_matrix(&linalg::scalar_matrix(z)), format_matrix(&v)));
    }
    Ok((Outcome::Pass, None))
}

fn roundtrip(ctx: &mut Ctx, a: &RoundtripArgs) -> Verdict {
    let mu = match &a.measure {
        Some(path) => {
            let file: MeasureFile = ctx.parse(path)?;
            file.to_measure()?
        }
        None => {
            ctx.seed = Some(a.seed);
            ctx.param(&format!("random seed={} dim={} atoms={} cells={}", a.seed, a.dim, a.atoms, a.cells));
            if a.dim == 0 || a.cells == 0 {
                return Err(Error::Precondition("--dim and --cells must be positive".into()).into());
            }
            let mut rng = random::rng(a.seed);
            random::measure(&mut rng, a.dim, a.atoms, a.cells)
        }
    };
    ctx.param(&a.schedule.describe());
    ctx.param(&format!("tolerance={}", a.tolerance));
    ctx.line(format!("source: dim {}, {} atoms, {} density cells", mu.dim(), mu.atoms().len(), mu.density().len()));
    let rec = herglotz::recover(&mu.as_function(), &a.schedule.options())?;
    recovery_metrics(ctx, &rec);
    let want = mu.trig_moments(a.schedule.moments);
    let got = rec.measure.trig_moments(a.schedule.moments);
    let dev = herglotz::moment_deviation(&got, &want);
    ctx.metric("max_moment_deviation", dev);
    let table = moment_table(ctx, &got, Some(&want));
    ctx.line(table.trim_end());
    ctx.line(format!("max moment deviation {dev:.3e}"));
    if let Some(path) = &a.out {
        ctx.write(path, &io::measure_to_json(&rec.measure)?)?;
    }
    if let Some(path) = &a.table {
        ctx.write(path, &table)?;
    }
    let worst = (0..want.len()).max_by(|&i, &j| {
        linalg::spectral_norm(&(&got[i] - &want[i])).total_cmp(&linalg::spectral_norm(&(&got[j] - &want[j])))
    });
    pass_or_fail(dev <= a.tolerance, json!({"moment": worst, "deviation": dev, "tolerance": a.tolerance}))
}

fn run_selftest(ctx: &mut Ctx, a: &SelftestArgs) -> Verdict {
    ctx.seed = Some(a.seed);
    ctx.param(&format!("suite={} seed={}", a.suite, a.seed));
    let report = selftest::run(&a.suite, a.seed)?;
    for c in &report.checks {
        let key = format!("{}.{}", c.suite, c.name.replace(' ', "_"));
        ctx.metric(&format!("{key}.worst"), c.worst);
        ctx.metric(&format!("{key}.passed"), c.passed as f64);
        ctx.metric(&format!("{key}.trials"), c.trials as f64);
    }
    ctx.line(report.table().trim_end());
    ctx.line(format!("{}/{} checks passed", report.passed(), report.checks.len()));
    let failing: Vec<Value> = report
        .checks
        .iter()
        .filter(|c| !c.pass())
        .map(|c| json!({"suite": c.suite, "check": c.name, "detail": c.detail, "worst": c.worst, "limit": c.limit}))
        .collect();
    pass_or_fail(report.pass(), Value::Array(failing))
}

/// Caps the global rayon pool from `CARATHEODORY_NUM_THREADS`.
pub fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("CARATHEODORY_NUM_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CARATHEODORY_NUM_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}
