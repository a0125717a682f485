//! Command-line front end: `solve`, `sweep` and `validate`.
//!
//! Settings resolve as flag, then `HETFAIR_*` environment variable, then
//! the `--config` TOML file, then the built-in default. Exit codes: 0 on
//! success, 1 on a runtime failure (I/O, a failed validation), 2 on a usage
//! or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::dual_solver::{SolverOptions, SolverReport, StepSchedule};
use crate::error::Error;
use crate::harness::{self, Metric, Scheme, SweepParam, SweepSpec};
use crate::model::{ChannelRealization, NetworkConfig, Topology};
use crate::oracle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hetfair",
    version,
    about = "Max-min fair power allocation and user assignment in two-tier cognitive-radio networks"
)]
pub struct Cli {
    /// Worker threads for sweeps and validation batches (default: all cores).
    #[arg(long, global = true, env = "HETFAIR_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one channel realization with one scheme.
    Solve(SolveArgs),
    /// Run a Monte-Carlo sweep and write CSV (and optionally SVG) output.
    Sweep(SweepArgs),
    /// Compare OAOP against the exhaustive oracle on tiny instances.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeArg {
    Oaop,
    Faop,
    Fafp,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Oaop => Scheme::Oaop,
            SchemeArg::Faop => Scheme::Faop,
            SchemeArg::Fafp => Scheme::Fafp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleArg {
    Constant,
    Diminishing,
}

/// Network and solver settings shared by `solve` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct NetworkArgs {
    /// TOML file with defaults for any of these settings.
    #[arg(long, env = "HETFAIR_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, env = "HETFAIR_USERS")]
    pub users: Option<usize>,
    #[arg(long, env = "HETFAIR_CHANNELS")]
    pub channels: Option<usize>,
    /// Number of base stations including the macro.
    #[arg(long, env = "HETFAIR_BS")]
    pub bs: Option<usize>,
    #[arg(long, env = "HETFAIR_MACRO_POWER")]
    pub macro_power: Option<f64>,
    #[arg(long, env = "HETFAIR_PICO_POWER")]
    pub pico_power: Option<f64>,
    /// Interference threshold at the primary receiver (`inf` disables it).
    #[arg(long, env = "HETFAIR_ITH")]
    pub ith: Option<f64>,
    /// Noise power.
    #[arg(long, env = "HETFAIR_NOISE")]
    pub noise: Option<f64>,
    #[arg(long, env = "HETFAIR_SEED")]
    pub seed: Option<u64>,
    #[arg(long, env = "HETFAIR_MAX_ITERS")]
    pub max_iters: Option<usize>,
    /// Subgradient step size.
    #[arg(long, env = "HETFAIR_STEP")]
    pub step: Option<f64>,
    #[arg(long, value_enum, env = "HETFAIR_SCHEDULE")]
    pub schedule: Option<ScheduleArg>,
    #[arg(long, env = "HETFAIR_TOLERANCE")]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Scheme to run [default: oaop].
    #[arg(long, value_enum, env = "HETFAIR_SCHEME")]
    pub scheme: Option<SchemeArg>,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Write the per-user solution as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the per-iteration multiplier trace as CSV (OAOP/FAOP).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// One of fig2..fig8.
    #[arg(long, conflicts_with_all = ["param", "values"])]
    pub preset: Option<String>,
    /// Swept parameter: pico_power, macro_power, ith or users.
    #[arg(long, requires = "values")]
    pub param: Option<String>,
    /// Comma-separated, strictly increasing sweep values.
    #[arg(long, value_delimiter = ',', requires = "param")]
    pub values: Option<Vec<f64>>,
    #[arg(long, env = "HETFAIR_TRIALS")]
    pub trials: Option<usize>,
    /// Comma-separated subset of oaop,faop,fafp.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub schemes: Option<Vec<SchemeArg>>,
    /// Metric to summarize and plot (default: the preset's, else all).
    #[arg(long, value_delimiter = ',')]
    pub metrics: Option<Vec<String>>,
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Raw per-trial CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-point mean/standard-error CSV (default: `<out>` with `.summary.csv`).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// SVG line chart of the first metric.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    /// Largest accepted relative min-rate shortfall against the oracle.
    #[arg(long, default_value_t = 0.05)]
    pub threshold: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub users: usize,
    #[arg(long, default_value_t = 2)]
    pub channels: usize,
    #[arg(long, default_value_t = 2)]
    pub bs: usize,
    #[arg(long, default_value_t = oracle::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Print a per-instance gap table.
    #[arg(long)]
    pub report: bool,
}

/// Settings accepted in a `--config` file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub users: Option<usize>,
    pub channels: Option<usize>,
    pub bs: Option<usize>,
    pub macro_power: Option<f64>,
    pub pico_power: Option<f64>,
    pub ith: Option<f64>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
    pub step: Option<f64>,
    pub schedule: Option<ScheduleArg>,
    pub tolerance: Option<f64>,
    pub scheme: Option<SchemeArg>,
    pub trials: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::InvalidAssignment(_)
            | Error::InfeasibleAssignment { .. }
            | Error::TooLarge(_)
            | Error::InvalidSweep(_) => CliError::Usage(e.to_string()),
            Error::UndefinedMetric(_) | Error::Io(_) | Error::Csv(_) => CliError::Failure(e.to_string()),
        }
    }
}

impl NetworkArgs {
    fn file(&self) -> Result<FileConfig, CliError> {
        self.config
            .as_deref()
            .map_or(Ok(FileConfig::default()), FileConfig::load)
    }

    /// Merges flags over the file over defaults. `require_users` makes a
    /// missing user count a usage error.
    fn resolve(&self, file: &FileConfig, require_users: bool) -> Result<(NetworkConfig, SolverOptions), CliError> {
        let d = NetworkConfig::default();
        let users = self.users.or(file.users);
        if require_users && users.is_none() {
            return Err(CliError::Usage(
                "--users is required (or set `users` in --config / HETFAIR_USERS)".into(),
            ));
        }
        let config = NetworkConfig {
            num_users: users.unwrap_or(d.num_users),
            num_channels: self.channels.or(file.channels).unwrap_or(d.num_channels),
            num_bs: self.bs.or(file.bs).unwrap_or(d.num_bs),
            macro_power: self.macro_power.or(file.macro_power).unwrap_or(d.macro_power),
            pico_power: self.pico_power.or(file.pico_power).unwrap_or(d.pico_power),
            interference_threshold: self.ith.or(file.ith).unwrap_or(d.interference_threshold),
            noise_psd: self.noise.or(file.noise).unwrap_or(d.noise_psd),
            rng_seed: self.seed.or(file.seed).unwrap_or(d.rng_seed),
        };
        config.validate()?;
        let o = SolverOptions::default();
        let schedule = match self.schedule.or(file.schedule) {
            Some(ScheduleArg::Diminishing) => StepSchedule::Diminishing,
            Some(ScheduleArg::Constant) | None => o.schedule,
        };
        let options = SolverOptions {
            max_iters: self.max_iters.or(file.max_iters).unwrap_or(o.max_iters),
            step: self.step.or(file.step).unwrap_or(o.step),
            tolerance: self.tolerance.or(file.tolerance).unwrap_or(o.tolerance),
            schedule,
            ..o
        };
        if options.max_iters == 0
            || !(options.step.is_finite() && options.step > 0.0)
            || options.tolerance.is_nan()
            || options.tolerance < 0.0
        {
            return Err(CliError::Usage(format!(
                "--max-iters must be positive, --step finite and positive, --tolerance nonnegative; got {}, {}, {}",
                options.max_iters, options.step, options.tolerance
            )));
        }
        Ok((config, options))
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"))
}

fn print_report(
    out: &mut dyn Write,
    scheme: Scheme,
    config: &NetworkConfig,
    report: &SolverReport,
) -> std::io::Result<()> {
    writeln!(out, "scheme: {scheme}")?;
    writeln!(
        out,
        "network: users={} channels={} bs={} macro_power={} pico_power={} ith={} noise={} seed={}",
        config.num_users,
        config.num_channels,
        config.num_bs,
        config.macro_power,
        config.pico_power,
        config.interference_threshold,
        config.noise_psd,
        config.rng_seed
    )?;
    writeln!(out, "min_rate: {:.6}", report.rates.min_rate)?;
    writeln!(out, "sum_throughput: {:.6}", report.rates.sum_rate)?;
    writeln!(out, "pr: {}", fmt_opt(report.rates.pr))?;
    writeln!(out, "iterations: {}", report.iterations)?;
    writeln!(out, "converged: {}", report.converged)?;
    let budget: Vec<String> = report.residuals.budget.iter().map(|r| format!("{r:.6e}")).collect();
    writeln!(out, "budget_residuals: [{}]", budget.join(", "))?;
    writeln!(out, "interference_residual: {:.6e}", report.residuals.interference)?;
    writeln!(out, "feasible: {}", report.residuals.max_violation() <= 1e-9)
}

fn write_solution(path: &Path, report: &SolverReport) -> Result<(), Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["user", "channel", "bs", "power", "rate"])?;
    for (a, slot) in report.assignment.slots().iter().enumerate() {
        w.write_record([
            a.to_string(),
            slot.channel.to_string(),
            slot.bs.to_string(),
            report.powers[a].to_string(),
            report.rates.rates[a].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = args.network.file()?;
    let (config, mut options) = args.network.resolve(&file, true)?;
    let scheme: Scheme = args.scheme.or(file.scheme).unwrap_or(SchemeArg::Oaop).into();
    options.record_trace = args.trace.is_some();
    let topology = Topology::build(&config)?;
    let channels = ChannelRealization::draw(&config);
    let report = scheme.solve(&config, &topology, &channels, &options)?;
    print_report(out, scheme, &config, &report).map_err(|e| CliError::Failure(e.to_string()))?;
    if let Some(path) = &args.out {
        write_solution(path, &report)?;
    }
    if let Some(path) = &args.trace {
        harness::emit_trace_csv(&report.trace, path)?;
    }
    Ok(())
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut spec = match (&args.preset, &args.param, &args.values) {
        (Some(name), _, _) => SweepSpec::preset(name)?,
        (None, Some(param), Some(values)) => SweepSpec::new(param.parse::<SweepParam>()?, values.clone()),
        _ => {
            return Err(CliError::Usage(
                "either --preset or --param with --values is required".into(),
            ))
        }
    };
    let file = args.network.file()?;
    // Presets fix the channel count for user sweeps; explicit flags win.
    let preset_channels = spec.base.num_channels;
    let (mut base, options) = args.network.resolve(&file, false)?;
    if args.network.channels.or(file.channels).is_none() {
        base.num_channels = preset_channels;
    }
    spec.base = base;
    spec.base_seed = spec.base.rng_seed;
    spec.options = options;
    if let Some(t) = args.trials.or(file.trials) {
        spec.trials = t;
    }
    if let Some(s) = &args.schemes {
        spec.schemes = s.iter().map(|&s| s.into()).collect();
    }
    if let Some(m) = &args.metrics {
        spec.metrics = m.iter().map(|s| s.parse::<Metric>()).collect::<Result<_, _>>()?;
    }
    let result = harness::run_sweep(&spec)?;
    harness::emit_csv(&result, &args.out)?;
    let summary = args.summary.clone().unwrap_or_else(|| summary_path(&args.out));
    harness::emit_summary_csv(&result, &summary)?;
    if let Some(path) = &args.plot {
        harness::emit_plot(&result, spec.metrics.first().copied().unwrap_or(Metric::Pr), path)?;
    }
    let io = |e: std::io::Error| CliError::Failure(e.to_string());
    writeln!(
        out,
        "sweep: {} over {:?}, {} trials",
        spec.param, spec.values, spec.trials
    )
    .map_err(io)?;
    for s in &result.summary {
        writeln!(
            out,
            "{}={} {} {}: {}",
            spec.param,
            s.value,
            s.scheme,
            s.metric,
            s.stat.map_or_else(
                || "n/a".to_string(),
                |st| format!("{:.6} ± {:.6}", st.mean, st.std_error)
            )
        )
        .map_err(io)?;
    }
    for g in &result.gaps {
        writeln!(
            out,
            "{}={} {} gap {}-{}: {:.2}%",
            spec.param, g.value, g.metric, g.first, g.second, g.gap_percent
        )
        .map_err(io)?;
    }
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        writeln!(out, "failed solves: {failed}").map_err(io)?;
    }
    writeln!(out, "wrote {} rows to {}", result.rows.len(), args.out.display()).map_err(io)
}

/// Result of an oracle comparison batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOutcome {
    pub instances: usize,
    /// Largest relative min-rate shortfall of OAOP against the oracle.
    pub worst_gap: f64,
    pub within_threshold: usize,
    pub per_instance: Vec<InstanceGap>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceGap {
    pub seed: u64,
    pub oracle_min_rate: f64,
    pub oaop_min_rate: f64,
    pub gap: f64,
}

pub fn run_validation(args: &ValidateArgs) -> Result<ValidationOutcome, Error> {
    use rayon::prelude::*;
    let base = NetworkConfig {
        num_users: args.users,
        num_channels: args.channels,
        num_bs: args.bs,
        ..Default::default()
    };
    base.validate()?;
    oracle::check_guard(&base, args.grid)?;
    let options = SolverOptions {
        max_iters: args.max_iters,
        ..Default::default()
    };
    let per_instance: Vec<InstanceGap> = (0..args.instances)
        .into_par_iter()
        .map(|i| {
            let config = NetworkConfig {
                rng_seed: harness::cell_seed(args.seed, 0, i),
                ..base.clone()
            };
            let topology = Topology::build(&config)?;
            let channels = ChannelRealization::draw(&config);
            let best = oracle::brute_force_maxmin(&config, &topology, &channels, args.grid)?;
            let ours = crate::dual_solver::solve_oaop(&config, &topology, &channels, &options)?;
            let reference = best.rates.min_rate;
            let gap = if reference > 0.0 {
                ((reference - ours.rates.min_rate) / reference).max(0.0)
            } else {
                0.0
            };
            Ok(InstanceGap {
                seed: config.rng_seed,
                oracle_min_rate: reference,
                oaop_min_rate: ours.rates.min_rate,
                gap,
            })
        })
        .collect::<Result<_, Error>>()?;
    Ok(ValidationOutcome {
        instances: args.instances,
        worst_gap: per_instance.iter().map(|g| g.gap).fold(0.0, f64::max),
        within_threshold: per_instance.iter().filter(|g| g.gap <= args.threshold).count(),
        per_instance,
    })
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.threshold.is_nan() || args.threshold < 0.0 {
        return Err(CliError::Usage(format!(
            "--threshold must be nonnegative, got {}",
            args.threshold
        )));
    }
    let outcome = run_validation(args)?;
    let io = |e: std::io::Error| CliError::Failure(e.to_string());
    if args.report {
        writeln!(
            out,
            "{:>5} {:>20} {:>12} {:>12} {:>8}",
            "index", "seed", "oracle", "oaop", "gap"
        )
        .map_err(io)?;
        for (i, g) in outcome.per_instance.iter().enumerate() {
            writeln!(
                out,
                "{i:>5} {:>20} {:>12.6} {:>12.6} {:>8.4}",
                g.seed, g.oracle_min_rate, g.oaop_min_rate, g.gap
            )
            .map_err(io)?;
        }
    }
    writeln!(out, "instances: {}", outcome.instances).map_err(io)?;
    writeln!(out, "within_threshold: {}", outcome.within_threshold).map_err(io)?;
    writeln!(out, "worst_gap: {:.6}", outcome.worst_gap).map_err(io)?;
    if outcome.worst_gap <= args.threshold {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "worst relative gap {:.4} exceeds threshold {}",
            outcome.worst_gap, args.threshold
        )))
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            let _ = writeln!(err, "error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            let _ = writeln!(err, "run with --help for usage");
            EXIT_USAGE
        }
        Err(CliError::Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}
