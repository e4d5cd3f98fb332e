//! Command-line front end: `simulate`, `decay`, `converge` and `selfcheck`.
//!
//! Exit codes: 0 on success, 2 on a usage error, 1 on a runtime failure
//! (solver non-convergence, I/O).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{
    convergence_study, decay_rate, run_simulation, write_records_csv, write_table_csv,
    ConvergenceStudyConfig, Scheme, SimulationConfig, SimulationRun, DEFAULT_DECAY_WINDOW,
};
use crate::grid::{GridFunction, InitialProfile};
use crate::selfcheck;

/// Entropy exponents reported in time-series files.
const REPORTED_ALPHAS: [f64; 4] = [1.0, 1.1, 1.2, 1.3];

#[derive(Debug, Parser)]
#[command(name = "dlss", version, about = "Structure-preserving solvers for the DLSS equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scheme and write its diagnostic time series.
    Simulate(RunArgs),
    /// Run one scheme and fit exponential decay to F_d and E^rel_1.2.
    Decay(RunArgs),
    /// Temporal convergence study against a small-step reference solution.
    Converge(ConvergeArgs),
    /// Randomized checks of the discrete identities.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Args)]
struct SchemeArgs {
    /// bdf2-fd, dvd, bdf2-dvd or bdf3-dvd
    #[arg(long, default_value = "dvd", value_parser = parse_scheme)]
    scheme: Scheme,
    /// Entropy exponent of the bdf2-fd scheme [default: 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// Initial datum: cos16, constant, constant:VALUE or file:PATH
    #[arg(long, default_value = "cos16", value_parser = parse_initial)]
    initial: InitialProfile,
    /// Rescale the initial datum to unit mass
    #[arg(long)]
    normalize: bool,
    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: SchemeArgs,
    /// Number of grid cells
    #[arg(long = "N", default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1e-6)]
    tau: f64,
    #[arg(long = "t-end", default_value_t = 1e-3)]
    t_end: f64,
    /// Record every k-th step
    #[arg(long = "record-every", default_value_t = 1)]
    record_every: usize,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: SchemeArgs,
    #[arg(long = "N", default_value_t = 100)]
    n: usize,
    /// Comparison time
    #[arg(long = "t-cmp", default_value_t = 5e-5)]
    t_cmp: f64,
    /// Comma-separated test steps
    #[arg(long = "tau-list", value_delimiter = ',', default_values_t = [5e-6, 2.5e-6, 1.25e-6, 6.25e-7])]
    tau_list: Vec<f64>,
    /// Reference step
    #[arg(long = "tau-ref", default_value_t = 1e-8)]
    tau_ref: f64,
}

#[derive(Debug, Args)]
struct SelfcheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_initial(s: &str) -> std::result::Result<InitialProfile, String> {
    if s == "cos16" {
        return Ok(InitialProfile::Cos16);
    }
    if s == "constant" {
        return Ok(InitialProfile::Constant(1.0));
    }
    if let Some(c) = s.strip_prefix("constant:") {
        return c
            .parse()
            .map(InitialProfile::Constant)
            .map_err(|_| format!("invalid constant '{c}'"));
    }
    if let Some(path) = s.strip_prefix("file:") {
        return GridFunction::read_csv(path)
            .map(|g| InitialProfile::Values(g.into_values()))
            .map_err(|e| format!("cannot read '{path}': {e}"));
    }
    Err(format!("unknown initial datum '{s}' (expected cos16, constant, constant:VALUE or file:PATH)"))
}

impl SchemeArgs {
    fn alpha(&self) -> Result<Option<f64>> {
        match (self.scheme.takes_alpha(), self.alpha) {
            (true, a) => Ok(Some(a.unwrap_or(1.0))),
            (false, None) => Ok(None),
            (false, Some(_)) => Err(Error::invalid(format!(
                "--alpha applies to bdf2-fd only, not {}",
                self.scheme
            ))),
        }
    }
}

impl RunArgs {
    fn config(&self) -> Result<SimulationConfig> {
        let mut cfg = SimulationConfig::new(self.common.scheme, self.n, self.tau, self.t_end);
        cfg.alpha = self.common.alpha()?;
        cfg.initial = self.common.initial.clone();
        cfg.normalize = self.common.normalize;
        cfg.record_every = self.record_every;
        cfg.entropy_alphas = REPORTED_ALPHAS.to_vec();
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn simulate(args: &RunArgs, out: &mut impl Write) -> Result<SimulationRun> {
    let cfg = args.config()?;
    let run = run_simulation(&cfg)?;
    if let Some(path) = &args.common.out {
        write_records_csv(&run.records, &cfg.entropy_alphas, output(path)?)?;
    }
    if let Some(last) = run.last() {
        writeln!(
            out,
            "{}: {} records, final t = {:.6e}, final Fd = {:.10e}, mass = {:.16e}",
            cfg.scheme,
            run.records.len(),
            last.t,
            last.fd,
            last.mass
        )?;
    }
    Ok(run)
}

fn finish(run: SimulationRun) -> Result<()> {
    match run.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn decay(args: &RunArgs, out: &mut impl Write) -> Result<()> {
    let run = simulate(args, out)?;
    if run.completed() {
        for column in ["Fd", "Erel_1.2"] {
            let fit = decay_rate(&run.records, column, DEFAULT_DECAY_WINDOW)?;
            writeln!(
                out,
                "{column}: decay slope {:.6e}, r^2 = {:.10}, {} points",
                fit.slope, fit.r_squared, fit.points
            )?;
        }
    }
    finish(run)
}

fn converge(args: &ConvergeArgs, out: &mut impl Write) -> Result<()> {
    let mut cfg = ConvergenceStudyConfig::new(args.common.scheme, args.n);
    cfg.alpha = args.common.alpha()?;
    cfg.initial = args.common.initial.clone();
    cfg.normalize = args.common.normalize;
    cfg.t_cmp = args.t_cmp;
    cfg.tau_list = args.tau_list.clone();
    cfg.tau_ref = args.tau_ref;
    let table = convergence_study(&cfg)?;
    if let Some(path) = &args.common.out {
        write_table_csv(&table, output(path)?)?;
    }
    for (tau, err) in &table.rows {
        writeln!(out, "tau = {tau:.6e}  error = {err:.6e}")?;
    }
    writeln!(out, "{}: convergence rate {:.3}", table.scheme, table.rate)?;
    Ok(())
}

fn selfcheck_cmd(args: &SelfcheckArgs, out: &mut impl Write) -> Result<bool> {
    let results = selfcheck::run_all(args.seed);
    for r in &results {
        writeln!(out, "{}", r.summary())?;
    }
    Ok(results.iter().all(|r| r.passed()))
}

fn exit_code(res: Result<()>) -> i32 {
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Summaries go to `out`, diagnostics to stderr.
pub fn parse_and_dispatch_to<I, T>(argv: I, out: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match &cli.command {
        Command::Simulate(a) => exit_code(simulate(a, out).and_then(finish)),
        Command::Decay(a) => exit_code(decay(a, out)),
        Command::Converge(a) => exit_code(converge(a, out)),
        Command::Selfcheck(a) => match selfcheck_cmd(a, out) {
            Ok(true) => 0,
            Ok(false) => 1,
            Err(e) => exit_code(Err(e)),
        },
    }
}

/// [`parse_and_dispatch_to`] writing to standard output.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    parse_and_dispatch_to(argv, &mut lock)
}
