//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input or domain error, 3 I/O failure,
//! 4 numerical convergence failure. `DETCAL_THREADS` sets the worker count.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{figure_curves, find_curve_crossover, reproduce_figure, sweep_curves, threshold_report, CurveSpec};
use crate::engine::fisher_repeated;
use crate::error::{Error, Result};
use crate::montecarlo::{validate_crb, EstimationRun};
use crate::types::{DarkCount, DetectorModel, Efficiency};

use config::{check_grid, default_label, parse_probe, GridSpec, OutputFormat, SweepSpec};
use output::{table_from_curves, write_csv, write_json};

pub const THREADS_ENV: &str = "DETCAL_THREADS";

#[derive(Debug, Parser)]
#[command(name = "detcal", version, about = "Fisher information and Cramér–Rao bounds for detector-efficiency calibration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fisher information at one η (JSON), or along an η grid (CSV/JSON).
    Fisher(FisherArgs),
    /// Curves of comparison figure 1, 2, 3 or 4.
    Figure(FigureArgs),
    /// Curves described by a TOML sweep specification.
    Sweep(SweepArgs),
    /// η at which two curves cross.
    Crossover(CrossoverArgs),
    /// Heralding efficiency at which a heralded photon matches a reference.
    Threshold(ThresholdArgs),
    /// Monte Carlo check of the Cramér–Rao bound.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    /// onoff, koutcome:K or homodyne
    #[arg(long)]
    pub detector: String,
    /// Dark-count exponent δ (on/off only)
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
}

impl DetectorArgs {
    fn model(&self) -> Result<DetectorModel> {
        DetectorModel::parse(&self.detector, DarkCount::new(self.delta)?)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct FisherArgs {
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// fock:N, coherent:NBAR, heralded:XI or mixture:FILE
    #[arg(long)]
    pub probe: String,
    #[arg(long, conflicts_with = "eta_grid", required_unless_present = "eta_grid")]
    pub eta: Option<f64>,
    /// START:STOP:COUNT
    #[arg(long)]
    pub eta_grid: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub repetitions: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    pub figure: u8,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub spec: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CrossoverArgs {
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[arg(long)]
    pub probe_a: String,
    #[arg(long, default_value_t = 1)]
    pub repetitions_a: u32,
    #[arg(long)]
    pub probe_b: String,
    #[arg(long, default_value_t = 1)]
    pub repetitions_b: u32,
    /// LO:HI
    #[arg(long, default_value = "0.01:0.99")]
    pub bracket: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[arg(long, default_value = "coherent:1")]
    pub reference: String,
    /// Evaluation η; defaults to 1 for on/off and 1 − 1e-4 otherwise
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[arg(long)]
    pub probe: String,
    #[arg(long)]
    pub eta: f64,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 500)]
    pub replicates: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Single Fisher value as printed by `fisher --eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FisherOutput {
    pub probe: String,
    pub detector: String,
    pub eta: f64,
    pub repetitions: u32,
    #[serde(flatten)]
    pub result: crate::fisher::FisherResult,
}

/// Runs the tool and returns its exit code. Errors are printed to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        Error::ConvergenceFailure { .. } => 4,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV}={v} is not a positive integer")))?;
    // a global pool that already exists (repeated in-process runs) is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Fisher(a) => cmd_fisher(&a),
        Command::Figure(a) => cmd_figure(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Crossover(a) => cmd_crossover(&a),
        Command::Threshold(a) => cmd_threshold(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    }
}

fn cmd_fisher(a: &FisherArgs) -> Result<()> {
    let detector = a.detector.model()?;
    let probe = parse_probe(&a.probe, None)?;
    match (&a.eta, &a.eta_grid) {
        (Some(eta), _) => {
            let result = fisher_repeated(&probe, &detector, Efficiency::new(*eta)?, a.repetitions)?;
            let out = FisherOutput {
                probe: a.probe.clone(),
                detector: detector.to_string(),
                eta: *eta,
                repetitions: a.repetitions,
                result,
            };
            emit_json(&out, a.output.out.as_deref())
        }
        (None, Some(grid)) => {
            let grid = GridSpec::parse(grid)?.points()?;
            let curves = [CurveSpec::new(default_label(&a.probe, a.repetitions), probe, detector, a.repetitions)];
            check_grid(&curves, &grid)?;
            emit_table(&sweep_curves(&curves, &grid)?, &a.output)
        }
        (None, None) => Err(Error::Config("either --eta or --eta-grid is required".into())),
    }
}

fn cmd_figure(a: &FigureArgs) -> Result<()> {
    figure_curves(a.figure)?;
    emit_table(&reproduce_figure(a.figure)?, &a.output)
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let spec = SweepSpec::load(&a.spec)?;
    let curves = spec.curves(a.spec.parent())?;
    let grid = spec.eta_grid.points()?;
    check_grid(&curves, &grid)?;
    let result = if spec.fixed_energy {
        crate::analysis::fixed_energy_sweep(&curves, &grid)?
    } else {
        sweep_curves(&curves, &grid)?
    };
    let output = OutputArgs {
        out: a.output.out.clone().or(spec.output.clone()),
        format: a.output.format.or(Some(spec.format)),
    };
    emit_table(&result, &output)
}

fn cmd_crossover(a: &CrossoverArgs) -> Result<()> {
    let detector = a.detector.model()?;
    let (lo, hi) = a
        .bracket
        .split_once(':')
        .and_then(|(l, h)| Some((l.trim().parse::<f64>().ok()?, h.trim().parse::<f64>().ok()?)))
        .ok_or_else(|| Error::Config(format!("bracket '{}' is not LO:HI", a.bracket)))?;
    let ca = CurveSpec::new(
        default_label(&a.probe_a, a.repetitions_a),
        parse_probe(&a.probe_a, None)?,
        detector.clone(),
        a.repetitions_a,
    );
    let cb = CurveSpec::new(
        default_label(&a.probe_b, a.repetitions_b),
        parse_probe(&a.probe_b, None)?,
        detector,
        a.repetitions_b,
    );
    let result = find_curve_crossover(&ca, &cb, (lo, hi))?;
    emit_json(&result, a.out.as_deref())
}

fn cmd_threshold(a: &ThresholdArgs) -> Result<()> {
    let detector = a.detector.model()?;
    let reference = parse_probe(&a.reference, None)?;
    let eta = a.eta.map(Efficiency::new).transpose()?;
    emit_json(&threshold_report(&detector, &reference, eta)?, a.out.as_deref())
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let run = EstimationRun {
        probe: parse_probe(&a.probe, None)?,
        detector: a.detector.model()?,
        eta_true: Efficiency::new(a.eta)?,
        trials: a.trials,
        seed: a.seed,
        replicates: a.replicates,
    };
    emit_json(&validate_crb(&run)?, a.out.as_deref())
}

fn emit_table(curves: &[crate::analysis::ComparisonCurve], output: &OutputArgs) -> Result<()> {
    let table = table_from_curves(curves);
    let format = output.format.unwrap_or_else(|| match &output.out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => OutputFormat::Json,
        _ => OutputFormat::Csv,
    });
    with_output(output.out.as_deref(), |w| match format {
        OutputFormat::Csv => write_csv(&table, w),
        OutputFormat::Json => write_json(&table, w),
    })
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    with_output(out, |w| write_json(value, w))
}

fn with_output(out: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)
        }
    }
}
