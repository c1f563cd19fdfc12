//! `simulate`, `tune` and `bench` subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use yawtune::metrics::{TransientMetrics, DEFAULT_BAND};
use yawtune::sim::pi_tf;
use yawtune::tuners::multi_run;
use yawtune::{
    default_yaw_plant, error_index, simulate_pi_loop, transient_metrics, GAConfig, GainBounds,
    IndexKind, Objective, PIGains, SAConfig, SimConfig, TransferFunction, Tuner, TuningResult,
};

use crate::error::CliError;
use crate::io::{write_scatter_csv, write_trace_csv};
use crate::published::{self, PublishedRow};

#[derive(Debug, Parser)]
#[command(
    name = "yawtune",
    version,
    about = "PI tuning and step-response benchmarking for yaw-steering loops"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the PI loop under a step and report transient metrics.
    Simulate(SimulateArgs),
    /// Tune PI gains with GA or SA over several seeded runs.
    Tune(TuneArgs),
    /// Simulate the three reference gain sets and compare with published values.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long)]
    pub kp: f64,
    #[arg(long)]
    pub ki: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long = "t-final", default_value_t = 15.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Symmetric actuation limit.
    #[arg(long)]
    pub saturation: Option<f64>,
    /// Plant JSON file `{"num": [...], "den": [...]}`, or `default`.
    #[arg(long, default_value = "default")]
    pub plant: String,
    /// Trace CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ga,
    Sa,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    /// Base seed; run i uses seed + i. Defaults to the config seed, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tuning config JSON (bounds, ga, sa, sim, index, plant); all keys optional.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Result JSON path; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scatter CSV path (`run,kp,ki,cost`).
    #[arg(long)]
    pub scatter: Option<PathBuf>,
    /// Worker threads for candidate evaluation. Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long = "t-final", default_value_t = 15.0)]
    pub t_final: f64,
    #[arg(long, default_value_t = DEFAULT_BAND)]
    pub band: f64,
    /// Report JSON path.
    #[arg(long, default_value = "bench_report.json")]
    pub out: PathBuf,
}

impl Default for BenchArgs {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 15.0,
            band: DEFAULT_BAND,
            out: PathBuf::from("bench_report.json"),
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => {
            let out = simulate(&args)?;
            if let Some(path) = &args.out {
                write_trace_csv(fs::File::create(path)?, &out.trace)?;
            }
            emit(&format!("{}\n", serde_json::to_string_pretty(&out.report)?))?;
        }
        Command::Tune(args) => {
            let report = tune(&args)?;
            let json = tune_json(&report)?;
            // every run finished; only now touch the filesystem
            if let Some(path) = &args.scatter {
                let mut buf = Vec::new();
                write_scatter_csv(&mut buf, &report.runs_by_seed())?;
                fs::write(path, buf)?;
            }
            match &args.out {
                Some(path) => fs::write(path, json)?,
                None => emit(&json)?,
            }
        }
        Command::Bench(args) => {
            let report = bench(&args)?;
            emit(&report.render_table())?;
            let mut f = fs::File::create(&args.out)?;
            f.write_all(bench_json(&report)?.as_bytes())?;
        }
    }
    Ok(())
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Serialize)]
pub struct SimulateReport {
    pub plant: TransferFunction,
    pub gains: PIGains,
    pub sim: SimConfig,
    pub band_fraction: f64,
    pub metrics: TransientMetrics,
    pub itae: f64,
}

pub struct SimulateOutput {
    pub trace: yawtune::SimTrace,
    pub report: SimulateReport,
}

pub fn load_plant(source: &str) -> Result<TransferFunction, CliError> {
    if source == "default" {
        return Ok(default_yaw_plant());
    }
    let text = fs::read_to_string(source)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid plant file {source}: {e}")))
}

pub fn simulate(args: &SimulateArgs) -> Result<SimulateOutput, CliError> {
    let gains = PIGains::new(args.kp, args.ki)?;
    pi_tf(gains)?;
    let plant = load_plant(&args.plant)?;
    let sim = SimConfig {
        dt: args.dt,
        t_final: args.t_final,
        reference_amplitude: args.amplitude,
        saturation: args.saturation,
    };
    let trace = simulate_pi_loop(&plant, gains, &sim)?;
    let metrics = transient_metrics(&trace, DEFAULT_BAND)?;
    let itae = error_index(&trace, IndexKind::Itae).value;
    Ok(SimulateOutput {
        trace,
        report: SimulateReport {
            plant,
            gains,
            sim,
            band_fraction: DEFAULT_BAND,
            metrics,
            itae,
        },
    })
}

// -------------------------------------------------------------------- tune

/// Tuning config file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuneConfig {
    pub bounds: GainBounds,
    pub ga: GAConfig,
    pub sa: SAConfig,
    pub sim: SimConfig,
    pub index: IndexKindOrDefault,
    pub plant: Option<TransferFunction>,
}

/// ITAE unless configured otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexKindOrDefault(pub IndexKind);

impl Default for IndexKindOrDefault {
    fn default() -> Self {
        Self(IndexKind::Itae)
    }
}

/// Effective settings echoed into the result file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveTuneConfig {
    pub runs: usize,
    pub base_seed: u64,
    pub bounds: GainBounds,
    pub tuner: Tuner,
    pub objective: Objective,
}

#[derive(Debug, Clone, Serialize)]
pub struct BestRun {
    pub gains: PIGains,
    /// Gains rounded to integers, for display only.
    pub display_gains: [f64; 2],
    pub cost: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TuneReport {
    pub config: EffectiveTuneConfig,
    pub best: BestRun,
    /// Sorted by ascending cost.
    pub runs: Vec<TuningResult>,
}

impl TuneReport {
    pub fn runs_by_seed(&self) -> Vec<&TuningResult> {
        let mut runs: Vec<&TuningResult> = self.runs.iter().collect();
        runs.sort_by_key(|r| r.seed.wrapping_sub(self.config.base_seed));
        runs
    }
}

pub fn load_tune_config(path: Option<&Path>) -> Result<TuneConfig, CliError> {
    match path {
        None => Ok(TuneConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", p.display())))
        }
    }
}

pub fn tune(args: &TuneArgs) -> Result<TuneReport, CliError> {
    let file = load_tune_config(args.config.as_deref())?;
    file.sim.validate()?;
    let tuner = match args.method {
        Method::Ga => Tuner::Ga(file.ga.clone()),
        Method::Sa => Tuner::Sa(file.sa.clone()),
    };
    let base_seed = args.seed.unwrap_or_else(|| tuner.seed());
    let tuner = tuner.with_seed(base_seed);
    let objective = Objective::new(
        file.plant.clone().unwrap_or_else(default_yaw_plant),
        file.sim,
        file.index.0,
    );
    if args.workers == Some(0) {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }

    let go = || multi_run(&tuner, &file.bounds, |g| objective.evaluate(g), args.runs);
    let set = with_workers(args.workers, go)??;

    let best = set.best();
    let report = TuneReport {
        best: BestRun {
            gains: best.gains,
            display_gains: [best.gains.kp().round(), best.gains.ki().round()],
            cost: best.cost,
            seed: best.seed,
        },
        config: EffectiveTuneConfig {
            runs: args.runs,
            base_seed,
            bounds: file.bounds,
            tuner,
            objective,
        },
        runs: set.runs,
    };
    Ok(report)
}

#[cfg(feature = "parallel")]
fn with_workers<R: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_workers<R: Send>(
    _workers: Option<usize>,
    f: impl FnOnce() -> R + Send,
) -> Result<R, CliError> {
    Ok(f())
}

pub fn tune_json(report: &TuneReport) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

// ------------------------------------------------------------------- bench

#[derive(Debug, Clone, Serialize)]
pub struct BenchSettings {
    pub sim: SimConfig,
    pub band_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub label: String,
    pub gains: PIGains,
    pub peak_time: Option<f64>,
    pub percent_overshoot: f64,
    pub settling_time: Option<f64>,
    pub itae: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceRow {
    pub source: &'static str,
    #[serde(flatten)]
    pub values: PublishedRow,
}

/// `(computed - published) / published` per metric.
#[derive(Debug, Clone, Serialize)]
pub struct Deviation {
    pub label: String,
    pub peak_time: Option<f64>,
    pub percent_overshoot: f64,
    pub settling_time: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub settings: BenchSettings,
    pub rows: Vec<BenchRow>,
    pub reference_rows: Vec<ReferenceRow>,
    pub relative_deviation: Vec<Deviation>,
}

/// Relative deviations above this are marked in the table.
const FLAG_DEVIATION: f64 = 0.10;

pub fn bench(args: &BenchArgs) -> Result<BenchReport, CliError> {
    let sim = SimConfig {
        dt: args.dt,
        t_final: args.t_final,
        ..SimConfig::default()
    };
    let plant = default_yaw_plant();
    let mut rows = Vec::new();
    let mut deviations = Vec::new();
    for reference in published::SIMULATION_TABLE {
        let gains = PIGains::new(reference.kp, reference.ki)?;
        let trace = simulate_pi_loop(&plant, gains, &sim)?;
        let m = transient_metrics(&trace, args.band)?;
        let itae = error_index(&trace, IndexKind::Itae).value;
        let rel = |computed: f64, published: f64| (computed - published) / published;
        deviations.push(Deviation {
            label: reference.label.to_string(),
            peak_time: m.peak_time.map(|v| rel(v, reference.peak_time)),
            percent_overshoot: rel(m.percent_overshoot, reference.percent_overshoot),
            settling_time: m.settling_time.map(|v| rel(v, reference.settling_time)),
        });
        rows.push(BenchRow {
            label: reference.label.to_string(),
            gains,
            peak_time: m.peak_time,
            percent_overshoot: m.percent_overshoot,
            settling_time: m.settling_time,
            itae,
        });
    }
    Ok(BenchReport {
        settings: BenchSettings {
            sim,
            band_fraction: args.band,
        },
        rows,
        reference_rows: published::SIMULATION_TABLE
            .into_iter()
            .map(|values| ReferenceRow {
                source: published::SOURCE,
                values,
            })
            .collect(),
        relative_deviation: deviations,
    })
}

pub fn bench_json(report: &BenchReport) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

impl BenchReport {
    /// Side-by-side text table; `*` marks deviations above 10 %.
    pub fn render_table(&self) -> String {
        let cell = |computed: Option<f64>, published: f64, dev: Option<f64>| match (computed, dev) {
            (Some(c), Some(d)) => {
                let flag = if d.abs() > FLAG_DEVIATION { "*" } else { " " };
                format!("{c:>7.3} {published:>7.3} {:>+7.1}%{flag}", d * 100.0)
            }
            _ => format!("{:>7} {published:>7.3} {:>8} ", "-", "-"),
        };
        let mut out = String::new();
        out.push_str(&format!(
            "step response, dt = {} s, horizon = {} s, settling band = {}%\n",
            self.settings.sim.dt,
            self.settings.sim.t_final,
            self.settings.band_fraction * 100.0
        ));
        out.push_str(&format!(
            "{:<8} {:>5} {:>5} | {:^25} | {:^25} | {:^25} | {:>7}\n",
            "method", "kp", "ki", "peak time (s)", "overshoot (%)", "settling time (s)", "ITAE"
        ));
        out.push_str(&format!(
            "{:<20} | {:^25} | {:^25} | {:^25} |\n",
            "", "calc    publ     dev", "calc    publ     dev", "calc    publ     dev"
        ));
        for ((row, reference), dev) in self
            .rows
            .iter()
            .zip(&self.reference_rows)
            .zip(&self.relative_deviation)
        {
            let r = &reference.values;
            out.push_str(&format!(
                "{:<8} {:>5} {:>5} | {} | {} | {} | {:>7.4}\n",
                row.label,
                row.gains.kp(),
                row.gains.ki(),
                cell(row.peak_time, r.peak_time, dev.peak_time),
                cell(
                    Some(row.percent_overshoot),
                    r.percent_overshoot,
                    Some(dev.percent_overshoot)
                ),
                cell(row.settling_time, r.settling_time, dev.settling_time),
                row.itae
            ));
        }
        out.push_str(&format!("publ = {}\n", published::SOURCE));
        out
    }
}
