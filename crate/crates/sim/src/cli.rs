//! `simulate`, `sweep` and `validate-trace` subcommands.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use v2n_core::mobility::resample;
use v2n_core::{MobilityTrace, Scenario, Tech};

use crate::campaign::{resolve_workers, run_drops, run_sweep, SummaryRow, SweepResult};
use crate::config::{RunConfig, SweepGrid};
use crate::error::SimError;
use crate::output::{self, RunManifest};
use crate::plot::{LineChart, Series};
use crate::presets::{Figure, Metric};
use crate::trace_csv::{parse_trace, write_trace, TraceReport};

#[derive(Debug, Parser)]
#[command(name = "v2n", version, about = "LTE and mmWave vehicle-to-network link simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one Monte Carlo campaign and write its summary.
    Simulate(RunArgs),
    /// Run a grid of campaigns, or a named figure preset.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// fig2, fig5, fig7, fig3 or fig6.
        #[arg(long)]
        figure: Option<String>,
    },
    /// Check a trace CSV and print its duration, size and top speed.
    ValidateTrace {
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Root seed; overrides `root_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo drops; overrides `n_drops`.
    #[arg(long)]
    pub drops: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// KEY=VALUE, applied after the config file. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Worker threads; falls back to V2N_WORKERS, then the CPU count.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also write per-step CSVs for the first `timeseries_drops` drops.
    #[arg(long)]
    pub emit_timeseries: bool,
}

/// Config plus the loaded external trace and the bytes it was read from.
pub struct Loaded {
    pub cfg: RunConfig,
    pub trace: Option<MobilityTrace>,
    pub trace_bytes: Vec<u8>,
}

pub fn load(args: &RunArgs) -> Result<Loaded, SimError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
        cfg.apply_text(&text)
            .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
    }
    for kv in &args.set {
        cfg.apply_override(kv)?;
    }
    if let Some(seed) = args.seed {
        cfg.sim.root_seed = seed;
    }
    if let Some(drops) = args.drops {
        cfg.sim.n_drops = drops;
    }
    cfg.validate()?;

    let (trace, trace_bytes) = match &cfg.trace_file {
        None => (None, Vec::new()),
        Some(path) => {
            let bytes = fs::read(path)
                .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
            let trace = parse_trace(bytes.as_slice())
                .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
            let trace = if trace.len() > 1 && !trace.is_uniform_at(cfg.sim.dt_s) {
                log::info!("resampling {} to dt = {} s", path.display(), cfg.sim.dt_s);
                resample(&trace, cfg.sim.dt_s)
                    .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?
            } else {
                trace
            };
            (Some(trace), bytes)
        }
    };
    Ok(Loaded {
        cfg,
        trace,
        trace_bytes,
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, SimError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn finish(
    command: String,
    loaded: &Loaded,
    out_dir: &Path,
    outputs: Vec<String>,
    started: Instant,
) -> Result<(), SimError> {
    RunManifest {
        command,
        config_hash: loaded.cfg.hash(&loaded.trace_bytes),
        root_seed: loaded.cfg.sim.root_seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
        wall_clock_s: started.elapsed().as_secs_f64(),
    }
    .write(out_dir)?;
    Ok(())
}

pub fn cmd_simulate(args: &RunArgs) -> Result<(), SimError> {
    let started = Instant::now();
    let loaded = load(args)?;
    let workers = resolve_workers(args.workers)?;
    output::ensure_dir(&args.out_dir)?;
    // A single campaign: the base point plus its LTE row.
    let mut cfg = loaded.cfg.clone();
    cfg.sweep = SweepGrid {
        include_lte: true,
        ..Default::default()
    };
    let result = run_sweep(&cfg, loaded.trace.as_ref(), workers)?;
    let mut outputs = vec!["summary.csv".to_string()];
    output::write_summary(
        create(&args.out_dir, "summary.csv")?,
        &result.rows,
        loaded.cfg.sim.rho_mode,
    )?;

    if args.emit_timeseries {
        let scenario = Scenario::new(loaded.cfg.effective_sim(), loaded.trace.clone())?;
        let n = loaded.cfg.timeseries_drops.min(loaded.cfg.sim.n_drops);
        let indices: Vec<u64> = (0..n).collect();
        for drop in run_drops(&scenario, &indices, workers)? {
            let ts = format!("timeseries_drop{}.csv", drop.drop_index);
            output::write_timeseries(create(&args.out_dir, &ts)?, &drop.lte, &drop.mmw)?;
            let dep = format!("deployment_drop{}.csv", drop.drop_index);
            output::write_deployment(create(&args.out_dir, &dep)?, &drop.deployment)?;
            outputs.extend([ts, dep]);
        }
        if let Some(trace) = scenario.trace() {
            write_trace(create(&args.out_dir, "trace.csv")?, trace, "0")?;
            outputs.push("trace.csv".into());
        }
    }
    finish("simulate".into(), &loaded, &args.out_dir, outputs, started)
}

fn metric_value(row: &SummaryRow, metric: Metric, cfg: &RunConfig) -> Option<f64> {
    let s = &row.summary;
    match metric {
        Metric::Rate => Some(s.mean_rate_bps / 1e9),
        Metric::Stability => s.rho(cfg.sim.rho_mode),
        Metric::Outage => Some(s.outage_prob),
    }
}

/// One line per (N, M, T_tr) against density; LTE drawn flat across the
/// density range.
fn sweep_chart(result: &SweepResult, cfg: &RunConfig, metric: Metric, title: &str) -> LineChart {
    let mut series: Vec<Series> = Vec::new();
    for row in result.rows.iter().filter(|r| r.tech() == Tech::MmWave) {
        let p = row.point.expect("mmWave rows carry a point");
        let name = format!("mmWave N={} M={} T_tr={}", p.vehicle_elements, p.rsu_elements, p.t_tr_s);
        let Some(y) = metric_value(row, metric, cfg) else { continue };
        match series.iter_mut().find(|s| s.name == name) {
            Some(s) => s.points.push((p.lambda_mmw, y)),
            None => series.push(Series { name, points: vec![(p.lambda_mmw, y)] }),
        }
    }
    let lambdas: Vec<f64> = result.campaigns.iter().map(|(p, _)| p.lambda_mmw).collect();
    if let Some(lte) = result.rows.iter().find(|r| r.tech() == Tech::Lte) {
        if let Some(y) = metric_value(lte, metric, cfg) {
            let lo = lambdas.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            series.push(Series { name: "LTE".into(), points: vec![(lo, y), (hi, y)] });
        }
    }
    let (y_label, log_y) = match metric {
        Metric::Rate => ("mean rate [Gb/s]", false),
        Metric::Stability => ("stability index", false),
        Metric::Outage => ("outage probability", true),
    };
    LineChart {
        title: title.into(),
        x_label: "mmWave RSU density [RSU/km^2]".into(),
        y_label: y_label.into(),
        log_y,
        series,
    }
}

fn time_series_figure(
    figure: Figure,
    loaded: &Loaded,
    out_dir: &Path,
    workers: usize,
) -> Result<Vec<String>, SimError> {
    let mut labelled = Vec::new();
    let mut chart = LineChart {
        title: figure.title().into(),
        x_label: "time [s]".into(),
        y_label: "rate [Gb/s]".into(),
        log_y: false,
        series: Vec::new(),
    };
    for spec in figure.series() {
        let mut sim = loaded.cfg.effective_sim();
        sim.deployment.lambda_mmw = spec.lambda_mmw;
        (sim.vehicle_elements, sim.rsu_elements) = spec.arrays;
        sim.t_tr_s = spec.t_tr_s;
        let scenario = Scenario::new(sim, loaded.trace.clone())?;
        let drop = run_drops(&scenario, &[0], workers)?.remove(0);
        let samples = match spec.tech {
            Tech::Lte => drop.lte,
            Tech::MmWave => drop.mmw,
        };
        chart.series.push(Series {
            name: spec.label.clone(),
            points: samples.iter().map(|s| (s.t, s.rate_bps / 1e9)).collect(),
        });
        labelled.push((spec.label, samples));
    }
    let csv = format!("{}.csv", figure.name());
    output::write_labelled_series(create(out_dir, &csv)?, &labelled)?;
    let svg = format!("{}.svg", figure.name());
    fs::write(out_dir.join(&svg), chart.to_svg())?;
    Ok(vec![csv, svg])
}

pub fn cmd_sweep(args: &RunArgs, figure: Option<&str>) -> Result<(), SimError> {
    let started = Instant::now();
    let figure = figure.map(str::parse::<Figure>).transpose()?;
    let mut loaded = load(args)?;
    let workers = resolve_workers(args.workers)?;
    output::ensure_dir(&args.out_dir)?;

    let outputs = match figure {
        Some(f) if f.metric().is_none() => time_series_figure(f, &loaded, &args.out_dir, workers)?,
        _ => {
            if let Some(f) = figure {
                f.apply_grid(&mut loaded.cfg);
            }
            let stem = figure.map_or("sweep", Figure::name);
            let metric = figure.and_then(Figure::metric).unwrap_or(Metric::Rate);
            let title = figure.map_or("Mean data rate vs mmWave RSU density", Figure::title);
            let result = run_sweep(&loaded.cfg, loaded.trace.as_ref(), workers)?;
            let csv = format!("{stem}.csv");
            output::write_summary(create(&args.out_dir, &csv)?, &result.rows, loaded.cfg.sim.rho_mode)?;
            let svg = format!("{stem}.svg");
            fs::write(
                args.out_dir.join(&svg),
                sweep_chart(&result, &loaded.cfg, metric, title).to_svg(),
            )?;
            vec![csv, svg]
        }
    };
    let command = match figure {
        Some(f) => format!("sweep --figure {}", f.name()),
        None => "sweep".into(),
    };
    finish(command, &loaded, &args.out_dir, outputs, started)
}

/// Prints the trace report; errors name the first offending line.
pub fn cmd_validate_trace(path: &Path) -> Result<String, SimError> {
    let file = File::open(path)
        .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
    let trace = parse_trace(std::io::BufReader::new(file))
        .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
    Ok(TraceReport::of(&trace).to_string())
}

pub fn run(cli: Cli) -> Result<(), SimError> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Sweep { run, figure } => cmd_sweep(&run, figure.as_deref()),
        Command::ValidateTrace { path } => {
            print!("{}", cmd_validate_trace(&path)?);
            Ok(())
        }
    }
}
