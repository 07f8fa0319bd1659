//! Parallel Monte Carlo campaigns and parameter sweeps.

use rayon::prelude::*;
use v2n_core::engine::DropResult;
use v2n_core::metrics::aggregate;
use v2n_core::{CampaignMetrics, MetricsSummary, MobilityTrace, Scenario, SimConfig, Tech};

use crate::config::RunConfig;
use crate::error::SimError;

pub const WORKERS_ENV: &str = "V2N_WORKERS";

/// `--workers`, then `V2N_WORKERS`, then the number of available CPUs.
pub fn resolve_workers(flag: Option<usize>) -> Result<usize, SimError> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| SimError::config(WORKERS_ENV, format!("`{v}` is not a count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if n == 0 {
        return Err(SimError::config("workers", "need at least one worker"));
    }
    Ok(n)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, SimError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::Runtime(format!("cannot start worker pool: {e}")))
}

/// Runs every drop of `scenario` on `workers` threads. The result is
/// independent of `workers`; on failure the error of the lowest failing
/// drop index is returned.
pub fn run_campaign(scenario: &Scenario, workers: usize) -> Result<CampaignMetrics, SimError> {
    let n = scenario.config().n_drops;
    let results: Vec<_> =
        pool(workers)?.install(|| (0..n).into_par_iter().map(|i| scenario.drop_metrics(i)).collect());
    let drops = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(&drops).map_err(|e| SimError::Runtime(e.to_string()))?)
}

/// Full per-step results for the given drops, in the order requested.
pub fn run_drops(
    scenario: &Scenario,
    indices: &[u64],
    workers: usize,
) -> Result<Vec<DropResult>, SimError> {
    let results: Vec<_> =
        pool(workers)?.install(|| indices.par_iter().map(|&i| scenario.run_drop(i)).collect());
    Ok(results.into_iter().collect::<Result<Vec<_>, _>>()?)
}

/// One mmWave campaign point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub lambda_mmw: f64,
    pub vehicle_elements: u32,
    pub rsu_elements: u32,
    pub t_tr_s: f64,
}

impl SweepPoint {
    pub fn of(sim: &SimConfig) -> Self {
        Self {
            lambda_mmw: sim.deployment.lambda_mmw,
            vehicle_elements: sim.vehicle_elements,
            rsu_elements: sim.rsu_elements,
            t_tr_s: sim.t_tr_s,
        }
    }

    pub fn apply(&self, sim: &SimConfig) -> SimConfig {
        let mut c = sim.clone();
        c.deployment.lambda_mmw = self.lambda_mmw;
        c.vehicle_elements = self.vehicle_elements;
        c.rsu_elements = self.rsu_elements;
        c.t_tr_s = self.t_tr_s;
        c
    }
}

/// Cross product of the sweep axes, arrays outermost, then tracking
/// period, then density. Empty axes take the base value.
pub fn grid_points(cfg: &RunConfig) -> Vec<SweepPoint> {
    let base = SweepPoint::of(&cfg.sim);
    let or_base = |xs: &[f64], b: f64| if xs.is_empty() { vec![b] } else { xs.to_vec() };
    let lambdas = or_base(&cfg.sweep.lambda_mmw, base.lambda_mmw);
    let periods = or_base(&cfg.sweep.t_tr_s, base.t_tr_s);
    let arrays = if cfg.sweep.arrays.is_empty() {
        vec![(base.vehicle_elements, base.rsu_elements)]
    } else {
        cfg.sweep.arrays.clone()
    };
    let mut out = Vec::with_capacity(arrays.len() * periods.len() * lambdas.len());
    for &(n, m) in &arrays {
        for &t in &periods {
            for &l in &lambdas {
                out.push(SweepPoint {
                    lambda_mmw: l,
                    vehicle_elements: n,
                    rsu_elements: m,
                    t_tr_s: t,
                });
            }
        }
    }
    out
}

/// One line of the summary table. LTE rows carry no sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub point: Option<SweepPoint>,
    pub summary: MetricsSummary,
}

impl SummaryRow {
    pub fn tech(&self) -> Tech {
        self.summary.tech
    }
}

/// Summary rows of a sweep plus the full campaign results behind them.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SummaryRow>,
    /// One campaign per grid point, in grid order.
    pub campaigns: Vec<(SweepPoint, CampaignMetrics)>,
}

/// Runs one campaign per grid point. The LTE link does not depend on any
/// mmWave axis, so a single LTE row (from the first point) leads the table.
pub fn run_sweep(
    cfg: &RunConfig,
    trace: Option<&MobilityTrace>,
    workers: usize,
) -> Result<SweepResult, SimError> {
    let base = cfg.effective_sim();
    let mut rows = Vec::new();
    let mut campaigns = Vec::new();
    for point in grid_points(cfg) {
        let scenario = Scenario::new(point.apply(&base), trace.cloned())?;
        let metrics = run_campaign(&scenario, workers)?;
        log::info!(
            "lambda_mmw={} N={} M={} T_tr={}: {:.3} Gb/s",
            point.lambda_mmw,
            point.vehicle_elements,
            point.rsu_elements,
            point.t_tr_s,
            metrics.mmw.mean_rate_bps / 1e9
        );
        if cfg.sweep.include_lte && rows.is_empty() {
            rows.push(SummaryRow {
                point: None,
                summary: metrics.lte.clone(),
            });
        }
        rows.push(SummaryRow {
            point: Some(point),
            summary: metrics.mmw.clone(),
        });
        campaigns.push((point, metrics));
    }
    Ok(SweepResult { rows, campaigns })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        let mut c = RunConfig::default();
        c.sim.n_drops = 6;
        c.sim.trip.duration_s = 10.0;
        c
    }

    #[test]
    fn grid_size_and_order() {
        let mut c = RunConfig::default();
        c.sweep.lambda_mmw = (1..=10).map(|k| 10.0 * k as f64).collect();
        c.sweep.arrays = vec![(1, 64), (4, 4), (16, 64)];
        let pts = grid_points(&c);
        assert_eq!(pts.len(), 30);
        assert_eq!(pts[0].lambda_mmw, 10.0);
        assert_eq!(pts[9].lambda_mmw, 100.0);
        assert_eq!((pts[10].vehicle_elements, pts[10].rsu_elements), (4, 4));
        assert_eq!(grid_points(&RunConfig::default()).len(), 1);
    }

    #[test]
    fn campaign_is_worker_invariant() {
        let c = small();
        let s = Scenario::new(c.effective_sim(), None).unwrap();
        let one = run_campaign(&s, 1).unwrap();
        let four = run_campaign(&s, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one, s.run_campaign_sequential().unwrap());
    }

    #[test]
    fn larger_campaign_extends_smaller() {
        let c = small();
        let s = Scenario::new(c.effective_sim(), None).unwrap();
        let mut big = c.effective_sim();
        big.n_drops = 12;
        let b = Scenario::new(big, None).unwrap();
        let small_drops = run_campaign(&s, 2).unwrap().drops;
        let big_drops = run_campaign(&b, 2).unwrap().drops;
        assert_eq!(small_drops[..], big_drops[..6]);
    }

    #[test]
    fn sweep_has_single_lte_row() {
        let mut c = small();
        c.sweep.lambda_mmw = vec![10.0, 50.0];
        c.sweep.arrays = vec![(16, 64), (4, 4)];
        let r = run_sweep(&c, None, 2).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert_eq!(r.rows[0].tech(), Tech::Lte);
        assert!(r.rows[1..].iter().all(|row| row.tech() == Tech::MmWave));
        // The LTE summary is the same at every point.
        assert!(r.campaigns.windows(2).all(|w| w[0].1.lte == w[1].1.lte));
    }

    #[test]
    fn workers_resolution() {
        assert_eq!(resolve_workers(Some(3)).unwrap(), 3);
        assert!(resolve_workers(Some(0)).is_err());
    }
}
