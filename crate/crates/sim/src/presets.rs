//! Named figure presets for `sweep --figure`.

use std::str::FromStr;

use v2n_core::Tech;

use crate::config::RunConfig;
use crate::error::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Mean rate against mmWave density.
    Fig2,
    /// Stability index against mmWave density.
    Fig5,
    /// Outage probability against mmWave density.
    Fig7,
    /// Rate over time for two array configurations.
    Fig3,
    /// Rate over time for two tracking periods, with LTE.
    Fig6,
}

pub const ALL: [Figure; 5] = [Figure::Fig2, Figure::Fig5, Figure::Fig7, Figure::Fig3, Figure::Fig6];

impl FromStr for Figure {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ALL.iter().map(|f| f.name()).collect();
            SimError::Config(format!("unknown figure `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

/// What a campaign-sweep figure plots on its y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Rate,
    Stability,
    Outage,
}

/// One series of a time-series figure: drop 0 of a single configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub label: String,
    pub tech: Tech,
    pub lambda_mmw: f64,
    pub arrays: (u32, u32),
    pub t_tr_s: f64,
}

pub const SWEEP_ARRAYS: [(u32, u32); 3] = [(1, 64), (4, 4), (16, 64)];

pub fn sweep_lambdas() -> Vec<f64> {
    (1..=10).map(|k| 10.0 * k as f64).collect()
}

fn mmw(lambda_mmw: f64, (n, m): (u32, u32), t_tr_s: f64) -> SeriesSpec {
    SeriesSpec {
        label: format!("mmWave_{n}x{m}_Ttr{t_tr_s}"),
        tech: Tech::MmWave,
        lambda_mmw,
        arrays: (n, m),
        t_tr_s,
    }
}

impl Figure {
    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig5 => "fig5",
            Figure::Fig7 => "fig7",
            Figure::Fig3 => "fig3",
            Figure::Fig6 => "fig6",
        }
    }

    /// `Some` for the density-sweep figures.
    pub fn metric(self) -> Option<Metric> {
        match self {
            Figure::Fig2 => Some(Metric::Rate),
            Figure::Fig5 => Some(Metric::Stability),
            Figure::Fig7 => Some(Metric::Outage),
            Figure::Fig3 | Figure::Fig6 => None,
        }
    }

    /// Installs the sweep grid of a density-sweep figure.
    pub fn apply_grid(self, cfg: &mut RunConfig) {
        cfg.sweep.lambda_mmw = sweep_lambdas();
        cfg.sweep.arrays = SWEEP_ARRAYS.to_vec();
        cfg.sweep.t_tr_s = vec![0.0];
        cfg.sweep.include_lte = true;
    }

    /// Series of a time-series figure.
    pub fn series(self) -> Vec<SeriesSpec> {
        match self {
            Figure::Fig3 => vec![mmw(100.0, (16, 64), 0.0), mmw(100.0, (4, 4), 0.0)],
            Figure::Fig6 => vec![
                mmw(30.0, (16, 64), 0.1),
                mmw(30.0, (16, 64), 1.0),
                SeriesSpec {
                    label: "LTE".into(),
                    tech: Tech::Lte,
                    lambda_mmw: 30.0,
                    arrays: (16, 64),
                    t_tr_s: 0.1,
                },
            ],
            _ => Vec::new(),
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Figure::Fig2 => "Mean data rate vs mmWave RSU density",
            Figure::Fig5 => "Stability index vs mmWave RSU density",
            Figure::Fig7 => "Outage probability vs mmWave RSU density",
            Figure::Fig3 => "Rate over time, lambda_mmw = 100",
            Figure::Fig6 => "Rate over time for two tracking periods, lambda_mmw = 30",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        let err = "fig9".parse::<Figure>().unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("fig9"));
    }

    #[test]
    fn sweep_grid_has_31_rows() {
        let mut c = RunConfig::default();
        Figure::Fig2.apply_grid(&mut c);
        let points = crate::campaign::grid_points(&c);
        assert_eq!(points.len() + usize::from(c.sweep.include_lte), 31);
    }

    #[test]
    fn time_series_presets() {
        let six = Figure::Fig6.series();
        assert_eq!(six.len(), 3);
        assert_eq!(six.iter().filter(|s| s.tech == Tech::Lte).count(), 1);
        assert!(six.iter().all(|s| s.lambda_mmw == 30.0));
        assert_eq!(Figure::Fig3.series().len(), 2);
        assert!(Figure::Fig2.series().is_empty());
    }
}
