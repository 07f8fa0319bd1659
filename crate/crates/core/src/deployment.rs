//! Road-side-unit layouts drawn from homogeneous Poisson point processes.

use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::ConfigError;
use crate::geometry::Position;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tech {
    Lte,
    MmWave,
}

impl Tech {
    pub fn label(self) -> &'static str {
        match self {
            Tech::Lte => "LTE",
            Tech::MmWave => "mmWave",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rsu {
    pub id: u32,
    pub tech: Tech,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub area_side_m: f64,
    pub lte_rsus: Vec<Rsu>,
    pub mmw_rsus: Vec<Rsu>,
    /// RSU/km²
    pub lambda_lte: f64,
    /// RSU/km²
    pub lambda_mmw: f64,
}

impl Deployment {
    pub fn layer(&self, tech: Tech) -> &[Rsu] {
        match tech {
            Tech::Lte => &self.lte_rsus,
            Tech::MmWave => &self.mmw_rsus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentConfig {
    pub area_side_m: f64,
    pub lambda_lte: f64,
    pub lambda_mmw: f64,
    /// Redraw the LTE layer until it holds at least this many sites.
    pub min_lte_rsus: u32,
}

impl Default for DeploymentConfig {
    fn default() -> Self {
        Self {
            area_side_m: 1000.0,
            lambda_lte: 4.0,
            lambda_mmw: 30.0,
            min_lte_rsus: 1,
        }
    }
}

impl DeploymentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.area_side_m > 0.0 && self.area_side_m.is_finite()) {
            return Err(ConfigError::new("area_side_m", "must be positive"));
        }
        if !(self.lambda_lte >= 0.0 && self.lambda_lte.is_finite()) {
            return Err(ConfigError::new("lambda_lte", "density must be non-negative"));
        }
        if !(self.lambda_mmw >= 0.0 && self.lambda_mmw.is_finite()) {
            return Err(ConfigError::new("lambda_mmw", "density must be non-negative"));
        }
        if self.min_lte_rsus > 0 && self.lambda_lte == 0.0 {
            return Err(ConfigError::new(
                "min_lte_rsus",
                "cannot require LTE sites with lambda_lte = 0",
            ));
        }
        Ok(())
    }
}

/// Points of a homogeneous PPP with `density` per km² on the square
/// `[0, area_side_m]²`.
pub fn sample_ppp(density: f64, area_side_m: f64, stream: &RngStream) -> Vec<Position> {
    let mean = density * (area_side_m / 1000.0) * (area_side_m / 1000.0);
    if !(mean > 0.0) {
        return Vec::new();
    }
    let mut rng = stream.rng();
    let count = Poisson::new(mean)
        .expect("positive finite Poisson mean")
        .sample(&mut rng) as usize;
    (0..count)
        .map(|_| {
            let x = rng.random::<f64>() * area_side_m;
            let y = rng.random::<f64>() * area_side_m;
            Position::new(x, y)
        })
        .collect()
}

const MAX_LAYER_ATTEMPTS: u64 = 10_000;

/// One technology layer. Attempt `k` draws from `stream / ("attempt", k)`.
pub fn build_layer(
    tech: Tech,
    density: f64,
    area_side_m: f64,
    min_count: u32,
    stream: &RngStream,
) -> Vec<Rsu> {
    let mut points = Vec::new();
    for attempt in 0..MAX_LAYER_ATTEMPTS {
        points = sample_ppp(density, area_side_m, &stream.derive("attempt", attempt));
        if points.len() >= min_count as usize {
            break;
        }
    }
    points
        .into_iter()
        .enumerate()
        .map(|(i, position)| Rsu {
            id: i as u32,
            tech,
            position,
        })
        .collect()
}

/// Both layers, from the disjoint substreams `lte_layout` and `mmw_layout`
/// of `stream`.
pub fn build_deployment(
    config: &DeploymentConfig,
    stream: &RngStream,
) -> Result<Deployment, ConfigError> {
    config.validate()?;
    let lte = build_layer(
        Tech::Lte,
        config.lambda_lte,
        config.area_side_m,
        config.min_lte_rsus,
        &stream.derive("lte_layout", 0),
    );
    let mmw = build_layer(
        Tech::MmWave,
        config.lambda_mmw,
        config.area_side_m,
        0,
        &stream.derive("mmw_layout", 0),
    );
    Ok(Deployment {
        area_side_m: config.area_side_m,
        lte_rsus: lte,
        mmw_rsus: mmw,
        lambda_lte: config.lambda_lte,
        lambda_mmw: config.lambda_mmw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(density: f64, draws: u64) -> Vec<f64> {
        let root = RngStream::new(2024);
        (0..draws)
            .map(|i| sample_ppp(density, 1000.0, &root.derive("ppp", i)).len() as f64)
            .collect()
    }

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn zero_density_is_empty() {
        assert!(sample_ppp(0.0, 1000.0, &RngStream::new(1)).is_empty());
    }

    #[test]
    fn count_mean_matches_density() {
        let (m, _) = mean_var(&counts(4.0, 10_000));
        assert!((m - 4.0).abs() < 0.06, "mean {m}");
    }

    #[test]
    fn count_variance_matches_density() {
        let (_, v) = mean_var(&counts(100.0, 10_000));
        assert!((v - 100.0).abs() < 5.0, "variance {v}");
    }

    /// Pearson statistic and its 1% critical value, tails merged until every
    /// bin expects at least five counts.
    fn poisson_chi_square(xs: &[f64], mean: f64) -> (f64, f64) {
        use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson as PoissonDist};
        let pois = PoissonDist::new(mean).unwrap();
        let n = xs.len() as f64;
        let lo = (mean - 6.0 * mean.sqrt()).max(0.0) as u64;
        let hi = (mean + 6.0 * mean.sqrt()) as u64 + 1;
        let mut bins: Vec<(u64, u64, f64)> = Vec::new(); // (from, to, expected)
        let mut from = 0;
        let mut acc = 0.0;
        for k in 0..=hi {
            acc += pois.pmf(k) * n;
            if acc >= 5.0 && k >= lo {
                bins.push((from, k, acc));
                from = k + 1;
                acc = 0.0;
            }
        }
        let tail = n - bins.iter().map(|b| b.2).sum::<f64>();
        let last = bins.last_mut().unwrap();
        last.1 = u64::MAX;
        last.2 += tail;
        let stat: f64 = bins
            .iter()
            .map(|&(a, b, e)| {
                let o = xs.iter().filter(|&&x| (a..=b).contains(&(x as u64))).count() as f64;
                (o - e) * (o - e) / e
            })
            .sum();
        let crit = ChiSquared::new((bins.len() - 1) as f64).unwrap().inverse_cdf(0.99);
        (stat, crit)
    }

    #[test]
    fn counts_pass_chi_square() {
        for density in [4.0, 100.0] {
            let (stat, crit) = poisson_chi_square(&counts(density, 10_000), density);
            assert!(stat < crit, "density {density}: chi2 {stat} >= {crit}");
        }
    }

    #[test]
    fn coordinates_pass_ks_uniformity() {
        let mut xs: Vec<f64> = (0..200)
            .flat_map(|i| sample_ppp(30.0, 1000.0, &RngStream::new(8).derive("ks", i)))
            .flat_map(|p| [p.x / 1000.0, p.y / 1000.0])
            .collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
            .fold(0.0, f64::max);
        // Asymptotic 1% critical value.
        assert!(d < 1.628 / n.sqrt(), "KS distance {d}");
    }

    #[test]
    fn positions_inside_area() {
        let pts = sample_ppp(100.0, 250.0, &RngStream::new(3));
        assert!(pts
            .iter()
            .all(|p| (0.0..=250.0).contains(&p.x) && (0.0..=250.0).contains(&p.y)));
    }

    #[test]
    fn deployment_layer_means() {
        let cfg = DeploymentConfig {
            lambda_mmw: 10.0,
            lambda_lte: 4.0,
            min_lte_rsus: 0,
            ..Default::default()
        };
        let root = RngStream::new(11);
        let n = 4000;
        let (mut lte, mut mmw) = (0usize, 0usize);
        for i in 0..n {
            let d = build_deployment(&cfg, &root.derive("drop", i)).unwrap();
            lte += d.lte_rsus.len();
            mmw += d.mmw_rsus.len();
        }
        let lte = lte as f64 / n as f64;
        let mmw = mmw as f64 / n as f64;
        // 4 sigma of the sample mean
        assert!((lte - 4.0).abs() < 4.0 * (4.0f64 / n as f64).sqrt(), "{lte}");
        assert!((mmw - 10.0).abs() < 4.0 * (10.0f64 / n as f64).sqrt(), "{mmw}");
    }

    #[test]
    fn empty_mmwave_layer() {
        let cfg = DeploymentConfig {
            lambda_mmw: 0.0,
            ..Default::default()
        };
        let d = build_deployment(&cfg, &RngStream::new(5)).unwrap();
        assert!(d.mmw_rsus.is_empty());
        assert!(!d.lte_rsus.is_empty());
    }

    #[test]
    fn deterministic_and_layers_disjoint() {
        let root = RngStream::new(99);
        let a = build_deployment(&DeploymentConfig::default(), &root).unwrap();
        let b = build_deployment(&DeploymentConfig::default(), &root).unwrap();
        assert_eq!(a, b);
        let denser = DeploymentConfig {
            lambda_mmw: 80.0,
            ..Default::default()
        };
        let c = build_deployment(&denser, &root).unwrap();
        assert_eq!(a.lte_rsus, c.lte_rsus);
        assert_ne!(a.mmw_rsus.len(), 0);
    }

    #[test]
    fn min_lte_conditioning() {
        let cfg = DeploymentConfig {
            lambda_lte: 0.5,
            min_lte_rsus: 1,
            ..Default::default()
        };
        let root = RngStream::new(1);
        for i in 0..200 {
            let d = build_deployment(&cfg, &root.derive("drop", i)).unwrap();
            assert!(!d.lte_rsus.is_empty());
            let ids: Vec<u32> = d.lte_rsus.iter().map(|r| r.id).collect();
            assert!(ids.iter().enumerate().all(|(i, &id)| id == i as u32));
        }
    }

    #[test]
    fn rejects_negative_density() {
        let cfg = DeploymentConfig {
            lambda_mmw: -5.0,
            ..Default::default()
        };
        let err = build_deployment(&cfg, &RngStream::new(0)).unwrap_err();
        assert_eq!(err.key, "lambda_mmw");
    }
}
