//! Mean rate, stability index (coefficient of variation of the rate) and
//! outage probability, per drop and pooled over a campaign.

use alloc::vec::Vec;

use crate::deployment::Tech;
use crate::error::MetricsError;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub struct RateSeries {
    pub dt: f64,
    /// bit/s per step
    pub values: Vec<f64>,
    pub tech: Tech,
}

impl RateSeries {
    pub fn mean(&self) -> Option<f64> {
        (!self.values.is_empty())
            .then(|| self.values.iter().sum::<f64>() / self.values.len() as f64)
    }
}

/// Population standard deviation over mean.
pub fn stability_index(values: &[f64]) -> Result<f64, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptySeries);
    }
    let mut stats = SeriesStats::default();
    for &v in values {
        stats.push(v, 0.0, f64::NEG_INFINITY);
    }
    stats.stability().ok_or(MetricsError::ZeroMean)
}

/// Fraction of samples strictly below `threshold_db`.
pub fn outage_probability(snr_db: &[f64], threshold_db: f64) -> Result<f64, MetricsError> {
    if snr_db.is_empty() {
        return Err(MetricsError::EmptySeries);
    }
    let below = snr_db.iter().filter(|&&s| s < threshold_db).count();
    Ok(below as f64 / snr_db.len() as f64)
}

/// Streaming rate moments and outage count of one series.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeriesStats {
    pub n: u64,
    pub mean: f64,
    /// Sum of squared deviations from `mean`.
    pub m2: f64,
    pub outage: u64,
}

impl SeriesStats {
    pub fn from_series(
        rates: &[f64],
        snr_db: &[f64],
        threshold_db: f64,
    ) -> Result<Self, MetricsError> {
        if rates.len() != snr_db.len() {
            return Err(MetricsError::LengthMismatch {
                left: rates.len(),
                right: snr_db.len(),
            });
        }
        if rates.is_empty() {
            return Err(MetricsError::EmptySeries);
        }
        let mut s = SeriesStats::default();
        for (&r, &snr) in rates.iter().zip(snr_db) {
            s.push(r, snr, threshold_db);
        }
        Ok(s)
    }

    pub fn push(&mut self, rate: f64, snr_db: f64, threshold_db: f64) {
        self.n += 1;
        let delta = rate - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (rate - self.mean);
        if snr_db < threshold_db {
            self.outage += 1;
        }
    }

    pub fn merge(&self, other: &SeriesStats) -> SeriesStats {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        SeriesStats {
            n,
            mean,
            m2,
            outage: self.outage + other.outage,
        }
    }

    pub fn std(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            libm::sqrt((self.m2 / self.n as f64).max(0.0))
        }
    }

    /// `None` for an empty or zero-mean series.
    pub fn stability(&self) -> Option<f64> {
        (self.n > 0 && self.mean > 0.0).then(|| self.std() / self.mean)
    }

    pub fn outage_fraction(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.outage as f64 / self.n as f64
        }
    }
}

/// Per-drop reduction of a [`crate::engine::DropResult`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DropMetrics {
    pub drop_index: u64,
    pub lte: SeriesStats,
    pub mmw: SeriesStats,
    pub alignment_losses: u64,
    pub slots: u64,
}

impl DropMetrics {
    pub fn tech(&self, tech: Tech) -> &SeriesStats {
        match tech {
            Tech::Lte => &self.lte,
            Tech::MmWave => &self.mmw,
        }
    }
}

/// Aggregation of the stability index across drops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhoMode {
    /// One index over all samples of all drops.
    Pooled,
    /// Mean of the per-drop indices.
    #[default]
    PerDrop,
}

impl RhoMode {
    pub fn label(self) -> &'static str {
        match self {
            RhoMode::Pooled => "pooled",
            RhoMode::PerDrop => "per_drop",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSummary {
    pub tech: Tech,
    pub mean_rate_bps: f64,
    /// Pooled over all samples of all drops.
    pub rho_var: Option<f64>,
    /// Mean of the per-drop indices (drops with zero mean rate skipped).
    pub rho_var_per_drop: Option<f64>,
    /// Pooled time fraction.
    pub outage_prob: f64,
    pub n_drops: usize,
    /// 95% half-widths across drops; `None` with fewer than two drops.
    pub ci_rate: Option<f64>,
    pub ci_rho: Option<f64>,
    pub ci_outage: Option<f64>,
    pub alignment_losses: u64,
    pub slots: u64,
}

impl MetricsSummary {
    pub fn rho(&self, mode: RhoMode) -> Option<f64> {
        match mode {
            RhoMode::Pooled => self.rho_var,
            RhoMode::PerDrop => self.rho_var_per_drop,
        }
    }

    /// Alignment-loss events per tracking slot.
    pub fn loss_per_slot(&self) -> f64 {
        if self.slots == 0 {
            0.0
        } else {
            self.alignment_losses as f64 / self.slots as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignMetrics {
    pub lte: MetricsSummary,
    pub mmw: MetricsSummary,
    /// Sorted by drop index.
    pub drops: Vec<DropMetrics>,
}

impl CampaignMetrics {
    pub fn summary(&self, tech: Tech) -> &MetricsSummary {
        match tech {
            Tech::Lte => &self.lte,
            Tech::MmWave => &self.mmw,
        }
    }

    pub fn per_drop_rates(&self, tech: Tech) -> Vec<f64> {
        self.drops.iter().map(|d| d.tech(tech).mean).collect()
    }

    pub fn per_drop_outage(&self, tech: Tech) -> Vec<f64> {
        self.drops.iter().map(|d| d.tech(tech).outage_fraction()).collect()
    }
}

/// Sample mean and 95% normal-approximation half-width.
pub fn mean_ci(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, Some(Z95 * libm::sqrt(var / n as f64)))
}

/// Mean of `a[i] − b[i]` with its 95% half-width, for paired (common random
/// number) comparisons.
pub fn paired_difference(a: &[f64], b: &[f64]) -> Result<(f64, Option<f64>), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::EmptySeries);
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    Ok(mean_ci(&diffs))
}

fn summarize(drops: &[DropMetrics], tech: Tech) -> MetricsSummary {
    let pooled = drops
        .iter()
        .fold(SeriesStats::default(), |acc, d| acc.merge(d.tech(tech)));
    let rates: Vec<f64> = drops.iter().map(|d| d.tech(tech).mean).collect();
    let outages: Vec<f64> = drops.iter().map(|d| d.tech(tech).outage_fraction()).collect();
    let rhos: Vec<f64> = drops.iter().filter_map(|d| d.tech(tech).stability()).collect();
    let (_, ci_rate) = mean_ci(&rates);
    let (_, ci_outage) = mean_ci(&outages);
    let (rho_mean, ci_rho) = mean_ci(&rhos);
    let (losses, slots) = match tech {
        Tech::Lte => (0, 0),
        Tech::MmWave => drops
            .iter()
            .fold((0, 0), |(l, s), d| (l + d.alignment_losses, s + d.slots)),
    };
    MetricsSummary {
        tech,
        mean_rate_bps: pooled.mean,
        rho_var: pooled.stability(),
        rho_var_per_drop: (!rhos.is_empty()).then_some(rho_mean),
        outage_prob: pooled.outage_fraction(),
        n_drops: drops.len(),
        ci_rate,
        ci_rho,
        ci_outage,
        alignment_losses: losses,
        slots,
    }
}

/// Cross-drop summary for both technologies. The result does not depend on
/// the order of `drops`.
pub fn aggregate(drops: &[DropMetrics]) -> Result<CampaignMetrics, MetricsError> {
    if drops.is_empty() {
        return Err(MetricsError::NoDrops);
    }
    let mut sorted = drops.to_vec();
    sorted.sort_by(|a, b| {
        a.drop_index
            .cmp(&b.drop_index)
            .then(a.lte.mean.total_cmp(&b.lte.mean))
            .then(a.mmw.mean.total_cmp(&b.mmw.mean))
            .then(a.lte.m2.total_cmp(&b.lte.m2))
            .then(a.mmw.m2.total_cmp(&b.mmw.m2))
            .then(a.lte.outage.cmp(&b.lte.outage))
            .then(a.mmw.outage.cmp(&b.mmw.outage))
    });
    Ok(CampaignMetrics {
        lte: summarize(&sorted, Tech::Lte),
        mmw: summarize(&sorted, Tech::MmWave),
        drops: sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn stability_examples() {
        assert_eq!(stability_index(&[3.0; 10]).unwrap(), 0.0);
        let alt: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 0.0 } else { 2.0 }).collect();
        assert!((stability_index(&alt).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(stability_index(&[0.0; 5]), Err(MetricsError::ZeroMean));
        assert_eq!(stability_index(&[]), Err(MetricsError::EmptySeries));
    }

    #[test]
    fn outage_examples() {
        assert_eq!(outage_probability(&[5.0; 8], -5.0).unwrap(), 0.0);
        assert_eq!(outage_probability(&[-10.0, 0.0, -6.0, 3.0], -5.0).unwrap(), 0.5);
        assert_eq!(outage_probability(&[-5.0], -5.0).unwrap(), 0.0);
        assert_eq!(outage_probability(&[f64::NEG_INFINITY], -5.0).unwrap(), 1.0);
    }

    fn drop_with(index: u64, rates: &[f64], snrs: &[f64]) -> DropMetrics {
        let s = SeriesStats::from_series(rates, snrs, -5.0).unwrap();
        DropMetrics {
            drop_index: index,
            lte: s,
            mmw: s,
            alignment_losses: index,
            slots: 10,
        }
    }

    #[test]
    fn single_drop_summary() {
        let d = drop_with(0, &[1.0, 3.0], &[0.0, -9.0]);
        let c = aggregate(&[d]).unwrap();
        assert_eq!(c.mmw.mean_rate_bps, 2.0);
        assert_eq!(c.mmw.outage_prob, 0.5);
        assert!((c.mmw.rho_var.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(c.mmw.ci_rate, None);
        assert_eq!(c.mmw.n_drops, 1);
    }

    #[test]
    fn identical_drops_have_zero_width() {
        let drops: Vec<DropMetrics> = (0..5)
            .map(|i| {
                let mut d = drop_with(i, &[1.0, 3.0], &[0.0, -9.0]);
                d.alignment_losses = 0;
                d
            })
            .collect();
        let c = aggregate(&drops).unwrap();
        assert_eq!(c.mmw.ci_rate, Some(0.0));
        assert_eq!(c.mmw.ci_outage, Some(0.0));
    }

    #[test]
    fn no_drops() {
        assert_eq!(aggregate(&[]), Err(MetricsError::NoDrops));
    }

    #[test]
    fn bernoulli_outage_estimate() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let drops: Vec<DropMetrics> = (0..10_000)
            .map(|i| {
                let snr = if rng.random::<f64>() < 0.1 { -20.0 } else { 10.0 };
                drop_with(i, &[1.0], &[snr])
            })
            .collect();
        let c = aggregate(&drops).unwrap();
        assert!((c.mmw.outage_prob - 0.1).abs() < 0.006);
        let ci = c.mmw.ci_outage.unwrap();
        assert!((ci - Z95 * (0.09f64 / 10_000.0).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn pooled_equals_concatenated() {
        let a = [1.0, 4.0, 2.0];
        let b = [7.0, 0.0, 5.0, 5.0];
        let d0 = drop_with(0, &a, &[0.0; 3]);
        let d1 = drop_with(1, &b, &[0.0; 4]);
        let c = aggregate(&[d0, d1]).unwrap();
        let all: Vec<f64> = a.iter().chain(&b).copied().collect();
        assert!((c.lte.rho_var.unwrap() - stability_index(&all).unwrap()).abs() < 1e-12);
        assert_eq!(c.mmw.alignment_losses, 1);
        assert_eq!(c.mmw.slots, 20);
        assert_eq!(c.lte.slots, 0);
    }

    #[test]
    fn paired_difference_ci() {
        let (m, ci) = paired_difference(&[3.0, 4.0, 5.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert_eq!(ci, Some(0.0));
        assert!(paired_difference(&[1.0], &[]).is_err());
    }

    proptest! {
        #[test]
        fn stability_scale_invariant(xs in prop::collection::vec(0.0f64..1e3, 2..50), c in 1e-3f64..1e6) {
            prop_assume!(xs.iter().sum::<f64>() > 1e-6);
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let a = stability_index(&xs).unwrap();
            let b = stability_index(&scaled).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn outage_monotone_in_threshold(xs in prop::collection::vec(-30.0f64..30.0, 1..50), t1 in -40.0f64..40.0, t2 in -40.0f64..40.0) {
            let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(outage_probability(&xs, lo).unwrap() <= outage_probability(&xs, hi).unwrap());
        }

        #[test]
        fn aggregate_order_independent(
            series in prop::collection::vec(prop::collection::vec(0.0f64..1e9, 1..20), 1..12),
            seed in any::<u64>(),
        ) {
            let drops: Vec<DropMetrics> = series.iter().enumerate()
                .map(|(i, r)| drop_with(i as u64, r, &vec![0.0; r.len()]))
                .collect();
            let mut shuffled = drops.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..shuffled.len()).rev() {
                let j = rng.random_range(0..=i);
                shuffled.swap(i, j);
            }
            prop_assert_eq!(aggregate(&drops).unwrap(), aggregate(&shuffled).unwrap());
        }
    }
}
