//! Link budget, strongest-server association and Shannon rate.

use crate::channel::LinkState;
use crate::deployment::Tech;
use crate::error::ConfigError;
use crate::units::{db_to_linear, linear_to_db, DbmPower, Decibel, LinearRatio};

/// Thermal noise density at 290 K.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub tx_power_dbm: f64,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
    pub noise_figure_db: f64,
}

impl RadioParams {
    pub const MMWAVE_DEFAULT: RadioParams = RadioParams {
        tx_power_dbm: 30.0,
        bandwidth_hz: 1e9,
        carrier_hz: 28e9,
        noise_figure_db: 10.0,
    };
    pub const LTE_DEFAULT: RadioParams = RadioParams {
        tx_power_dbm: 46.0,
        bandwidth_hz: 20e6,
        carrier_hz: 2e9,
        noise_figure_db: 5.0,
    };

    pub fn validate(&self, tech: Tech) -> Result<(), ConfigError> {
        let (bw, tx) = match tech {
            Tech::Lte => ("bandwidth_lte_hz", "tx_power_lte_dbm"),
            Tech::MmWave => ("bandwidth_mmw_hz", "tx_power_mmw_dbm"),
        };
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(ConfigError::new(bw, "bandwidth must be positive"));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(ConfigError::new(tx, "must be finite"));
        }
        Ok(())
    }

    pub fn noise(&self) -> DbmPower {
        noise_power(self.bandwidth_hz, self.noise_figure_db)
    }
}

/// One time step of one technology. `serving_rsu = None` means no server
/// and carries `snr_db = −∞`, `rate_bps = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub t: f64,
    pub tech: Tech,
    pub serving_rsu: Option<u32>,
    pub snr_db: Decibel,
    pub rate_bps: f64,
    pub lost_alignment: bool,
}

/// Zero fading gives −∞ dBm.
pub fn received_power(
    tx_dbm: DbmPower,
    gain_tx: Decibel,
    gain_rx: Decibel,
    path_loss: Decibel,
    fading: LinearRatio,
) -> DbmPower {
    tx_dbm + gain_tx + gain_rx - path_loss + linear_to_db(fading)
}

pub fn noise_power(bandwidth_hz: f64, noise_figure_db: f64) -> DbmPower {
    DbmPower(THERMAL_NOISE_DBM_PER_HZ + 10.0 * libm::log10(bandwidth_hz) + noise_figure_db)
}

pub fn snr(rx: DbmPower, noise: DbmPower) -> Decibel {
    rx - noise
}

pub fn sinr(rx: DbmPower, noise: DbmPower, interferers: &[DbmPower]) -> Decibel {
    let denom = noise.to_milliwatts() + interferers.iter().map(|p| p.to_milliwatts()).sum::<f64>();
    Decibel(10.0 * libm::log10(rx.to_milliwatts() / denom))
}

/// `W·log2(1 + Γ)` in bit/s.
pub fn shannon_rate(bandwidth_hz: f64, snr_db: Decibel) -> f64 {
    bandwidth_hz * libm::log2(1.0 + db_to_linear(snr_db).value())
}

/// Index of the link with the highest fading-averaged received power, i.e.
/// the lowest shadowed path loss once the (common) boresight gain is added.
/// Ties go to the lowest index.
pub fn associate(links: &[LinkState], boresight_gain: Decibel) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, l) in links.iter().enumerate() {
        let score = boresight_gain.0 - l.path_loss_db.0;
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    best.map(|(i, _)| i)
}
