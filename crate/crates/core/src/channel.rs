//! LOS/NLOS state processes, path-loss laws, shadowing and Rayleigh fading
//! for the LTE (2 GHz) and mmWave (28 GHz) links.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::deployment::{Rsu, Tech};
use crate::error::ConfigError;
use crate::geometry::{distance, Position};
use crate::rng::RngStream;
use crate::units::{Decibel, LinearRatio};

/// LOS probability as a function of planar distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LosModel {
    /// `min(d1/d, 1)·(1 − e^{−d/d2}) + e^{−d/d2}`
    ThreeGpp { d1_m: f64, d2_m: f64 },
    /// `e^{−decay·d}`
    Exponential { decay_per_m: f64 },
}

impl LosModel {
    pub const LTE_DEFAULT: LosModel = LosModel::ThreeGpp {
        d1_m: 18.0,
        d2_m: 36.0,
    };
    pub const MMWAVE_DEFAULT: LosModel = LosModel::Exponential {
        decay_per_m: 0.0149,
    };

    pub fn probability(&self, d: f64) -> f64 {
        let d = d.max(0.0);
        match *self {
            LosModel::ThreeGpp { d1_m, d2_m } => {
                let tail = libm::exp(-d / d2_m);
                let near = if d > 0.0 { (d1_m / d).min(1.0) } else { 1.0 };
                (near * (1.0 - tail) + tail).clamp(0.0, 1.0)
            }
            LosModel::Exponential { decay_per_m } => libm::exp(-decay_per_m * d),
        }
    }
}

/// `intercept + slope·log10(d / unit)` in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossLaw {
    pub intercept_db: f64,
    pub slope_db_per_decade: f64,
    pub distance_unit_m: f64,
}

impl PathLossLaw {
    pub fn eval(&self, d_m: f64) -> f64 {
        self.intercept_db + self.slope_db_per_decade * libm::log10(d_m / self.distance_unit_m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub lte_los: LosModel,
    pub mmw_los: LosModel,
    pub lte_pl_los: PathLossLaw,
    pub lte_pl_nlos: PathLossLaw,
    pub mmw_pl_los: PathLossLaw,
    pub mmw_pl_nlos: PathLossLaw,
    pub sigma_los_db: f64,
    pub sigma_nlos_db: f64,
    /// Distance the vehicle must travel before the LOS state is redrawn.
    pub los_corr_m: f64,
    /// Distance the vehicle must travel before mmWave shadowing is redrawn.
    pub shadow_corr_m: f64,
    /// Distances below this are clamped before evaluating a path-loss law.
    pub d_min_m: f64,
    pub mmw_fading: bool,
    /// Pins every link to LOS (`Some(true)`) or NLOS (`Some(false)`).
    pub los_override: Option<bool>,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            lte_los: LosModel::LTE_DEFAULT,
            mmw_los: LosModel::MMWAVE_DEFAULT,
            lte_pl_los: PathLossLaw {
                intercept_db: 103.4,
                slope_db_per_decade: 24.2,
                distance_unit_m: 1000.0,
            },
            lte_pl_nlos: PathLossLaw {
                intercept_db: 131.1,
                slope_db_per_decade: 42.8,
                distance_unit_m: 1000.0,
            },
            mmw_pl_los: PathLossLaw {
                intercept_db: 61.4,
                slope_db_per_decade: 20.0,
                distance_unit_m: 1.0,
            },
            mmw_pl_nlos: PathLossLaw {
                intercept_db: 72.0,
                slope_db_per_decade: 29.2,
                distance_unit_m: 1.0,
            },
            sigma_los_db: 5.8,
            sigma_nlos_db: 8.7,
            los_corr_m: 10.0,
            shadow_corr_m: 10.0,
            d_min_m: 1.0,
            mmw_fading: true,
            los_override: None,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let nonneg = |key, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(key, "must be non-negative"))
            }
        };
        nonneg("sigma_los_db", self.sigma_los_db)?;
        nonneg("sigma_nlos_db", self.sigma_nlos_db)?;
        nonneg("los_corr_m", self.los_corr_m)?;
        nonneg("shadow_corr_m", self.shadow_corr_m)?;
        if !(self.d_min_m > 0.0) {
            return Err(ConfigError::new("d_min_m", "must be positive"));
        }
        if let LosModel::Exponential { decay_per_m } = self.mmw_los {
            if !(decay_per_m > 0.0) {
                return Err(ConfigError::new("a_los", "must be positive"));
            }
        }
        match self.lte_los {
            LosModel::ThreeGpp { d1_m, d2_m } if !(d1_m > 0.0 && d2_m > 0.0) => {
                return Err(ConfigError::new("lte_los_d1_m", "distances must be positive"));
            }
            LosModel::Exponential { decay_per_m } if !(decay_per_m > 0.0) => {
                return Err(ConfigError::new("lte_los_decay_per_m", "must be positive"));
            }
            _ => {}
        }
        for (key, law) in [
            ("lte_pl_distance_unit_m", &self.lte_pl_los),
            ("lte_pl_distance_unit_m", &self.lte_pl_nlos),
            ("mmw_pl_distance_unit_m", &self.mmw_pl_los),
            ("mmw_pl_distance_unit_m", &self.mmw_pl_nlos),
        ] {
            if !(law.distance_unit_m > 0.0) {
                return Err(ConfigError::new(key, "must be positive"));
            }
        }
        Ok(())
    }

    pub fn los_probability(&self, tech: Tech, d: f64) -> f64 {
        match tech {
            Tech::Lte => self.lte_los.probability(d),
            Tech::MmWave => self.mmw_los.probability(d),
        }
    }

    /// Path loss in dB including the given shadowing term.
    pub fn path_loss(&self, tech: Tech, d: f64, los: bool, shadow: Decibel) -> Decibel {
        let law = match (tech, los) {
            (Tech::Lte, true) => &self.lte_pl_los,
            (Tech::Lte, false) => &self.lte_pl_nlos,
            (Tech::MmWave, true) => &self.mmw_pl_los,
            (Tech::MmWave, false) => &self.mmw_pl_nlos,
        };
        Decibel(law.eval(d.max(self.d_min_m)) + shadow.0)
    }

    pub fn shadow_sigma(&self, los: bool) -> f64 {
        if los {
            self.sigma_los_db
        } else {
            self.sigma_nlos_db
        }
    }
}

pub fn lte_los_probability(d: f64) -> f64 {
    LosModel::LTE_DEFAULT.probability(d)
}

pub fn mmwave_los_probability(d: f64) -> f64 {
    LosModel::MMWAVE_DEFAULT.probability(d)
}

/// Distance in meters; the law itself is evaluated in kilometers.
pub fn lte_path_loss(d: f64, los: bool) -> Decibel {
    ChannelParams::default().path_loss(Tech::Lte, d, los, Decibel(0.0))
}

pub fn mmwave_path_loss(d: f64, los: bool, shadow: Decibel) -> Decibel {
    ChannelParams::default().path_loss(Tech::MmWave, d, los, shadow)
}

pub fn sample_shadowing<R: Rng + ?Sized>(los: bool, params: &ChannelParams, rng: &mut R) -> Decibel {
    let z: f64 = StandardNormal.sample(rng);
    Decibel(z * params.shadow_sigma(los))
}

/// Unit-mean exponential power gain (squared Rayleigh amplitude).
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> LinearRatio {
    let g: f64 = Exp1.sample(rng);
    LinearRatio::new(g).expect("exponential samples are non-negative")
}

/// Independent generators for the three random processes of one link.
#[derive(Debug, Clone)]
pub struct LinkRng {
    pub los: ChaCha8Rng,
    pub shadow: ChaCha8Rng,
    pub fading: ChaCha8Rng,
}

impl LinkRng {
    /// Streams `los`, `shadow` and `fading` of `drop`, indexed by link.
    pub fn new(drop: &RngStream, tech: Tech, rsu_id: u32) -> Self {
        let key = (match tech {
            Tech::Lte => 0u64,
            Tech::MmWave => 1u64,
        } << 32)
            | u64::from(rsu_id);
        Self {
            los: drop.derive("los", key).rng(),
            shadow: drop.derive("shadow", key).rng(),
            fading: drop.derive("fading", key).rng(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkState {
    pub rsu_id: u32,
    pub tech: Tech,
    pub los: bool,
    /// Always zero on LTE links.
    pub shadow_db: Decibel,
    pub fading_linear: LinearRatio,
    /// Includes `shadow_db`.
    pub path_loss_db: Decibel,
    pub distance_m: f64,
    pub last_resample_pos: Position,
    pub last_shadow_pos: Position,
}

fn draw_los<R: Rng + ?Sized>(params: &ChannelParams, tech: Tech, d: f64, rng: &mut R) -> bool {
    // always consume one draw so the stream layout does not depend on overrides
    let u = rng.random::<f64>();
    params
        .los_override
        .unwrap_or_else(|| u < params.los_probability(tech, d))
}

fn draw_shadow<R: Rng + ?Sized>(params: &ChannelParams, tech: Tech, los: bool, rng: &mut R) -> Decibel {
    match tech {
        Tech::Lte => Decibel(0.0),
        Tech::MmWave => sample_shadowing(los, params, rng),
    }
}

fn draw_fading<R: Rng + ?Sized>(params: &ChannelParams, tech: Tech, rng: &mut R) -> LinearRatio {
    match tech {
        Tech::MmWave if !params.mmw_fading => LinearRatio::ONE,
        _ => sample_fading(rng),
    }
}

impl LinkState {
    pub fn new(rsu: &Rsu, pos: Position, params: &ChannelParams, rng: &mut LinkRng) -> Self {
        let d = distance(pos, rsu.position);
        let los = draw_los(params, rsu.tech, d, &mut rng.los);
        let shadow = draw_shadow(params, rsu.tech, los, &mut rng.shadow);
        let fading = draw_fading(params, rsu.tech, &mut rng.fading);
        Self {
            rsu_id: rsu.id,
            tech: rsu.tech,
            los,
            shadow_db: shadow,
            fading_linear: fading,
            path_loss_db: params.path_loss(rsu.tech, d, los, shadow),
            distance_m: d,
            last_resample_pos: pos,
            last_shadow_pos: pos,
        }
    }
}

/// Advances a link by one time step. LOS state (with a fresh shadowing
/// draw) is resampled once the vehicle has moved `los_corr_m` since the
/// last resample; shadowing alone is redrawn after `shadow_corr_m`. Fading
/// is redrawn and path loss recomputed every step.
pub fn evolve_link_state(
    state: &LinkState,
    new_pos: Position,
    rsu: &Rsu,
    params: &ChannelParams,
    rng: &mut LinkRng,
) -> LinkState {
    let d = distance(new_pos, rsu.position);
    let mut next = *state;
    next.distance_m = d;
    if distance(state.last_resample_pos, new_pos) >= params.los_corr_m {
        next.los = draw_los(params, rsu.tech, d, &mut rng.los);
        next.shadow_db = draw_shadow(params, rsu.tech, next.los, &mut rng.shadow);
        next.last_resample_pos = new_pos;
        next.last_shadow_pos = new_pos;
    } else if distance(state.last_shadow_pos, new_pos) >= params.shadow_corr_m {
        next.shadow_db = draw_shadow(params, rsu.tech, next.los, &mut rng.shadow);
        next.last_shadow_pos = new_pos;
    }
    next.fading_linear = draw_fading(params, rsu.tech, &mut rng.fading);
    next.path_loss_db = params.path_loss(rsu.tech, d, next.los, next.shadow_db);
    next
}
