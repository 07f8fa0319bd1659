//! Flat `key = value` run configuration.
//!
//! Every simulation parameter has exactly one key. The canonical dump lists
//! all keys in table order with their effective values; its SHA-256 is the
//! config hash recorded in run manifests.

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use v2n_core::channel::LosModel;
use v2n_core::engine::TraceSource;
use v2n_core::mobility::{Heading, TripStart};
use v2n_core::{RhoMode, SimConfig};

use crate::error::SimError;

/// Grid of campaign points swept by `sweep`. Empty axes fall back to the
/// single value in the base config.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepGrid {
    pub lambda_mmw: Vec<f64>,
    /// (N, M) pairs.
    pub arrays: Vec<(u32, u32)>,
    pub t_tr_s: Vec<f64>,
    /// Emit the LTE baseline row.
    pub include_lte: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub sweep: SweepGrid,
    /// External trace; synthetic random trip when `None`.
    pub trace_file: Option<PathBuf>,
    /// Number of leading drops written by `--emit-timeseries`.
    pub timeseries_drops: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            sweep: SweepGrid {
                include_lte: true,
                ..Default::default()
            },
            trace_file: None,
            timeseries_drops: 1,
        }
    }
}

type Getter = fn(&RunConfig) -> String;
type Setter = fn(&mut RunConfig, &str) -> Result<(), String>;

struct Key {
    name: &'static str,
    get: Getter,
    set: Setter,
}

fn num(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{v}` is not finite"))
    }
}

fn uint<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

fn flag(v: &str) -> Result<bool, String> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(format!("`{v}` is not a boolean (true/false/on/off)")),
    }
}

fn on_off(b: bool) -> String {
    if b { "on" } else { "off" }.to_string()
}

fn list<T>(v: &str, item: fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| item(s.trim())).collect()
}

fn join<T>(xs: &[T], f: fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(",")
}

/// Parses `NxM` into an (N, M) array pair.
pub fn parse_array_pair(v: &str) -> Result<(u32, u32), String> {
    let (n, m) = v
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("`{v}` is not of the form NxM"))?;
    Ok((uint(n.trim())?, uint(m.trim())?))
}

fn heading_name(h: Heading) -> &'static str {
    match h {
        Heading::East => "east",
        Heading::North => "north",
        Heading::West => "west",
        Heading::South => "south",
    }
}

fn parse_start(v: &str) -> Result<Option<TripStart>, String> {
    if v.eq_ignore_ascii_case("none") || v.is_empty() {
        return Ok(None);
    }
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    let [i, j, h] = parts[..] else {
        return Err(format!("`{v}` is not `none` or `i,j,heading`"));
    };
    let heading = match h.to_ascii_lowercase().as_str() {
        "east" => Heading::East,
        "north" => Heading::North,
        "west" => Heading::West,
        "south" => Heading::South,
        _ => return Err(format!("unknown heading `{h}`")),
    };
    Ok(Some(TripStart {
        node: (uint(i)?, uint(j)?),
        heading,
    }))
}

fn three_gpp(c: &RunConfig) -> (f64, f64) {
    match c.sim.channel.lte_los {
        LosModel::ThreeGpp { d1_m, d2_m } => (d1_m, d2_m),
        LosModel::Exponential { .. } => (f64::NAN, f64::NAN),
    }
}

fn a_los(c: &RunConfig) -> f64 {
    match c.sim.channel.mmw_los {
        LosModel::Exponential { decay_per_m } => decay_per_m,
        LosModel::ThreeGpp { .. } => f64::NAN,
    }
}

macro_rules! f64_key {
    ($name:literal, $($path:ident).+) => {
        Key {
            name: $name,
            get: |c| c.$($path).+.to_string(),
            set: |c, v| {
                c.$($path).+ = num(v)?;
                Ok(())
            },
        }
    };
}

macro_rules! uint_key {
    ($name:literal, $($path:ident).+) => {
        Key {
            name: $name,
            get: |c| c.$($path).+.to_string(),
            set: |c, v| {
                c.$($path).+ = uint(v)?;
                Ok(())
            },
        }
    };
}

macro_rules! bool_key {
    ($name:literal, $($path:ident).+) => {
        Key {
            name: $name,
            get: |c| c.$($path).+.to_string(),
            set: |c, v| {
                c.$($path).+ = flag(v)?;
                Ok(())
            },
        }
    };
}

static KEYS: &[Key] = &[
    uint_key!("root_seed", sim.root_seed),
    uint_key!("n_drops", sim.n_drops),
    f64_key!("dt_s", sim.dt_s),
    f64_key!("t_tr_s", sim.t_tr_s),
    // Deployment
    f64_key!("area_side_m", sim.deployment.area_side_m),
    f64_key!("lambda_lte", sim.deployment.lambda_lte),
    f64_key!("lambda_mmw", sim.deployment.lambda_mmw),
    uint_key!("min_lte_rsus", sim.deployment.min_lte_rsus),
    bool_key!("fixed_lte_layout", sim.fixed_lte_layout),
    // Radios
    f64_key!("tx_power_mmw_dbm", sim.mmw_radio.tx_power_dbm),
    f64_key!("tx_power_lte_dbm", sim.lte_radio.tx_power_dbm),
    f64_key!("bandwidth_mmw_hz", sim.mmw_radio.bandwidth_hz),
    f64_key!("bandwidth_lte_hz", sim.lte_radio.bandwidth_hz),
    f64_key!("carrier_mmw_hz", sim.mmw_radio.carrier_hz),
    f64_key!("carrier_lte_hz", sim.lte_radio.carrier_hz),
    f64_key!("noise_figure_mmw_db", sim.mmw_radio.noise_figure_db),
    f64_key!("noise_figure_lte_db", sim.lte_radio.noise_figure_db),
    f64_key!("outage_threshold_db", sim.outage_threshold_db),
    bool_key!("sinr_mode", sim.sinr_mode),
    Key {
        name: "rho_mode",
        get: |c| c.sim.rho_mode.label().to_string(),
        set: |c, v| {
            c.sim.rho_mode = match v {
                "pooled" => RhoMode::Pooled,
                "per_drop" => RhoMode::PerDrop,
                _ => return Err(format!("`{v}` is not `pooled` or `per_drop`")),
            };
            Ok(())
        },
    },
    // Antennas
    uint_key!("vehicle_elements", sim.vehicle_elements),
    uint_key!("rsu_elements", sim.rsu_elements),
    f64_key!("side_lobe_drop_db", sim.pattern.side_lobe_drop_db),
    f64_key!("side_lobe_floor_dbi", sim.pattern.side_lobe_floor_dbi),
    f64_key!("beamwidth_scale_deg", sim.pattern.beamwidth_scale_deg),
    // Channel
    Key {
        name: "lte_los_d1_m",
        get: |c| three_gpp(c).0.to_string(),
        set: |c, v| {
            let d2 = three_gpp(c).1;
            c.sim.channel.lte_los = LosModel::ThreeGpp { d1_m: num(v)?, d2_m: d2 };
            Ok(())
        },
    },
    Key {
        name: "lte_los_d2_m",
        get: |c| three_gpp(c).1.to_string(),
        set: |c, v| {
            let d1 = three_gpp(c).0;
            c.sim.channel.lte_los = LosModel::ThreeGpp { d1_m: d1, d2_m: num(v)? };
            Ok(())
        },
    },
    Key {
        name: "a_los",
        get: |c| a_los(c).to_string(),
        set: |c, v| {
            c.sim.channel.mmw_los = LosModel::Exponential { decay_per_m: num(v)? };
            Ok(())
        },
    },
    f64_key!("lte_pl_los_intercept_db", sim.channel.lte_pl_los.intercept_db),
    f64_key!("lte_pl_los_slope_db", sim.channel.lte_pl_los.slope_db_per_decade),
    f64_key!("lte_pl_nlos_intercept_db", sim.channel.lte_pl_nlos.intercept_db),
    f64_key!("lte_pl_nlos_slope_db", sim.channel.lte_pl_nlos.slope_db_per_decade),
    Key {
        name: "lte_pl_distance_unit_m",
        get: |c| c.sim.channel.lte_pl_los.distance_unit_m.to_string(),
        set: |c, v| {
            let u = num(v)?;
            c.sim.channel.lte_pl_los.distance_unit_m = u;
            c.sim.channel.lte_pl_nlos.distance_unit_m = u;
            Ok(())
        },
    },
    f64_key!("mmw_pl_los_intercept_db", sim.channel.mmw_pl_los.intercept_db),
    f64_key!("mmw_pl_los_slope_db", sim.channel.mmw_pl_los.slope_db_per_decade),
    f64_key!("mmw_pl_nlos_intercept_db", sim.channel.mmw_pl_nlos.intercept_db),
    f64_key!("mmw_pl_nlos_slope_db", sim.channel.mmw_pl_nlos.slope_db_per_decade),
    Key {
        name: "mmw_pl_distance_unit_m",
        get: |c| c.sim.channel.mmw_pl_los.distance_unit_m.to_string(),
        set: |c, v| {
            let u = num(v)?;
            c.sim.channel.mmw_pl_los.distance_unit_m = u;
            c.sim.channel.mmw_pl_nlos.distance_unit_m = u;
            Ok(())
        },
    },
    f64_key!("sigma_los_db", sim.channel.sigma_los_db),
    f64_key!("sigma_nlos_db", sim.channel.sigma_nlos_db),
    f64_key!("los_corr_m", sim.channel.los_corr_m),
    f64_key!("shadow_corr_m", sim.channel.shadow_corr_m),
    f64_key!("d_min_m", sim.channel.d_min_m),
    Key {
        name: "mmw_fading",
        get: |c| on_off(c.sim.channel.mmw_fading),
        set: |c, v| {
            c.sim.channel.mmw_fading = flag(v)?;
            Ok(())
        },
    },
    Key {
        name: "los_override",
        get: |c| {
            match c.sim.channel.los_override {
                None => "none",
                Some(true) => "los",
                Some(false) => "nlos",
            }
            .to_string()
        },
        set: |c, v| {
            c.sim.channel.los_override = match v {
                "none" => None,
                "los" => Some(true),
                "nlos" => Some(false),
                _ => return Err(format!("`{v}` is not `none`, `los` or `nlos`")),
            };
            Ok(())
        },
    },
    // Mobility
    Key {
        name: "trace_file",
        get: |c| {
            c.trace_file
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "none".into())
        },
        set: |c, v| {
            c.trace_file = (!v.is_empty() && v != "none").then(|| PathBuf::from(v));
            Ok(())
        },
    },
    bool_key!("per_drop_trace", sim.per_drop_trace),
    uint_key!("grid_blocks_x", sim.trip.grid.blocks_x),
    uint_key!("grid_blocks_y", sim.trip.grid.blocks_y),
    f64_key!("block_m", sim.trip.grid.block_m),
    f64_key!("grid_origin_x_m", sim.trip.grid.origin.x),
    f64_key!("grid_origin_y_m", sim.trip.grid.origin.y),
    f64_key!("duration_s", sim.trip.duration_s),
    f64_key!("v_max_mps", sim.trip.v_max_mps),
    f64_key!("accel_mps2", sim.trip.accel_mps2),
    f64_key!("decel_mps2", sim.trip.decel_mps2),
    f64_key!("stop_prob", sim.trip.stop_prob),
    f64_key!("stop_time_s", sim.trip.stop_time_s),
    Key {
        name: "trip_start",
        get: |c| match c.sim.trip.start {
            None => "none".into(),
            Some(s) => format!("{},{},{}", s.node.0, s.node.1, heading_name(s.heading)),
        },
        set: |c, v| {
            c.sim.trip.start = parse_start(v)?;
            Ok(())
        },
    },
    // Outputs and sweeps
    uint_key!("timeseries_drops", timeseries_drops),
    Key {
        name: "sweep_lambda_mmw",
        get: |c| join(&c.sweep.lambda_mmw, |x| x.to_string()),
        set: |c, v| {
            c.sweep.lambda_mmw = list(v, num)?;
            Ok(())
        },
    },
    Key {
        name: "sweep_arrays",
        get: |c| join(&c.sweep.arrays, |(n, m)| format!("{n}x{m}")),
        set: |c, v| {
            c.sweep.arrays = list(v, parse_array_pair)?;
            Ok(())
        },
    },
    Key {
        name: "sweep_t_tr_s",
        get: |c| join(&c.sweep.t_tr_s, |x| x.to_string()),
        set: |c, v| {
            c.sweep.t_tr_s = list(v, num)?;
            Ok(())
        },
    },
    bool_key!("sweep_include_lte", sweep.include_lte),
];

/// Alternative spellings accepted on input. Aliases never appear in dumps.
fn alias(key: &str) -> Option<&'static [&'static str]> {
    Some(match key {
        "N" => &["vehicle_elements"],
        "M" => &["rsu_elements"],
        "T_tr_s" => &["t_tr_s"],
        "noise_figure_db" => &["noise_figure_mmw_db", "noise_figure_lte_db"],
        _ => return None,
    })
}

/// All canonical key names in dump order.
pub fn key_names() -> impl Iterator<Item = &'static str> {
    KEYS.iter().map(|k| k.name)
}

impl RunConfig {
    /// Sets one key, accepting aliases.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SimError> {
        let value = value.trim();
        let targets: Vec<&str> = match alias(key) {
            Some(names) => names.to_vec(),
            None => vec![key],
        };
        for name in targets {
            let k = KEYS
                .iter()
                .find(|k| k.name == name)
                .ok_or_else(|| SimError::config(key, "unknown key"))?;
            (k.set)(self, value).map_err(|reason| SimError::config(key, reason))?;
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        KEYS.iter().find(|k| k.name == key).map(|k| (k.get)(self))
    }

    /// Applies a config file body on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), SimError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SimError::Config(format!("line {}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value).map_err(|e| match e {
                SimError::Config(msg) => SimError::Config(format!("line {}: {msg}", i + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Applies a `KEY=VALUE` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), SimError> {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| SimError::Config(format!("override `{kv}` is not KEY=VALUE")))?;
        self.set(key.trim(), value)
    }

    pub fn from_text(text: &str) -> Result<Self, SimError> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Every key with its effective value, one `key = value` line each.
    pub fn canonical_dump(&self) -> String {
        let mut out = String::new();
        for k in KEYS {
            let _ = writeln!(out, "{} = {}", k.name, (k.get)(self));
        }
        out
    }

    /// Lower-case hex SHA-256 of the canonical dump followed by `extra`
    /// (for instance the bytes of an external trace).
    pub fn hash(&self, extra: &[u8]) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_dump().as_bytes());
        h.update(extra);
        h.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Core config with the trace source set from `trace_file`.
    pub fn effective_sim(&self) -> SimConfig {
        let mut sim = self.sim.clone();
        sim.trace_source = if self.trace_file.is_some() {
            TraceSource::External
        } else {
            TraceSource::Synthetic
        };
        sim
    }

    /// Validates the base point and every sweep axis value.
    pub fn validate(&self) -> Result<(), SimError> {
        let base = self.effective_sim();
        base.validate()?;
        if self.sweep.lambda_mmw.iter().any(|&x| x < 0.0) {
            return Err(SimError::config("sweep_lambda_mmw", "densities must be non-negative"));
        }
        if self.sweep.arrays.iter().any(|&(n, m)| n < 1 || m < 1) {
            return Err(SimError::config("sweep_arrays", "arrays need at least one element"));
        }
        for &t in &self.sweep.t_tr_s {
            let point = SimConfig { t_tr_s: t, ..base.clone() };
            point
                .validate()
                .map_err(|e| SimError::config("sweep_t_tr_s", e.reason))?;
        }
        Ok(())
    }
}
