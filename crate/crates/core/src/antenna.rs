//! Two-lobe sectored array patterns and slotted beam tracking.
//!
//! An array of `n` elements has a flat main lobe of gain `10·log10(n)` dBi
//! and width `scale/√n` degrees, and a flat side lobe covering the rest of
//! the azimuth circle. A single element is omnidirectional.

use core::f64::consts::TAU;

use crate::deployment::Rsu;
use crate::error::ConfigError;
use crate::geometry::{bearing, wrap_offset, Position};
use crate::units::Decibel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternParams {
    /// Side-lobe level below the main lobe.
    pub side_lobe_drop_db: f64,
    /// Side-lobe level is never below this.
    pub side_lobe_floor_dbi: f64,
    /// Main-lobe width of a single-element-equivalent array, degrees.
    pub beamwidth_scale_deg: f64,
}

impl Default for PatternParams {
    fn default() -> Self {
        Self {
            side_lobe_drop_db: 20.0,
            side_lobe_floor_dbi: -10.0,
            beamwidth_scale_deg: 102.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayConfig {
    pub elements: u32,
    pub main_gain_db: Decibel,
    pub side_gain_db: Decibel,
    pub beamwidth_rad: f64,
}

/// Array sizes used by the reference scenarios.
pub const TABULATED_SIZES: [u32; 4] = [1, 4, 16, 64];

pub fn make_array(elements: u32) -> Result<ArrayConfig, ConfigError> {
    make_array_with(elements, &PatternParams::default())
}

pub fn make_array_with(elements: u32, params: &PatternParams) -> Result<ArrayConfig, ConfigError> {
    if elements < 1 {
        return Err(ConfigError::new("elements", "array needs at least one element"));
    }
    if !TABULATED_SIZES.contains(&elements) {
        log::warn!("array size {elements} is outside the tabulated set {TABULATED_SIZES:?}");
    }
    if elements == 1 {
        return Ok(ArrayConfig {
            elements,
            main_gain_db: Decibel(0.0),
            side_gain_db: Decibel(0.0),
            beamwidth_rad: TAU,
        });
    }
    let main = 10.0 * libm::log10(elements as f64);
    let side = (main - params.side_lobe_drop_db).max(params.side_lobe_floor_dbi);
    let width_deg = params.beamwidth_scale_deg / libm::sqrt(elements as f64);
    Ok(ArrayConfig {
        elements,
        main_gain_db: Decibel(main),
        side_gain_db: Decibel(side.min(main)),
        beamwidth_rad: width_deg.to_radians().min(TAU),
    })
}

impl ArrayConfig {
    pub fn is_omni(&self) -> bool {
        self.beamwidth_rad >= TAU
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.beamwidth_rad
    }
}

/// Gain toward a direction `offset` radians away from boresight.
pub fn pattern_gain(array: &ArrayConfig, offset: f64) -> Decibel {
    if libm::fabs(wrap_offset(offset)) <= array.half_width() {
        array.main_gain_db
    } else {
        array.side_gain_db
    }
}

/// Beam pointing of one link, fixed between alignment slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamState {
    pub vehicle_boresight: f64,
    pub rsu_boresight: f64,
    pub aligned_at_slot: u64,
    pub serving_rsu: u32,
    pub lost: bool,
}

/// Points both ends at each other. Coincident endpoints give boresight 0.
pub fn realign(vehicle_pos: Position, rsu: &Rsu, slot: u64) -> BeamState {
    BeamState {
        vehicle_boresight: bearing(vehicle_pos, rsu.position),
        rsu_boresight: bearing(rsu.position, vehicle_pos),
        aligned_at_slot: slot,
        serving_rsu: rsu.id,
        lost: false,
    }
}

/// Combined vehicle + RSU gain for the current geometry with the beams
/// frozen at their last alignment. Leaving either main lobe latches the
/// link into the side-lobe state until the next [`realign`].
pub fn tracked_gain(
    beam: &BeamState,
    vehicle_array: &ArrayConfig,
    rsu_array: &ArrayConfig,
    vehicle_pos: Position,
    rsu: &Rsu,
) -> (Decibel, BeamState) {
    debug_assert_eq!(beam.serving_rsu, rsu.id);
    let mut next = *beam;
    if !next.lost {
        let veh_off = wrap_offset(bearing(vehicle_pos, rsu.position) - beam.vehicle_boresight);
        let rsu_off = wrap_offset(bearing(rsu.position, vehicle_pos) - beam.rsu_boresight);
        if libm::fabs(veh_off) > vehicle_array.half_width()
            || libm::fabs(rsu_off) > rsu_array.half_width()
        {
            next.lost = true;
        }
    }
    let gain = if next.lost {
        vehicle_array.side_gain_db + rsu_array.side_gain_db
    } else {
        vehicle_array.main_gain_db + rsu_array.main_gain_db
    };
    (gain, next)
}
