//! Planar geometry. Distances are in meters, angles in radians.

use core::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Position, frac: f64) -> Position {
        Position::new(
            self.x + (other.x - self.x) * frac,
            self.y + (other.y - self.y) * frac,
        )
    }
}

pub fn distance(a: Position, b: Position) -> f64 {
    libm::hypot(b.x - a.x, b.y - a.y)
}

/// Direction of `to` as seen from `from`, in `[0, 2π)`. Coincident points
/// give 0.
pub fn bearing(from: Position, to: Position) -> f64 {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    normalize_bearing(libm::atan2(dy, dx))
}

/// Maps an angle into `[0, 2π)`.
pub fn normalize_bearing(angle: f64) -> f64 {
    let a = angle % TAU;
    let a = if a < 0.0 { a + TAU } else { a };
    // -tiny % TAU + TAU rounds to TAU
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Maps an angle into `[-π, π]`.
pub fn wrap_offset(angle: f64) -> f64 {
    if (-PI..=PI).contains(&angle) {
        return angle;
    }
    let a = normalize_bearing(angle);
    if a > PI {
        a - TAU
    } else {
        a
    }
}
