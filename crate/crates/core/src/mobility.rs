//! Vehicle trajectories.
//!
//! A [`MobilityTrace`] is a validated, time-ordered list of samples. Traces
//! come either from an external file (parsed by the companion crate) or from
//! [`synth_randomtrip`], a Manhattan-grid random-trip generator with
//! traffic-light stops and trapezoidal speed profiles.

use alloc::vec::Vec;
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{ConfigError, TraceError};
use crate::geometry::{distance, Position};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    /// seconds
    pub t: f64,
    pub position: Position,
    /// m/s
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityTrace {
    samples: Vec<TraceSample>,
    dt: Option<f64>,
}

fn uniform_step(samples: &[TraceSample]) -> Option<f64> {
    if samples.len() < 2 {
        return None;
    }
    let step = samples[1].t - samples[0].t;
    let uniform = samples.windows(2).all(|w| {
        let d = w[1].t - w[0].t;
        libm::fabs(d - step) <= 1e-9 * w[1].t.max(1.0)
    });
    uniform.then_some(step)
}

impl MobilityTrace {
    pub fn new(samples: Vec<TraceSample>) -> Result<Self, TraceError> {
        if samples.is_empty() {
            return Err(TraceError::Empty);
        }
        for (index, s) in samples.iter().enumerate() {
            if !(s.t.is_finite() && s.position.is_finite() && s.speed.is_finite()) {
                return Err(TraceError::NonFinite { index });
            }
            if s.t < 0.0 {
                return Err(TraceError::NegativeTime { index });
            }
            if s.speed < 0.0 {
                return Err(TraceError::NegativeSpeed { index });
            }
            if index > 0 && s.t <= samples[index - 1].t {
                return Err(TraceError::NonMonotone { index });
            }
        }
        let dt = uniform_step(&samples);
        Ok(Self { samples, dt })
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample spacing, when the trace is uniformly spaced.
    pub fn dt(&self) -> Option<f64> {
        self.dt
    }

    pub fn span(&self) -> f64 {
        self.samples[self.samples.len() - 1].t - self.samples[0].t
    }

    pub fn max_speed(&self) -> f64 {
        self.samples.iter().map(|s| s.speed).fold(0.0, f64::max)
    }

    pub fn is_uniform_at(&self, dt: f64) -> bool {
        self.dt
            .is_some_and(|d| libm::fabs(d - dt) <= 1e-9 * dt.max(1.0))
    }
}

/// Linear interpolation onto a uniform time grid starting at the first
/// sample. Speeds are finite-difference magnitudes. A trace that is
/// already uniform at `dt` is returned unchanged.
pub fn resample(trace: &MobilityTrace, dt: f64) -> Result<MobilityTrace, TraceError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(TraceError::InvalidStep { dt });
    }
    let span = trace.span();
    if dt > span {
        return Err(TraceError::StepExceedsSpan { dt, span });
    }
    if trace.is_uniform_at(dt) {
        return Ok(trace.clone());
    }
    let src = trace.samples();
    let t0 = src[0].t;
    let n = libm::floor(span / dt + 1e-9) as usize + 1;
    let mut positions = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        let t = t0 + k as f64 * dt;
        while seg + 2 < src.len() && src[seg + 1].t < t {
            seg += 1;
        }
        let (a, b) = (&src[seg], &src[seg + 1]);
        let frac = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
        positions.push((t, a.position.lerp(b.position, frac)));
    }
    let samples = (0..n)
        .map(|k| {
            let (t, position) = positions[k];
            let speed = if k + 1 < n {
                distance(position, positions[k + 1].1) / dt
            } else {
                distance(positions[k - 1].1, position) / dt
            };
            TraceSample { t, position, speed }
        })
        .collect();
    MobilityTrace::new(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heading {
    East,
    North,
    West,
    South,
}

impl Heading {
    const ALL: [Heading; 4] = [Heading::East, Heading::North, Heading::West, Heading::South];

    fn step(self) -> (i64, i64) {
        match self {
            Heading::East => (1, 0),
            Heading::North => (0, 1),
            Heading::West => (-1, 0),
            Heading::South => (0, -1),
        }
    }

    fn reverse(self) -> Heading {
        match self {
            Heading::East => Heading::West,
            Heading::North => Heading::South,
            Heading::West => Heading::East,
            Heading::South => Heading::North,
        }
    }
}

/// Rectangular street grid with `blocks_x × blocks_y` blocks of side
/// `block_m`, lower-left intersection at `origin`. `blocks_y = 0` is a
/// single east-west street.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreetGrid {
    pub blocks_x: u32,
    pub blocks_y: u32,
    pub block_m: f64,
    pub origin: Position,
}

impl StreetGrid {
    pub fn node_position(&self, node: (u32, u32)) -> Position {
        Position::new(
            self.origin.x + node.0 as f64 * self.block_m,
            self.origin.y + node.1 as f64 * self.block_m,
        )
    }

    fn neighbor(&self, node: (u32, u32), heading: Heading) -> Option<(u32, u32)> {
        let (dx, dy) = heading.step();
        let x = node.0 as i64 + dx;
        let y = node.1 as i64 + dy;
        (x >= 0 && y >= 0 && x <= self.blocks_x as i64 && y <= self.blocks_y as i64)
            .then_some((x as u32, y as u32))
    }

    fn feasible(&self, node: (u32, u32)) -> impl Iterator<Item = Heading> + '_ {
        Heading::ALL
            .into_iter()
            .filter(move |h| self.neighbor(node, *h).is_some())
    }

    /// Headings out of `node` for a vehicle arriving with `heading`; U-turns
    /// only at dead ends.
    fn onward(&self, node: (u32, u32), heading: Heading) -> Vec<Heading> {
        let mut out: Vec<Heading> = self
            .feasible(node)
            .filter(|h| *h != heading.reverse())
            .collect();
        if out.is_empty() {
            out.push(heading.reverse());
        }
        out
    }

    fn is_dead_end(&self, node: (u32, u32), heading: Heading) -> bool {
        self.feasible(node).all(|h| h == heading.reverse())
    }

    /// True when `p` lies on one of the grid's street segments.
    pub fn contains(&self, p: Position, tol: f64) -> bool {
        let x = p.x - self.origin.x;
        let y = p.y - self.origin.y;
        let width = self.blocks_x as f64 * self.block_m;
        let height = self.blocks_y as f64 * self.block_m;
        if x < -tol || y < -tol || x > width + tol || y > height + tol {
            return false;
        }
        let on_line = |v: f64| {
            let r = v / self.block_m;
            libm::fabs(r - libm::round(r)) * self.block_m <= tol
        };
        on_line(x) || on_line(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripStart {
    pub node: (u32, u32),
    pub heading: Heading,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomTripParams {
    pub grid: StreetGrid,
    pub duration_s: f64,
    pub dt_s: f64,
    pub v_max_mps: f64,
    pub accel_mps2: f64,
    pub decel_mps2: f64,
    /// Probability of a red light at each intersection reached.
    pub stop_prob: f64,
    pub stop_time_s: f64,
    /// Random node and heading when `None`.
    pub start: Option<TripStart>,
}

impl Default for RandomTripParams {
    fn default() -> Self {
        Self {
            grid: StreetGrid {
                blocks_x: 8,
                blocks_y: 8,
                block_m: 100.0,
                origin: Position::new(100.0, 100.0),
            },
            duration_s: 250.0,
            dt_s: 0.1,
            v_max_mps: 13.89,
            accel_mps2: 2.6,
            decel_mps2: 4.5,
            stop_prob: 0.25,
            stop_time_s: 30.0,
            start: None,
        }
    }
}

fn positive(key: &'static str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(key, "must be positive"))
    }
}

impl RandomTripParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid.blocks_x < 1 {
            return Err(ConfigError::new("grid_blocks_x", "grid needs at least one block"));
        }
        positive("block_m", self.grid.block_m)?;
        if !self.grid.origin.is_finite() {
            return Err(ConfigError::new("grid_origin_x_m", "must be finite"));
        }
        positive("duration_s", self.duration_s)?;
        positive("dt_s", self.dt_s)?;
        positive("v_max_mps", self.v_max_mps)?;
        positive("accel_mps2", self.accel_mps2)?;
        positive("decel_mps2", self.decel_mps2)?;
        if !(0.0..=1.0).contains(&self.stop_prob) {
            return Err(ConfigError::new("stop_prob", "must be a probability"));
        }
        if !(self.stop_time_s >= 0.0 && self.stop_time_s.is_finite()) {
            return Err(ConfigError::new("stop_time_s", "must be non-negative"));
        }
        if let Some(start) = self.start {
            if self.grid.neighbor(start.node, start.heading).is_none() {
                return Err(ConfigError::new("start", "start heading leaves the grid"));
            }
        }
        Ok(())
    }
}

/// A generated trip plus the counters of the intersection process.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomTrip {
    pub trace: MobilityTrace,
    pub intersections: u64,
    pub stops: u64,
}

struct Walker<'a, R: Rng> {
    params: &'a RandomTripParams,
    rng: R,
    node: (u32, u32),
    heading: Heading,
    s: f64,
    v: f64,
    red_light: bool,
    dead_end: bool,
    wait_until: Option<f64>,
    intersections: u64,
    stops: u64,
}

impl<R: Rng> Walker<'_, R> {
    fn position(&self) -> Position {
        let (dx, dy) = self.heading.step();
        let p = self.params.grid.node_position(self.node);
        Position::new(p.x + dx as f64 * self.s, p.y + dy as f64 * self.s)
    }

    fn enter_segment(&mut self, heading: Heading) {
        self.heading = heading;
        let next = self
            .params
            .grid
            .neighbor(self.node, heading)
            .expect("onward headings stay on the grid");
        self.red_light = self.rng.random::<f64>() < self.params.stop_prob;
        self.dead_end = self.params.grid.is_dead_end(next, heading);
    }

    /// Reaches the end node of the current segment with leftover distance
    /// `overflow` carried into the next one.
    fn arrive(&mut self, t_next: f64, overflow: f64) {
        let next = self
            .params
            .grid
            .neighbor(self.node, self.heading)
            .expect("current segment is on the grid");
        self.intersections += 1;
        if self.red_light {
            self.stops += 1;
            self.wait_until = Some(t_next + self.params.stop_time_s);
        }
        let choices = self.params.grid.onward(next, self.heading);
        let heading = *choices.choose(&mut self.rng).expect("non-empty");
        self.node = next;
        self.s = overflow;
        self.enter_segment(heading);
    }

    fn advance(&mut self, t: f64) {
        let p = self.params;
        let dt = p.dt_s;
        let t_next = t + dt;
        if let Some(until) = self.wait_until {
            if t_next < until {
                return;
            }
            self.wait_until = None;
        }
        let block = p.grid.block_m;
        let rem = block - self.s;
        let v_up = (self.v + p.accel_mps2 * dt).min(p.v_max_mps);
        let travel_up = 0.5 * (self.v + v_up) * dt;
        if self.red_light || self.dead_end {
            if travel_up + v_up * v_up / (2.0 * p.decel_mps2) <= rem {
                self.v = v_up;
                self.s += travel_up;
                return;
            }
            let brake = if rem > 1e-9 {
                self.v * self.v / (2.0 * rem)
            } else {
                f64::INFINITY
            };
            let v_next = (self.v - brake * dt).max(0.0);
            let travel = 0.5 * (self.v + v_next) * dt;
            if v_next <= 0.05 || travel >= rem - 1e-3 {
                self.v = 0.0;
                self.arrive(t_next, 0.0);
            } else {
                self.v = v_next;
                self.s += travel;
            }
        } else {
            self.v = v_up;
            self.s += travel_up;
            while self.s >= block && self.wait_until.is_none() {
                let overflow = self.s - block;
                self.arrive(t_next, overflow);
                if self.red_light || self.dead_end {
                    break;
                }
            }
        }
    }
}

/// Manhattan-grid random trip. At every intersection reached, a red light
/// with probability `stop_prob` stops the car for `stop_time_s`; otherwise it
/// drives on in a direction drawn uniformly among the non-reversing
/// options. Speeds follow accel/decel ramps capped at `v_max_mps`.
pub fn synth_randomtrip(
    params: &RandomTripParams,
    stream: &RngStream,
) -> Result<RandomTrip, ConfigError> {
    params.validate()?;
    let mut rng = stream.rng();
    let grid = &params.grid;
    let (node, heading) = match params.start {
        Some(s) => (s.node, s.heading),
        None => {
            let node = (
                rng.random_range(0..=grid.blocks_x),
                rng.random_range(0..=grid.blocks_y),
            );
            let options: Vec<Heading> = grid.feasible(node).collect();
            (node, *options.choose(&mut rng).expect("every node has a street"))
        }
    };
    let mut walker = Walker {
        params,
        rng,
        node,
        heading,
        s: 0.0,
        v: 0.0,
        red_light: false,
        dead_end: false,
        wait_until: None,
        intersections: 0,
        stops: 0,
    };
    walker.enter_segment(heading);

    let n = (libm::round(params.duration_s / params.dt_s) as usize).max(1);
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let t = k as f64 * params.dt_s;
        samples.push(TraceSample {
            t,
            position: walker.position(),
            speed: walker.v,
        });
        walker.advance(t);
    }
    let trace = MobilityTrace::new(samples).expect("generator emits valid samples");
    Ok(RandomTrip {
        trace,
        intersections: walker.intersections,
        stops: walker.stops,
    })
}

pub fn synth_randomtrip_trace(
    params: &RandomTripParams,
    stream: &RngStream,
) -> Result<MobilityTrace, ConfigError> {
    synth_randomtrip(params, stream).map(|trip| trip.trace)
}
