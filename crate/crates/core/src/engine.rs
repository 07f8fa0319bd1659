//! Time-stepped drop simulation.
//!
//! A drop is one independent realization of RSU layout and channel
//! randomness along the vehicle trace. Every random process of drop `i`
//! reads from its own substream of `root / ("drop", i)`, so drops can run in
//! any order or concurrently and still reproduce bit for bit.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use rand::Rng;

use crate::antenna::{
    make_array_with, pattern_gain, realign, tracked_gain, ArrayConfig, BeamState, PatternParams,
};
use crate::channel::{evolve_link_state, ChannelParams, LinkRng, LinkState};
use crate::deployment::{build_layer, Deployment, DeploymentConfig, Rsu, Tech};
use crate::error::{ConfigError, Error};
use crate::geometry::{bearing, Position};
use crate::link::{associate, received_power, shannon_rate, sinr, snr, LinkSample, RadioParams};
use crate::metrics::{aggregate, CampaignMetrics, DropMetrics, RateSeries, RhoMode, SeriesStats};
use crate::mobility::{synth_randomtrip_trace, MobilityTrace, RandomTripParams};
use crate::rng::RngStream;
use crate::units::{DbmPower, Decibel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSource {
    /// Grid random trip generated from the seed.
    Synthetic,
    /// Supplied by the caller to [`Scenario::new`].
    External,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub root_seed: u64,
    pub n_drops: u64,
    /// Engine time step, seconds.
    pub dt_s: f64,
    /// Beam tracking period, seconds; 0 keeps beams perfectly aligned.
    pub t_tr_s: f64,
    pub deployment: DeploymentConfig,
    /// Draw the LTE layer once per campaign instead of once per drop.
    pub fixed_lte_layout: bool,
    /// Use this layout in every drop instead of sampling one.
    pub deployment_override: Option<Deployment>,
    pub lte_radio: RadioParams,
    pub mmw_radio: RadioParams,
    pub channel: ChannelParams,
    /// N
    pub vehicle_elements: u32,
    /// M
    pub rsu_elements: u32,
    pub pattern: PatternParams,
    pub outage_threshold_db: f64,
    /// Which stability index the summary reports as `rho_var`.
    pub rho_mode: RhoMode,
    /// Count every non-serving mmWave RSU as a full-buffer interferer.
    pub sinr_mode: bool,
    pub trace_source: TraceSource,
    /// Synthetic trace parameters; `dt_s` is taken from the engine step.
    pub trip: RandomTripParams,
    /// Generate a fresh synthetic trace in every drop.
    pub per_drop_trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            root_seed: 1,
            n_drops: 200,
            dt_s: 0.1,
            t_tr_s: 0.0,
            deployment: DeploymentConfig::default(),
            fixed_lte_layout: false,
            deployment_override: None,
            lte_radio: RadioParams::LTE_DEFAULT,
            mmw_radio: RadioParams::MMWAVE_DEFAULT,
            channel: ChannelParams::default(),
            vehicle_elements: 16,
            rsu_elements: 64,
            pattern: PatternParams::default(),
            outage_threshold_db: 0.0,
            rho_mode: RhoMode::PerDrop,
            sinr_mode: false,
            trace_source: TraceSource::Synthetic,
            trip: RandomTripParams::default(),
            per_drop_trace: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt_s > 0.0 && self.dt_s.is_finite()) {
            return Err(ConfigError::new("dt_s", "time step must be positive"));
        }
        if !(self.t_tr_s >= 0.0 && self.t_tr_s.is_finite()) {
            return Err(ConfigError::new("t_tr_s", "tracking period must be non-negative"));
        }
        if self.t_tr_s > 0.0 {
            let ratio = self.t_tr_s / self.dt_s;
            if ratio < 1.0 - 1e-9 || libm::fabs(ratio - libm::round(ratio)) > 1e-6 {
                return Err(ConfigError::new(
                    "t_tr_s",
                    format!("tracking period must be an integer multiple of dt_s = {}", self.dt_s),
                ));
            }
        }
        if self.n_drops < 1 {
            return Err(ConfigError::new("n_drops", "need at least one drop"));
        }
        if self.vehicle_elements < 1 {
            return Err(ConfigError::new("vehicle_elements", "array needs at least one element"));
        }
        if self.rsu_elements < 1 {
            return Err(ConfigError::new("rsu_elements", "array needs at least one element"));
        }
        if !self.outage_threshold_db.is_finite() {
            return Err(ConfigError::new("outage_threshold_db", "must be finite"));
        }
        self.deployment.validate()?;
        self.channel.validate()?;
        self.lte_radio.validate(Tech::Lte)?;
        self.mmw_radio.validate(Tech::MmWave)?;
        if self.trace_source == TraceSource::Synthetic {
            self.trip_params().validate()?;
        }
        Ok(())
    }

    /// Steps per tracking slot, `None` under perfect alignment.
    pub fn slot_steps(&self) -> Option<u64> {
        (self.t_tr_s > 0.0).then(|| libm::round(self.t_tr_s / self.dt_s) as u64)
    }

    pub fn trip_params(&self) -> RandomTripParams {
        RandomTripParams {
            dt_s: self.dt_s,
            ..self.trip.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignmentLoss {
    pub t: f64,
    pub slot: u64,
    pub rsu: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    pub drop_index: u64,
    pub dt: f64,
    pub lte: Vec<LinkSample>,
    pub mmw: Vec<LinkSample>,
    pub alignment_losses: Vec<AlignmentLoss>,
    /// Number of mmWave alignment slots (steps, under perfect alignment).
    pub slots: u64,
    /// Fingerprint of the stream the layout was drawn from.
    pub deployment_id: u64,
    pub deployment: Deployment,
}

impl DropResult {
    pub fn samples(&self, tech: Tech) -> &[LinkSample] {
        match tech {
            Tech::Lte => &self.lte,
            Tech::MmWave => &self.mmw,
        }
    }

    pub fn rate_series(&self, tech: Tech) -> RateSeries {
        RateSeries {
            dt: self.dt,
            values: self.samples(tech).iter().map(|s| s.rate_bps).collect(),
            tech,
        }
    }

    pub fn snr_series(&self, tech: Tech) -> Vec<f64> {
        self.samples(tech).iter().map(|s| s.snr_db.0).collect()
    }

    pub fn metrics(&self, outage_threshold_db: f64) -> DropMetrics {
        let stats = |tech| {
            let mut s = SeriesStats::default();
            for x in self.samples(tech) {
                s.push(x.rate_bps, x.snr_db.0, outage_threshold_db);
            }
            s
        };
        DropMetrics {
            drop_index: self.drop_index,
            lte: stats(Tech::Lte),
            mmw: stats(Tech::MmWave),
            alignment_losses: self.alignment_losses.len() as u64,
            slots: self.slots,
        }
    }
}

/// A validated configuration with its shared vehicle trace.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: SimConfig,
    trace: Option<MobilityTrace>,
    vehicle_array: ArrayConfig,
    rsu_array: ArrayConfig,
    root: RngStream,
}

struct Layer<'a> {
    rsus: &'a [Rsu],
    states: Vec<LinkState>,
    rngs: Vec<LinkRng>,
}

impl<'a> Layer<'a> {
    fn new(rsus: &'a [Rsu], pos: Position, params: &ChannelParams, drop: &RngStream) -> Self {
        let mut rngs: Vec<LinkRng> = rsus
            .iter()
            .map(|r| LinkRng::new(drop, r.tech, r.id))
            .collect();
        let states = rsus
            .iter()
            .zip(rngs.iter_mut())
            .map(|(r, rng)| LinkState::new(r, pos, params, rng))
            .collect();
        Self { rsus, states, rngs }
    }

    fn advance(&mut self, pos: Position, params: &ChannelParams) {
        for ((state, rsu), rng) in self.states.iter_mut().zip(self.rsus).zip(self.rngs.iter_mut()) {
            *state = evolve_link_state(state, pos, rsu, params, rng);
        }
    }
}

fn no_server(t: f64, tech: Tech) -> LinkSample {
    LinkSample {
        t,
        tech,
        serving_rsu: None,
        snr_db: Decibel(f64::NEG_INFINITY),
        rate_bps: 0.0,
        lost_alignment: false,
    }
}

impl Scenario {
    /// `external` must be provided for [`TraceSource::External`] and must be
    /// uniformly sampled at `config.dt_s`.
    pub fn new(config: SimConfig, external: Option<MobilityTrace>) -> Result<Self, Error> {
        config.validate()?;
        let vehicle_array = make_array_with(config.vehicle_elements, &config.pattern)
            .map_err(|e| ConfigError::new("vehicle_elements", e.reason))?;
        let rsu_array = make_array_with(config.rsu_elements, &config.pattern)
            .map_err(|e| ConfigError::new("rsu_elements", e.reason))?;
        let root = RngStream::new(config.root_seed);
        let trace = match config.trace_source {
            TraceSource::External => {
                let trace = external.ok_or_else(|| {
                    Error::TraceMismatch("an external trace is required".into())
                })?;
                if trace.len() > 1 && !trace.is_uniform_at(config.dt_s) {
                    return Err(Error::TraceMismatch(format!(
                        "trace is not uniformly sampled at dt_s = {} s",
                        config.dt_s
                    )));
                }
                Some(trace)
            }
            TraceSource::Synthetic if config.per_drop_trace => None,
            TraceSource::Synthetic => Some(synth_randomtrip_trace(
                &config.trip_params(),
                &root.derive("trace", 0),
            )?),
        };
        Ok(Self {
            config,
            trace,
            vehicle_array,
            rsu_array,
            root,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    /// The trace shared by all drops, if any.
    pub fn trace(&self) -> Option<&MobilityTrace> {
        self.trace.as_ref()
    }

    pub fn vehicle_array(&self) -> &ArrayConfig {
        &self.vehicle_array
    }

    pub fn rsu_array(&self) -> &ArrayConfig {
        &self.rsu_array
    }

    fn deployment_for(&self, drop: &RngStream) -> (Deployment, u64) {
        let cfg = &self.config;
        if let Some(d) = &cfg.deployment_override {
            return (d.clone(), self.root.derive("deployment_override", 0).fingerprint());
        }
        let lte_stream = if cfg.fixed_lte_layout {
            self.root.derive("lte_layout", 0)
        } else {
            drop.derive("lte_layout", 0)
        };
        let mmw_stream = drop.derive("mmw_layout", 0);
        let dep = &cfg.deployment;
        let deployment = Deployment {
            area_side_m: dep.area_side_m,
            lte_rsus: build_layer(
                Tech::Lte,
                dep.lambda_lte,
                dep.area_side_m,
                dep.min_lte_rsus,
                &lte_stream,
            ),
            mmw_rsus: build_layer(Tech::MmWave, dep.lambda_mmw, dep.area_side_m, 0, &mmw_stream),
            lambda_lte: dep.lambda_lte,
            lambda_mmw: dep.lambda_mmw,
        };
        (deployment, lte_stream.fingerprint() ^ mmw_stream.fingerprint())
    }

    pub fn run_drop(&self, drop_index: u64) -> Result<DropResult, Error> {
        let cfg = &self.config;
        let drop = self.root.derive("drop", drop_index);
        let own_trace;
        let trace = match &self.trace {
            Some(t) => t,
            None => {
                own_trace = synth_randomtrip_trace(&cfg.trip_params(), &drop.derive("trace", 0))?;
                &own_trace
            }
        };
        let (deployment, deployment_id) = self.deployment_for(&drop);
        let samples = trace.samples();
        let start = samples[0].position;

        let mut lte = Layer::new(&deployment.lte_rsus, start, &cfg.channel, &drop);
        let mut mmw = Layer::new(&deployment.mmw_rsus, start, &cfg.channel, &drop);
        let mut interferer_rng = drop.derive("interferer", 0).rng();

        let lte_tx = DbmPower(cfg.lte_radio.tx_power_dbm);
        let mmw_tx = DbmPower(cfg.mmw_radio.tx_power_dbm);
        let lte_noise = cfg.lte_radio.noise();
        let mmw_noise = cfg.mmw_radio.noise();
        let veh = &self.vehicle_array;
        let bs = &self.rsu_array;
        let boresight_gain = veh.main_gain_db + bs.main_gain_db;
        let slot_steps = cfg.slot_steps();

        let mut out = DropResult {
            drop_index,
            dt: cfg.dt_s,
            lte: Vec::with_capacity(samples.len()),
            mmw: Vec::with_capacity(samples.len()),
            alignment_losses: Vec::new(),
            slots: 0,
            deployment_id,
            deployment: Deployment {
                lte_rsus: Vec::new(),
                mmw_rsus: Vec::new(),
                ..deployment.clone()
            },
        };
        let mut beam: Option<(usize, BeamState)> = None;
        let mut interferers: Vec<DbmPower> = Vec::new();
        let mut prev_pos = start;

        for (k, sample) in samples.iter().enumerate() {
            let t = sample.t;
            let pos = sample.position;
            if k > 0 {
                lte.advance(pos, &cfg.channel);
                mmw.advance(pos, &cfg.channel);
            }

            let lte_sample = match associate(&lte.states, Decibel(0.0)) {
                None => no_server(t, Tech::Lte),
                Some(j) => {
                    let st = &lte.states[j];
                    let rx = received_power(lte_tx, Decibel(0.0), Decibel(0.0), st.path_loss_db, st.fading_linear);
                    let s = snr(rx, lte_noise);
                    LinkSample {
                        t,
                        tech: Tech::Lte,
                        serving_rsu: Some(st.rsu_id),
                        snr_db: s,
                        rate_bps: shannon_rate(cfg.lte_radio.bandwidth_hz, s),
                        lost_alignment: false,
                    }
                }
            };
            out.lte.push(lte_sample);

            let slot_start = match slot_steps {
                None => Some(k as u64),
                Some(n) => (k as u64 % n == 0).then(|| k as u64 / n),
            };
            if let Some(slot) = slot_start {
                out.slots += 1;
                // Slotted training sees the position from one step earlier.
                let trained_at = if slot_steps.is_some() { prev_pos } else { pos };
                beam = associate(&mmw.states, boresight_gain)
                    .map(|j| (j, realign(trained_at, &mmw.rsus[j], slot)));
            }

            let mmw_sample = match beam {
                None => no_server(t, Tech::MmWave),
                Some((j, state)) => {
                    let rsu = &mmw.rsus[j];
                    let (gain, next) = tracked_gain(&state, veh, bs, pos, rsu);
                    if next.lost && !state.lost {
                        out.alignment_losses.push(AlignmentLoss {
                            t,
                            slot: next.aligned_at_slot,
                            rsu: rsu.id,
                        });
                    }
                    beam = Some((j, next));
                    let st = &mmw.states[j];
                    let rx = received_power(mmw_tx, gain, Decibel(0.0), st.path_loss_db, st.fading_linear);
                    let quality = if cfg.sinr_mode {
                        interferers.clear();
                        for (i, (other, ost)) in mmw.rsus.iter().zip(&mmw.states).enumerate() {
                            if i == j {
                                continue;
                            }
                            let pointing = interferer_rng.random::<f64>() * TAU;
                            let g_bs = pattern_gain(bs, bearing(other.position, pos) - pointing);
                            let g_veh = pattern_gain(veh, bearing(pos, other.position) - next.vehicle_boresight);
                            interferers.push(received_power(mmw_tx, g_bs, g_veh, ost.path_loss_db, ost.fading_linear));
                        }
                        sinr(rx, mmw_noise, &interferers)
                    } else {
                        snr(rx, mmw_noise)
                    };
                    LinkSample {
                        t,
                        tech: Tech::MmWave,
                        serving_rsu: Some(rsu.id),
                        snr_db: quality,
                        rate_bps: shannon_rate(cfg.mmw_radio.bandwidth_hz, quality),
                        lost_alignment: next.lost,
                    }
                }
            };
            out.mmw.push(mmw_sample);
            prev_pos = pos;
        }
        out.deployment = deployment;
        Ok(out)
    }

    pub fn drop_metrics(&self, drop_index: u64) -> Result<DropMetrics, Error> {
        Ok(self.run_drop(drop_index)?.metrics(self.config.outage_threshold_db))
    }

    /// All drops in index order on the calling thread.
    pub fn run_campaign_sequential(&self) -> Result<CampaignMetrics, Error> {
        let drops = (0..self.config.n_drops)
            .map(|i| self.drop_metrics(i))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(aggregate(&drops)?)
    }
}
