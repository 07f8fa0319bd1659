//! Simulation core for vehicle-to-network connectivity over LTE and 28 GHz
//! mmWave radios.
//!
//! The crate is `no_std` (with `alloc`) and contains everything that does not
//! touch a file system or a thread pool:
//!
//! - unit-safe power types and planar geometry ([`units`], [`geometry`])
//! - hierarchical, splittable random streams ([`rng`])
//! - Poisson road-side-unit layouts ([`deployment`])
//! - vehicle traces and a grid random-trip generator ([`mobility`])
//! - LTE and mmWave channel models ([`channel`])
//! - sectored array patterns and slotted beam tracking ([`antenna`])
//! - link budget, association and Shannon rate ([`link`])
//! - rate, stability and outage statistics ([`metrics`])
//! - the time-stepped drop engine ([`engine`])
//!
//! Parallel campaigns, file formats and the command line live in the
//! `v2n-sim` companion crate.

#![no_std]

extern crate alloc;

pub mod antenna;
pub mod channel;
pub mod deployment;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod link;
pub mod metrics;
pub mod mobility;
pub mod rng;
pub mod units;

pub use antenna::{ArrayConfig, BeamState, PatternParams};
pub use channel::{ChannelParams, LinkState, LosModel};
pub use deployment::{Deployment, Rsu, Tech};
pub use engine::{DropResult, Scenario, SimConfig};
pub use error::{ConfigError, Error, MetricsError, TraceError};
pub use geometry::Position;
pub use metrics::{CampaignMetrics, DropMetrics, MetricsSummary, RhoMode};
pub use mobility::{MobilityTrace, TraceSample};
pub use rng::RngStream;
pub use units::{DbmPower, Decibel, LinearRatio};
