//! Command-line front end for `v2n-core`: config files, trace CSV, parallel
//! campaigns and sweeps, CSV and SVG outputs.

pub mod campaign;
pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod presets;
pub mod trace_csv;

pub use config::RunConfig;
pub use error::SimError;
