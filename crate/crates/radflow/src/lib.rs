//! Configuration, artifacts, presets and sweeps around `radflow-core`.
//!
//! The `radflow` binary is a thin layer over this library; the integration
//! and acceptance tests call it directly.

pub mod config;
pub mod io;
pub mod pipeline;
pub mod presets;
pub mod report;
pub mod sweep;

pub use config::RunConfig;
pub use presets::{run_preset, PresetOptions, PRESETS};
pub use report::{Check, Report};
pub use sweep::{run_sweep, SweepReport, SweepSpec};
