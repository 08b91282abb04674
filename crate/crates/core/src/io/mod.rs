//! Experiment configs and the text formats read and written by the CLI.

mod config;
mod formats;
mod svg;

pub use config::{config_help, ExperimentConfig, InitialCurve, InitialPhase, OutputConfig, SweepConfig, CONFIG_KEYS};
pub use formats::{
    format_energy, read_sharp, read_snapshot, write_energy_log, write_sharp, write_snapshot, write_sweep,
    SnapshotRecord, ENERGY_LOG_HEADER, SNAPSHOT_COLUMNS, SWEEP_HEADER,
};
pub use svg::{phase_color, render_svg};
