//! Reading sharp-interface structure off phase-field states, and ε-sweeps
//! comparing recovery energies with the sharp energy.

mod detect;
mod extract;
mod sweep;

pub use detect::{detect_interfaces, detect_kinks, DetectionThresholds, KinkDetection};
pub use extract::{extract_sharp, segment_stats, stats_collar, SegmentStats, MIN_JUMP};
pub use sweep::{gamma_sweep, GridPolicy, SweepRow, SweepTable};
