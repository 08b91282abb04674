//! Domain types and discrete energies of the two-phase elastic curve.

mod curvature;
mod energy;
pub mod geometry;
mod grid;
mod potential;
mod sharp;
mod state;

pub use curvature::CurvatureSpec;
pub use energy::{energy_eps, energy_sharp, local_energy, EnergyBreakdown, LocalEnergy};
pub use geometry::{closure_defect, jump_magnitude, reconstruct_curve, Point};
pub use grid::{Grid, MIN_POINTS};
pub use potential::{PotentialFamily, PotentialSpec};
pub use sharp::{Junction, JunctionKind, Phase, Segment, SharpState};
pub use state::{FieldState, ModelParams};
