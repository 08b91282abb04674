//! Phase-field relaxation of closed planar curves made of two materials,
//! together with the sharp-interface limit energy for curves with kinks,
//! explicit recovery sequences and ε-sweeps comparing the two.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod flow;
pub mod io;
pub mod model;
mod quadrature;
pub mod recovery;
pub mod setup;

pub use error::{Error, Result};
