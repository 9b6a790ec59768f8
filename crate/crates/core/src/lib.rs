//! Phase-field Navier–Stokes–Allen–Cahn solver on a staggered grid, with
//! energy and relative-entropy diagnostics for weak–strong uniqueness studies.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod potential;
pub mod solver;

pub use error::{Error, Result};
