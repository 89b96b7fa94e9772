//! Quantum mechanics on finite grids in three unitarily equivalent
//! representations: configuration-space Schrödinger, phase-space
//! Schrödinger and Moyal (ħ = 1, one degree of freedom).

pub mod error;
pub mod exec;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod linop;
pub mod mixed;
pub mod moyal;
pub mod phase_weyl;
pub mod spectral;
pub mod states;
pub mod tchi;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64 as C64;
