#![allow(dead_code)]

pub mod fd;
pub mod quadrature;

use phasespace::grid::{Grid1D, PhaseGrid};
use phasespace::C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const N: usize = 256;

pub fn grid() -> PhaseGrid {
    PhaseGrid::self_dual(N).unwrap()
}

pub fn xgrid() -> Grid1D {
    Grid1D::self_dual(N).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn re(v: f64) -> C64 {
    C64::new(v, 0.0)
}
