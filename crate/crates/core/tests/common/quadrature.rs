//! Independent cross-Wigner quadrature and analytic test states.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use phasespace::grid::Grid1D;
use phasespace::states::hermite_function;
use phasespace::C64;

/// W(ψ,φ) by the trapezoid rule in η with step dx, evaluating the
/// analytic functions at the off-lattice points x ∓ η/2.
pub fn wigner_quadrature(grid: &Grid1D, psi: impl Fn(f64) -> C64, phi: impl Fn(f64) -> C64) -> DMatrix<C64> {
    let n = grid.n_points() as i64;
    let dx = grid.spacing();
    let xs = grid.points();
    let ps = grid.dual().points();
    let etas: Vec<f64> = (-n..n).map(|k| k as f64 * dx).collect();
    let v = DMatrix::from_fn(xs.len(), etas.len(), |i, k| {
        psi(xs[i] - etas[k] / 2.0) * phi(xs[i] + etas[k] / 2.0).conj()
    });
    let e = DMatrix::from_fn(etas.len(), ps.len(), |k, m| C64::from_polar(dx / TAU, ps[m] * etas[k]));
    v * e
}

pub fn coherent(x0: f64, p0: f64) -> impl Fn(f64) -> C64 {
    move |x| C64::from_polar((-(x - x0) * (x - x0) / 2.0).exp() / PI.powf(0.25), p0 * x)
}

pub fn hermite(k: usize) -> impl Fn(f64) -> C64 {
    move |x| C64::new(hermite_function(k, x), 0.0)
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
