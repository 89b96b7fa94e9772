//! Symbol ↔ kernel conversion and configuration-space quantization.
//!
//! ```text
//! K_a(x, y) = (2π)^{-1} ∫ e^{iξ(x−y)} a((x+y)/2, ξ) dξ
//! a(x, ξ)   = ∫ e^{−iξy} K(x + y/2, x − y/2) dy
//! ```
//!
//! The midpoint (x_i + x_j)/2 is always a row of the x-refined symbol, so
//! the forward direction needs no interpolation. The inverse direction
//! reads the kernel along its diagonals and uses Fourier half-shifts along
//! each diagonal, which is exact for translation-invariant kernels.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fourier;
use crate::grid::{Grid1D, PhaseGrid};
use crate::linop::LinOp;
use crate::weyl::symbol::{Symbol, BAND_LIMIT_TOL};
use crate::C64;

/// Integral kernel K(x_i, y_j) on a square lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    grid: Grid1D,
    values: DMatrix<C64>,
}

impl Kernel {
    pub fn new(grid: Grid1D, values: DMatrix<C64>) -> Result<Kernel> {
        let n = grid.n_points();
        if values.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: values.len(),
            });
        }
        Ok(Kernel { grid, values })
    }

    /// Kernel of the matrix M acting by (Mψ)_i = Σ_j M_ij ψ_j, i.e. K = M/dx.
    pub fn from_matrix(grid: Grid1D, m: &DMatrix<C64>) -> Result<Kernel> {
        Kernel::new(grid, m / C64::new(grid.spacing(), 0.0))
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<C64> {
        &self.values
    }

    /// Riemann-sum matrix K·dx.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        &self.values * C64::new(self.grid.spacing(), 0.0)
    }
}

pub fn symbol_to_kernel(a: &Symbol) -> Result<Kernel> {
    Kernel::from_matrix(*a.grid().x(), &config_matrix_with(a, Execution::default()))
}

/// M[i,j] = K_a(x_i, x_j)·dx. One inverse FFT per midpoint row.
///
/// The ξ sum only resolves separations modulo the lattice length. Polynomial
/// symbols use the plain midpoint (x_i + x_j)/2 for every pair, which makes
/// the matrix the symmetrized product of the position and spectral
/// derivative matrices. Sampled symbols are read on the torus: the pair is
/// taken at its shortest periodic separation and the matching midpoint.
pub fn config_matrix_with(a: &Symbol, exec: Execution) -> DMatrix<C64> {
    let g = a.grid();
    let n = g.n_points();
    let nn = n as i64;
    let dx = g.x().spacing();
    let xi0 = g.p().start();
    let refined = a.refined();
    let inv_n = 1.0 / n as f64;
    let rows: Vec<Vec<C64>> = exec.map(2 * n, |r| {
        let mut buf: Vec<C64> = refined.row(r).iter().copied().collect();
        fourier::ifft(&mut buf);
        buf.iter_mut().for_each(|v| *v *= inv_n);
        buf
    });
    let torus = a.polynomial().is_none();
    let mut m = DMatrix::zeros(n, n);
    fourier::for_each_column(&mut m, exec, |j, col| {
        for (i, v) in col.iter_mut().enumerate() {
            let d = i as i64 - j as i64;
            let (sep, r) = if torus {
                let w = fourier::signed_index(d.rem_euclid(nn) as usize, n);
                (w, (i as i64 + j as i64 + d - w).rem_euclid(2 * nn))
            } else {
                (d, i as i64 + j as i64)
            };
            let phase = C64::from_polar(1.0, xi0 * sep as f64 * dx);
            *v = phase * rows[r as usize][fourier::storage_index(sep, n)];
        }
    });
    m
}

/// Weyl symbol of a kernel. The kernel must be smooth along its diagonals
/// (checked with the same band-limit tolerance as sampled symbols).
pub fn kernel_to_symbol(k: &Kernel) -> Result<Symbol> {
    kernel_to_symbol_with(k, Execution::default())
}

pub fn kernel_to_symbol_with(k: &Kernel, exec: Execution) -> Result<Symbol> {
    let grid = PhaseGrid::from_x(*k.grid());
    let n = grid.n_points();
    let nn = n as i64;
    let m = k.to_matrix();
    let at = |u: i64, v: i64| m[(u.rem_euclid(nn) as usize, v.rem_euclid(nn) as usize)];

    // diag[s][u] = M[u, u − J] for J = signed_index(s); half[s] = same at u + 1/2.
    let diag: Vec<Vec<C64>> = (0..n)
        .map(|s| {
            let jj = fourier::signed_index(s, n);
            (0..nn).map(|u| at(u, u - jj)).collect()
        })
        .collect();
    let global = diag.iter().flat_map(|d| d.iter()).map(|c| c.norm()).fold(0.0, f64::max);
    let mut residual: f64 = 0.0;
    for d in &diag {
        let top = d.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if top > 0.0 && global > 0.0 {
            residual = residual.max(fourier::spectral_tail(d) * top / global);
        }
    }
    if residual > BAND_LIMIT_TOL {
        return Err(Error::NotBandLimited {
            what: "kernel diagonal interpolation",
            residual,
            tolerance: BAND_LIMIT_TOL,
        });
    }
    let half: Vec<Vec<C64>> = exec.map(n, |s| fourier::half_shift(&diag[s]));

    let dx = grid.x().spacing();
    let xi0 = grid.p().start();
    let weights: Vec<C64> = (0..n)
        .map(|s| C64::from_polar(1.0, -xi0 * fourier::signed_index(s, n) as f64 * dx))
        .collect();
    // Refined row r sits at x₀ + r·dx/2; the pair (r/2 + J/2, r/2 − J/2) is a
    // lattice point when r + J is even and a diagonal midpoint otherwise.
    let rows: Vec<Vec<C64>> = exec.map(2 * n, |r| {
        let r = r as i64;
        let mut buf: Vec<C64> = (0..n)
            .map(|s| {
                let jj = fourier::signed_index(s, n);
                let v = if (r + jj).rem_euclid(2) == 0 {
                    at((r + jj) / 2, (r - jj) / 2)
                } else {
                    half[s][((r + jj - 1) / 2).rem_euclid(nn) as usize]
                };
                v * weights[s]
            })
            .collect();
        fourier::fft(&mut buf);
        buf
    });
    let refined = DMatrix::from_fn(2 * n, n, |r, mm| rows[r][mm]);
    Ok(Symbol::from_refined(&grid, refined, None))
}

/// â^W as a dense matrix on the x lattice of the symbol.
pub fn quantize_config(a: &Symbol) -> Result<LinOp> {
    quantize_config_with(a, Execution::default())
}

pub fn quantize_config_with(a: &Symbol, exec: Execution) -> Result<LinOp> {
    let m = config_matrix_with(a, exec);
    Ok(LinOp::config(*a.grid().x(), m).with_note("weyl quantization"))
}
