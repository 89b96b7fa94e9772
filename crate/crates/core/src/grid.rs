//! Uniform lattices and the unitary discrete Fourier transforms.
//!
//! A grid with `n_points = N`, `center = c`, `half_width = h` samples
//! x_k = c - h + k·dx, k = 0..N, with dx = 2h/N. Its Fourier dual has spacing
//! 2π/(N·dx) and is centered at `dual_center` (0 unless the grid was itself
//! produced by [`Grid1D::dual`]), so `g.dual().dual() == g`.
//!
//! The discrete transform
//!     φ̂(ξ_m) = dx/√(2π) · Σ_k e^{-i x_k ξ_m} φ(x_k)
//! is exactly unitary for the Riemann-sum inner products.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fourier;
use crate::states::{ConfigState, PhaseState};
use crate::C64;

const GRID_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec")]
pub struct Grid1D {
    n_points: usize,
    center: f64,
    half_width: f64,
    dual_center: f64,
}

#[derive(Deserialize)]
struct GridSpec {
    n_points: usize,
    half_width: f64,
    #[serde(default)]
    center: f64,
    #[serde(default)]
    dual_center: f64,
}

impl TryFrom<GridSpec> for Grid1D {
    type Error = Error;

    fn try_from(s: GridSpec) -> Result<Self> {
        let mut g = make_grid(s.n_points, s.half_width, s.center)?;
        if !s.dual_center.is_finite() {
            return Err(Error::InvalidGrid("dual_center must be finite".into()));
        }
        g.dual_center = s.dual_center;
        Ok(g)
    }
}

/// Builds a grid of `n_points` samples spanning [center - half_width, center + half_width).
pub fn make_grid(n_points: usize, half_width: f64, center: f64) -> Result<Grid1D> {
    if n_points < 8 || !n_points.is_power_of_two() {
        return Err(Error::InvalidGrid(format!(
            "n_points must be a power of two >= 8, got {n_points}"
        )));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "half_width must be positive, got {half_width}"
        )));
    }
    if !center.is_finite() {
        return Err(Error::InvalidGrid("center must be finite".into()));
    }
    Ok(Grid1D {
        n_points,
        center,
        half_width,
        dual_center: 0.0,
    })
}

impl Grid1D {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dual_center(&self) -> f64 {
        self.dual_center
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn dual_spacing(&self) -> f64 {
        TAU / (self.n_points as f64 * self.spacing())
    }

    pub fn start(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start() + k as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.point(k)).collect()
    }

    /// The Fourier-dual lattice, centered at `dual_center`.
    pub fn dual(&self) -> Grid1D {
        Grid1D {
            n_points: self.n_points,
            center: self.dual_center,
            half_width: PI / self.spacing(),
            dual_center: self.center,
        }
    }

    /// Whether the grid is symmetric about the origin.
    pub fn is_centered(&self) -> bool {
        self.center.abs() <= GRID_RTOL * self.half_width
    }

    /// Fractional sample index of coordinate `x`.
    pub fn index_of(&self, x: f64) -> f64 {
        (x - self.start()) / self.spacing()
    }

    /// Equality up to floating-point noise in the defining reals.
    pub fn approx_eq(&self, other: &Grid1D) -> bool {
        let tol = GRID_RTOL * self.half_width.max(other.half_width);
        self.n_points == other.n_points
            && (self.half_width - other.half_width).abs() <= tol
            && (self.center - other.center).abs() <= tol
    }

    pub(crate) fn ensure_same(&self, other: &Grid1D, what: &str) -> Result<()> {
        if self.approx_eq(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: {} points on [{}, {}) vs {} points on [{}, {})",
                self.n_points,
                self.start(),
                self.center + self.half_width,
                other.n_points,
                other.start(),
                other.center + other.half_width
            )))
        }
    }

    /// The grid with N points whose dual has the same spacing and extent:
    /// half_width = √(πN/2).
    pub fn self_dual(n_points: usize) -> Result<Grid1D> {
        make_grid(n_points, (PI * n_points as f64 / 2.0).sqrt(), 0.0)
    }
}

/// Phase-space lattice. The p axis doubles as the ξ_x axis of symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    x: Grid1D,
    p: Grid1D,
}

impl PhaseGrid {
    /// Pairs two axes of equal size. If `p` coincides with the dual of `x` up
    /// to rounding it is snapped onto `x.dual()` exactly.
    pub fn new(x: Grid1D, p: Grid1D) -> Result<PhaseGrid> {
        if x.n_points != p.n_points {
            return Err(Error::InvalidGrid(format!(
                "x and p axes must have equal sizes ({} vs {})",
                x.n_points, p.n_points
            )));
        }
        let d = x.dual();
        let p = if d.approx_eq(&p) { d } else { p };
        Ok(PhaseGrid { x, p })
    }

    /// Phase lattice whose p axis is the Fourier dual of `x`.
    pub fn from_x(x: Grid1D) -> PhaseGrid {
        PhaseGrid { x, p: x.dual() }
    }

    /// Centered lattice whose x and p axes coincide.
    pub fn self_dual(n_points: usize) -> Result<PhaseGrid> {
        Ok(PhaseGrid::from_x(Grid1D::self_dual(n_points)?))
    }

    pub fn x(&self) -> &Grid1D {
        &self.x
    }

    pub fn p(&self) -> &Grid1D {
        &self.p
    }

    pub fn n_points(&self) -> usize {
        self.x.n_points
    }

    /// Number of lattice sites, n_x·n_p.
    pub fn dim(&self) -> usize {
        self.x.n_points * self.p.n_points
    }

    pub fn cell(&self) -> f64 {
        self.x.spacing() * self.p.spacing()
    }

    /// True when the p axis is exactly the Fourier dual of the x axis, so
    /// that the ξ_x lattice equals the p lattice and the ξ_p lattice equals
    /// the x lattice.
    pub fn is_dual_pair(&self) -> bool {
        self.p.approx_eq(&self.x.dual())
    }

    pub(crate) fn ensure_dual_pair(&self, what: &str) -> Result<()> {
        if self.is_dual_pair() {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!(
                "{what} requires the p axis to be the Fourier dual of the x axis"
            )))
        }
    }

    /// Dual pair with a centered x axis: the setting of the Moyal map, where
    /// the shear (x, ξ_p) ↦ (x ∓ ξ_p/2) stays on the lattice.
    pub(crate) fn ensure_moyal(&self, what: &str) -> Result<()> {
        self.ensure_dual_pair(what)?;
        if self.x.is_centered() {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!("{what} requires a centered x axis")))
        }
    }

    pub fn approx_eq(&self, other: &PhaseGrid) -> bool {
        self.x.approx_eq(&other.x) && self.p.approx_eq(&other.p)
    }

    pub(crate) fn ensure_same(&self, other: &PhaseGrid, what: &str) -> Result<()> {
        self.x.ensure_same(&other.x, what)?;
        self.p.ensure_same(&other.p, what)
    }
}

/// Per-call twiddles for the transform from lattice `from` to `from.dual()`.
struct Twiddles {
    pre: Vec<C64>,
    post: Vec<C64>,
    inverse: bool,
}

impl Twiddles {
    /// `sign = -1` for the forward kernel e^{-i y z}, `+1` for the inverse.
    fn new(from: &Grid1D, sign: f64) -> Twiddles {
        let to = from.dual();
        let n = from.n_points;
        let dy = from.spacing();
        let y0 = from.start();
        let z0 = to.start();
        let dz = to.spacing();
        let scale = dy / TAU.sqrt();
        let pre = (0..n)
            .map(|k| C64::from_polar(1.0, sign * k as f64 * dy * z0))
            .collect();
        let post = (0..n)
            .map(|m| C64::from_polar(scale, sign * y0 * (z0 + m as f64 * dz)))
            .collect();
        Twiddles {
            pre,
            post,
            inverse: sign > 0.0,
        }
    }

    fn apply(&self, buf: &mut [C64]) {
        for (v, w) in buf.iter_mut().zip(&self.pre) {
            *v *= w;
        }
        if self.inverse {
            fourier::ifft(buf);
        } else {
            fourier::fft(buf);
        }
        for (v, w) in buf.iter_mut().zip(&self.post) {
            *v *= w;
        }
    }
}

/// Unitary Fourier transform onto the dual grid.
pub fn forward_ft(state: &ConfigState) -> ConfigState {
    transform_config(state, -1.0)
}

/// Inverse unitary Fourier transform; the input lives on a dual grid and
/// the output on its dual.
pub fn inverse_ft(state: &ConfigState) -> ConfigState {
    transform_config(state, 1.0)
}

fn transform_config(state: &ConfigState, sign: f64) -> ConfigState {
    let grid = state.grid();
    let tw = Twiddles::new(grid, sign);
    let mut buf: Vec<C64> = state.values().iter().copied().collect();
    tw.apply(&mut buf);
    ConfigState::from_vec_unchecked(grid.dual(), buf)
}

/// Partial Fourier transform along p: Ψ̂(x, ξ_p) on the grid (x, p.dual()).
pub fn partial_ft_p(state: &PhaseState) -> PhaseState {
    partial_ft_p_with(state, Execution::default())
}

pub fn partial_ft_p_with(state: &PhaseState, exec: Execution) -> PhaseState {
    let g = state.grid();
    let values = transform_rows(state.values(), g.p(), -1.0, exec);
    PhaseState::from_matrix_unchecked(
        PhaseGrid {
            x: *g.x(),
            p: g.p().dual(),
        },
        values,
    )
}

/// Inverse of [`partial_ft_p`].
pub fn inverse_partial_ft_p(state: &PhaseState) -> PhaseState {
    inverse_partial_ft_p_with(state, Execution::default())
}

pub fn inverse_partial_ft_p_with(state: &PhaseState, exec: Execution) -> PhaseState {
    let g = state.grid();
    let values = transform_rows(state.values(), g.p(), 1.0, exec);
    let grid = PhaseGrid::new(*g.x(), g.p().dual()).expect("axes keep their sizes");
    PhaseState::from_matrix_unchecked(grid, values)
}

/// Transforms every row (fixed x, varying p) of `m`, where rows are sampled on `axis`.
pub(crate) fn transform_rows(m: &DMatrix<C64>, axis: &Grid1D, sign: f64, exec: Execution) -> DMatrix<C64> {
    let tw = Twiddles::new(axis, sign);
    let mut out = m.clone();
    fourier::for_each_row(&mut out, exec, |_, row| tw.apply(row));
    out
}

/// Transforms every column (fixed p, varying x) of `m`, where columns are sampled on `axis`.
pub(crate) fn transform_columns(m: &DMatrix<C64>, axis: &Grid1D, sign: f64, exec: Execution) -> DMatrix<C64> {
    let tw = Twiddles::new(axis, sign);
    let mut out = m.clone();
    fourier::for_each_column(&mut out, exec, |_, col| tw.apply(col));
    out
}
