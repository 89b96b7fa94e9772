//! Sampled wave functions on L²(ℝ) and L²(ℝ²), inner products and fixtures.
//!
//! Inner products are linear in the second argument:
//! (a|b) = Σ_k a_k^* b_k · dx.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, PhaseGrid};
use crate::C64;

/// Highest Hermite level exposed by [`hermite_state`].
pub const MAX_HERMITE_LEVEL: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigStateJson", into = "ConfigStateJson")]
pub struct ConfigState {
    grid: Grid1D,
    values: DVector<C64>,
}

#[derive(Serialize, Deserialize)]
struct ConfigStateJson {
    grid: Grid1D,
    values: Vec<[f64; 2]>,
}

impl TryFrom<ConfigStateJson> for ConfigState {
    type Error = Error;

    fn try_from(j: ConfigStateJson) -> Result<Self> {
        let values = j.values.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        ConfigState::new(j.grid, values)
    }
}

impl From<ConfigState> for ConfigStateJson {
    fn from(s: ConfigState) -> Self {
        ConfigStateJson {
            grid: s.grid,
            values: s.values.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

fn check_finite<'a>(values: impl IntoIterator<Item = &'a C64>) -> Result<()> {
    if values.into_iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidState("non-finite sample".into()))
    }
}

impl ConfigState {
    pub fn new(grid: Grid1D, values: Vec<C64>) -> Result<ConfigState> {
        if values.len() != grid.n_points() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        check_finite(&values)?;
        Ok(ConfigState {
            grid,
            values: DVector::from_vec(values),
        })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid1D, values: Vec<C64>) -> ConfigState {
        debug_assert_eq!(values.len(), grid.n_points());
        ConfigState {
            grid,
            values: DVector::from_vec(values),
        }
    }

    pub fn from_fn(grid: &Grid1D, f: impl Fn(f64) -> C64) -> ConfigState {
        let values = grid.points().into_iter().map(f).collect();
        ConfigState::from_vec_unchecked(*grid, values)
    }

    pub fn zeros(grid: &Grid1D) -> ConfigState {
        ConfigState {
            grid: *grid,
            values: DVector::zeros(grid.n_points()),
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &DVector<C64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut DVector<C64> {
        &mut self.values
    }

    pub fn into_values(self) -> DVector<C64> {
        self.values
    }

    /// Same grid, new samples.
    pub fn with_values(&self, values: DVector<C64>) -> ConfigState {
        assert_eq!(values.len(), self.values.len());
        ConfigState {
            grid: self.grid,
            values,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.values.norm_squared() * self.grid.spacing()).sqrt()
    }

    pub fn normalized(&self) -> Result<ConfigState> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("cannot normalize the zero state".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, s: C64) -> ConfigState {
        self.with_values(&self.values * s)
    }

    /// ‖self − other‖.
    pub fn distance(&self, other: &ConfigState) -> Result<f64> {
        self.grid.ensure_same(&other.grid, "distance")?;
        Ok(((&self.values - &other.values).norm_squared() * self.grid.spacing()).sqrt())
    }

    /// Σ|ψ|²·dx over the outermost 5% of samples at each end.
    pub fn boundary_mass(&self) -> f64 {
        let n = self.values.len();
        let edge = (n / 20).max(1);
        let s: f64 = (0..n)
            .filter(|&k| k < edge || k >= n - edge)
            .map(|k| self.values[k].norm_sqr())
            .sum();
        s * self.grid.spacing()
    }
}

/// Phase-space state; rows index x, columns index p.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    grid: PhaseGrid,
    values: DMatrix<C64>,
}

impl PhaseState {
    pub fn new(grid: PhaseGrid, values: DMatrix<C64>) -> Result<PhaseState> {
        let n = grid.n_points();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: values.len(),
            });
        }
        check_finite(values.iter())?;
        Ok(PhaseState { grid, values })
    }

    pub(crate) fn from_matrix_unchecked(grid: PhaseGrid, values: DMatrix<C64>) -> PhaseState {
        debug_assert_eq!(values.nrows(), grid.x().n_points());
        debug_assert_eq!(values.ncols(), grid.p().n_points());
        PhaseState { grid, values }
    }

    pub fn from_fn(grid: &PhaseGrid, f: impl Fn(f64, f64) -> C64) -> PhaseState {
        let xs = grid.x().points();
        let ps = grid.p().points();
        let values = DMatrix::from_fn(xs.len(), ps.len(), |i, n| f(xs[i], ps[n]));
        PhaseState { grid: *grid, values }
    }

    pub fn zeros(grid: &PhaseGrid) -> PhaseState {
        let n = grid.n_points();
        PhaseState {
            grid: *grid,
            values: DMatrix::zeros(n, n),
        }
    }

    /// ψ(x)·φ(p), without conjugation.
    pub fn outer(psi: &ConfigState, phi: &ConfigState) -> Result<PhaseState> {
        let grid = PhaseGrid::new(*psi.grid(), *phi.grid())?;
        let values = psi.values() * phi.values().transpose();
        Ok(PhaseState { grid, values })
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn values(&self) -> &DMatrix<C64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.values
    }

    pub fn into_values(self) -> DMatrix<C64> {
        self.values
    }

    pub fn with_values(&self, values: DMatrix<C64>) -> PhaseState {
        assert_eq!(values.shape(), self.values.shape());
        PhaseState {
            grid: self.grid,
            values,
        }
    }

    pub fn norm(&self) -> f64 {
        (self.values.norm_squared() * self.grid.cell()).sqrt()
    }

    pub fn normalized(&self) -> Result<PhaseState> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidState("cannot normalize the zero state".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, s: C64) -> PhaseState {
        self.with_values(&self.values * s)
    }

    pub fn distance(&self, other: &PhaseState) -> Result<f64> {
        self.grid.ensure_same(&other.grid, "distance")?;
        Ok(((&self.values - &other.values).norm_squared() * self.grid.cell()).sqrt())
    }

    /// Σ|Ψ|²·dx·dp over samples within the outer 5% band of either axis.
    pub fn boundary_mass(&self) -> f64 {
        let (nx, np) = self.values.shape();
        let ex = (nx / 20).max(1);
        let ep = (np / 20).max(1);
        let mut s = 0.0;
        for n in 0..np {
            let p_edge = n < ep || n >= np - ep;
            for i in 0..nx {
                if p_edge || i < ex || i >= nx - ex {
                    s += self.values[(i, n)].norm_sqr();
                }
            }
        }
        s * self.grid.cell()
    }
}

/// (a|b) = ∫ a^* b dx.
pub fn inner_config(a: &ConfigState, b: &ConfigState) -> Result<C64> {
    a.grid().ensure_same(b.grid(), "inner_config")?;
    Ok(a.values().dotc(b.values()) * a.grid().spacing())
}

/// ((A|B)) = ∫∫ A^* B dx dp.
pub fn inner_phase(a: &PhaseState, b: &PhaseState) -> Result<C64> {
    a.grid().ensure_same(b.grid(), "inner_phase")?;
    Ok(a.values().dotc(b.values()) * a.grid().cell())
}

/// Hermite functions h_0..=h_max at `x` by the normalized three-term recurrence.
pub fn hermite_functions(max_level: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(max_level + 1);
    h.push(PI.powf(-0.25) * (-x * x / 2.0).exp());
    if max_level >= 1 {
        h.push(2f64.sqrt() * x * h[0]);
    }
    for n in 1..max_level {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
        h.push(next);
    }
    h
}

pub fn hermite_function(level: usize, x: f64) -> f64 {
    hermite_functions(level, x)[level]
}

/// The normalized Hermite function h_level sampled on `grid`.
pub fn hermite_state(grid: &Grid1D, level: usize) -> Result<ConfigState> {
    if level > MAX_HERMITE_LEVEL {
        return Err(Error::LevelOutOfRange(level));
    }
    Ok(ConfigState::from_fn(grid, |x| {
        C64::new(hermite_function(level, x), 0.0)
    }))
}

/// (πw²)^{-1/4} e^{-(x-x₀)²/(2w²)} e^{i p₀ x}.
pub fn gaussian_state(grid: &Grid1D, center_x: f64, center_p: f64, width: f64) -> Result<ConfigState> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidState(format!("width must be positive, got {width}")));
    }
    let a = (PI * width * width).powf(-0.25);
    Ok(ConfigState::from_fn(grid, |x| {
        let d = (x - center_x) / width;
        C64::from_polar(a * (-d * d / 2.0).exp(), center_p * x)
    }))
}

fn random_coefficient<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Normalized random superposition of Hermite functions up to `max_level`,
/// with a random dilation in [0.85, 1.15], displacement in [-1.5, 1.5] and
/// momentum kick in [-1.5, 1.5]. Such states are negligible outside
/// |x|, |p| ≲ 9 for `max_level` ≤ 8.
pub fn random_config_state<R: Rng + ?Sized>(grid: &Grid1D, rng: &mut R, max_level: usize) -> ConfigState {
    let coeffs: Vec<C64> = (0..=max_level).map(|_| random_coefficient(rng)).collect();
    let scale: f64 = rng.random_range(0.85..1.15);
    let x0: f64 = rng.random_range(-1.5..1.5);
    let p0: f64 = rng.random_range(-1.5..1.5);
    let s = ConfigState::from_fn(grid, |x| {
        let h = hermite_functions(max_level, (x - x0) / scale);
        let v: C64 = coeffs.iter().zip(&h).map(|(c, h)| c * h).sum();
        v * C64::from_polar(1.0, p0 * x)
    });
    s.normalized().expect("random state is nonzero")
}

/// Normalized random Σ c_mn h_m(x) h_n(p) with levels up to `max_level`
/// on each axis.
pub fn random_phase_state<R: Rng + ?Sized>(grid: &PhaseGrid, rng: &mut R, max_level: usize) -> PhaseState {
    let l = max_level + 1;
    let c = DMatrix::from_fn(l, l, |_, _| random_coefficient(rng));
    let hx = hermite_table(grid.x(), max_level);
    let hp = hermite_table(grid.p(), max_level);
    let values = &hx * c * hp.transpose();
    PhaseState::from_matrix_unchecked(*grid, values)
        .normalized()
        .expect("random state is nonzero")
}

/// Matrix whose column n holds h_n sampled on `grid`.
pub fn hermite_table(grid: &Grid1D, max_level: usize) -> DMatrix<C64> {
    let pts = grid.points();
    let mut m = DMatrix::zeros(pts.len(), max_level + 1);
    for (i, &x) in pts.iter().enumerate() {
        for (n, h) in hermite_functions(max_level, x).into_iter().enumerate() {
            m[(i, n)] = C64::new(h, 0.0);
        }
    }
    m
}
