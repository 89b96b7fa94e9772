use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fourier;
use crate::grid::PhaseGrid;
use crate::weyl::poly::Polynomial;
use crate::C64;

/// Largest admissible [`fourier::spectral_tail`] for sampled data that is
/// going to be Fourier-interpolated.
pub const BAND_LIMIT_TOL: f64 = 1e-8;

/// A classical observable a(x, ξ) on a phase lattice whose p axis is the
/// ξ axis.
///
/// Besides the lattice values the symbol keeps its values on the x-refined
/// lattice x₀ + r·dx/2, r = 0..2N (the midpoints needed by the Weyl kernel
/// and the Moyal product), and, when known, an exact polynomial form.
#[derive(Debug, Clone)]
pub struct Symbol {
    grid: PhaseGrid,
    refined: DMatrix<C64>,
    poly: Option<Polynomial>,
}

impl Symbol {
    /// Samples `f` on the refined lattice.
    pub fn from_fn(grid: &PhaseGrid, f: impl Fn(f64, f64) -> C64) -> Result<Symbol> {
        grid.ensure_dual_pair("symbol")?;
        let n = grid.n_points();
        let x0 = grid.x().start();
        let h = grid.x().spacing() / 2.0;
        let xis = grid.p().points();
        let refined = DMatrix::from_fn(2 * n, n, |r, m| f(x0 + r as f64 * h, xis[m]));
        check_finite(&refined)?;
        Ok(Symbol {
            grid: *grid,
            refined,
            poly: None,
        })
    }

    pub fn from_polynomial(grid: &PhaseGrid, poly: Polynomial) -> Result<Symbol> {
        let mut s = Symbol::from_fn(grid, |x, xi| poly.eval(x, xi))?;
        s.poly = Some(poly);
        Ok(s)
    }

    /// Lattice samples; midpoint rows are filled by Fourier interpolation
    /// along x, which requires every ξ column to be band-limited.
    pub fn from_samples(grid: &PhaseGrid, values: DMatrix<C64>) -> Result<Symbol> {
        Symbol::from_samples_with(grid, values, Execution::default())
    }

    pub fn from_samples_with(grid: &PhaseGrid, values: DMatrix<C64>, exec: Execution) -> Result<Symbol> {
        grid.ensure_dual_pair("symbol")?;
        let n = grid.n_points();
        if values.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: values.len(),
            });
        }
        check_finite(&values)?;
        let tails = exec.map(n, |m| {
            let col: Vec<C64> = values.column(m).iter().copied().collect();
            fourier::spectral_tail(&col)
        });
        let residual = tails.into_iter().fold(0.0, f64::max);
        if residual > BAND_LIMIT_TOL {
            return Err(Error::NotBandLimited {
                what: "symbol midpoint interpolation",
                residual,
                tolerance: BAND_LIMIT_TOL,
            });
        }
        let half = fourier::shift_2d(&values, 0.5, 0.0, exec);
        let refined = DMatrix::from_fn(2 * n, n, |r, m| {
            if r % 2 == 0 {
                values[(r / 2, m)]
            } else {
                half[(r / 2, m)]
            }
        });
        Ok(Symbol {
            grid: *grid,
            refined,
            poly: None,
        })
    }

    pub(crate) fn from_refined(grid: &PhaseGrid, refined: DMatrix<C64>, poly: Option<Polynomial>) -> Symbol {
        debug_assert_eq!(refined.shape(), (2 * grid.n_points(), grid.n_points()));
        Symbol {
            grid: *grid,
            refined,
            poly,
        }
    }

    pub fn constant(grid: &PhaseGrid, c: C64) -> Result<Symbol> {
        Symbol::from_polynomial(grid, Polynomial::constant(c))
    }

    pub fn named(grid: &PhaseGrid, name: NamedSymbol) -> Result<Symbol> {
        Symbol::from_polynomial(grid, name.polynomial())
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    /// a(x_i, ξ_m).
    pub fn value(&self, i: usize, m: usize) -> C64 {
        self.refined[(2 * i, m)]
    }

    /// The N×N lattice samples.
    pub fn values(&self) -> DMatrix<C64> {
        let n = self.grid.n_points();
        DMatrix::from_fn(n, n, |i, m| self.refined[(2 * i, m)])
    }

    /// Samples on the 2N×N lattice x₀ + r·dx/2.
    pub fn refined(&self) -> &DMatrix<C64> {
        &self.refined
    }

    pub fn polynomial(&self) -> Option<&Polynomial> {
        self.poly.as_ref()
    }

    /// max |Im a|.
    pub fn max_imag(&self) -> f64 {
        self.refined.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Symbol {
        Symbol {
            grid: self.grid,
            refined: &self.refined * s,
            poly: self.poly.as_ref().map(|p| p.scale(s)),
        }
    }

    pub fn add(&self, other: &Symbol) -> Result<Symbol> {
        self.grid.ensure_same(&other.grid, "symbol sum")?;
        let poly = match (&self.poly, &other.poly) {
            (Some(a), Some(b)) => Some(a.add(b)),
            _ => None,
        };
        Ok(Symbol {
            grid: self.grid,
            refined: &self.refined + &other.refined,
            poly,
        })
    }
}

fn check_finite(m: &DMatrix<C64>) -> Result<()> {
    if m.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidState("non-finite symbol sample".into()))
    }
}

/// The standard test observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedSymbol {
    Unit,
    Position,
    Momentum,
    /// x·ξ, the Weyl symbol of (x̂ξ̂ + ξ̂x̂)/2.
    PositionMomentum,
    Oscillator,
    FreeParticle,
}

impl NamedSymbol {
    pub const ALL: [NamedSymbol; 6] = [
        NamedSymbol::Unit,
        NamedSymbol::Position,
        NamedSymbol::Momentum,
        NamedSymbol::PositionMomentum,
        NamedSymbol::Oscillator,
        NamedSymbol::FreeParticle,
    ];

    pub fn polynomial(self) -> Polynomial {
        let one = C64::new(1.0, 0.0);
        match self {
            NamedSymbol::Unit => Polynomial::constant(one),
            NamedSymbol::Position => Polynomial::x(),
            NamedSymbol::Momentum => Polynomial::xi(),
            NamedSymbol::PositionMomentum => Polynomial::monomial(1, 1, one),
            NamedSymbol::Oscillator => Polynomial::oscillator(),
            NamedSymbol::FreeParticle => Polynomial::free_particle(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NamedSymbol::Unit => "unit",
            NamedSymbol::Position => "position",
            NamedSymbol::Momentum => "momentum",
            NamedSymbol::PositionMomentum => "position-momentum",
            NamedSymbol::Oscillator => "oscillator",
            NamedSymbol::FreeParticle => "free",
        }
    }
}

impl fmt::Display for NamedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NamedSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let found = match key.as_str() {
            "unit" | "one" | "identity" => NamedSymbol::Unit,
            "position" | "x" => NamedSymbol::Position,
            "momentum" | "xi" | "p" => NamedSymbol::Momentum,
            "position-momentum" | "xxi" | "xp" => NamedSymbol::PositionMomentum,
            "oscillator" | "harmonic" => NamedSymbol::Oscillator,
            "free" | "free-particle" => NamedSymbol::FreeParticle,
            _ => return Err(Error::Parse(format!("unknown symbol '{s}'"))),
        };
        Ok(found)
    }
}
