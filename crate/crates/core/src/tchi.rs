//! The isometry T_χψ = ψ ⊗ χ*, its adjoint, the projector onto its range
//! H_χ and the H_χ-representation of configuration-space operators.

use nalgebra::RowDVector;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, PhaseGrid};
use crate::linop::{LinOp, OpKind, Representation};
use crate::states::{hermite_state, ConfigState, PhaseState};
use crate::C64;

/// Allowed deviation of ‖χ‖ from 1.
pub const WINDOW_NORM_TOL: f64 = 1e-10;

/// T_χ for a normalized window χ sampled on the p axis.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedIsometry {
    chi: ConfigState,
}

impl WindowedIsometry {
    pub fn new(chi: ConfigState) -> Result<WindowedIsometry> {
        let norm = chi.norm();
        if (norm - 1.0).abs() > WINDOW_NORM_TOL {
            return Err(Error::InvalidState(format!("window norm {norm} is not 1")));
        }
        Ok(WindowedIsometry { chi })
    }

    /// Hermite window of the given level on the p axis.
    pub fn hermite(p_axis: &Grid1D, level: usize) -> Result<WindowedIsometry> {
        WindowedIsometry::new(hermite_state(p_axis, level)?)
    }

    /// Level-0 Hermite window on the p axis of `grid`.
    pub fn standard(grid: &PhaseGrid) -> WindowedIsometry {
        WindowedIsometry::hermite(grid.p(), 0).expect("level 0 is in range")
    }

    pub fn chi(&self) -> &ConfigState {
        &self.chi
    }

    pub fn p_grid(&self) -> &Grid1D {
        self.chi.grid()
    }

    /// The phase lattice formed with a configuration grid.
    pub fn phase_grid(&self, x: &Grid1D) -> Result<PhaseGrid> {
        PhaseGrid::new(*x, *self.chi.grid())
    }

    fn conj_chi(&self) -> RowDVector<C64> {
        self.chi.values().map(|c| c.conj()).transpose()
    }

    /// T_χψ(x, p) = ψ(x)χ*(p).
    pub fn apply(&self, psi: &ConfigState) -> Result<PhaseState> {
        let grid = self.phase_grid(psi.grid())?;
        PhaseState::new(grid, psi.values() * self.conj_chi())
    }

    /// T*_χΨ(x) = ∫Ψ(x, p)χ(p) dp.
    pub fn adjoint(&self, psi: &PhaseState) -> Result<ConfigState> {
        psi.grid().p().ensure_same(self.chi.grid(), "window adjoint")?;
        let dp = self.chi.grid().spacing();
        let v = psi.values() * self.chi.values() * C64::new(dp, 0.0);
        ConfigState::new(*psi.grid().x(), v.iter().copied().collect())
    }

    /// P_χ = T_χT*_χ.
    pub fn project(&self, psi: &PhaseState) -> Result<PhaseState> {
        self.apply(&self.adjoint(psi)?)
    }

    /// Â = T_χ â T*_χ on the whole phase lattice (zero on H_χ^⊥).
    pub fn represent(&self, op: &LinOp) -> Result<LinOp> {
        let m = op
            .matrix()
            .ok_or_else(|| Error::Unsupported("only configuration-space matrices can be represented on H_χ".into()))?;
        let x = match op.space() {
            crate::linop::Space::Config(g) => *g,
            crate::linop::Space::Phase(_) => unreachable!(),
        };
        let grid = self.phase_grid(&x)?;
        let kind = OpKind::Windowed {
            matrix: m.clone(),
            window: self.chi.clone(),
        };
        Ok(LinOp::structured(Representation::PhaseSchrodinger, grid, kind).with_note("window representation"))
    }
}

pub fn tchi_apply(t: &WindowedIsometry, psi: &ConfigState) -> Result<PhaseState> {
    t.apply(psi)
}

pub fn tchi_adjoint(t: &WindowedIsometry, psi: &PhaseState) -> Result<ConfigState> {
    t.adjoint(psi)
}

pub fn projector_apply(t: &WindowedIsometry, psi: &PhaseState) -> Result<PhaseState> {
    t.project(psi)
}

pub fn represent_on_hchi(t: &WindowedIsometry, op: &LinOp) -> Result<LinOp> {
    t.represent(op)
}
