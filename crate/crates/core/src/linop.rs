//! Linear operators tagged with the representation they act in.
//!
//! Configuration-space operators are dense matrices. A dense matrix on a
//! 256×256 phase lattice would have 65536² entries, so phase-space and Moyal
//! operators are kept in factored form and applied matrix-free; `to_dense`
//! materializes them on small lattices.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Grid1D, PhaseGrid};
use crate::moyal;
use crate::states::{ConfigState, PhaseState};
use crate::weyl::{Polynomial, Symbol};
use crate::C64;

/// Largest state-space dimension `to_dense` will materialize.
pub const MAX_DENSE_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Config,
    PhaseSchrodinger,
    Moyal,
}

/// c + α·x + β·p + γ·∂_x + δ·∂_p on phase space (derivatives spectral).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub constant: C64,
    pub x: C64,
    pub p: C64,
    pub d_x: C64,
    pub d_p: C64,
}

impl Affine {
    pub const ZERO: Affine = Affine {
        constant: C64::new(0.0, 0.0),
        x: C64::new(0.0, 0.0),
        p: C64::new(0.0, 0.0),
        d_x: C64::new(0.0, 0.0),
        d_p: C64::new(0.0, 0.0),
    };
}

#[derive(Debug, Clone)]
pub enum OpKind {
    /// Matrix on the flattened state (column-major for phase states).
    Dense(DMatrix<C64>),
    /// M ⊗ 1: the matrix acts on x for every fixed p.
    AlongX(DMatrix<C64>),
    /// T_χ M T*_χ.
    Windowed {
        matrix: DMatrix<C64>,
        window: ConfigState,
    },
    /// U (M ⊗ 1) U⁻¹.
    MoyalConjugate(DMatrix<C64>),
    /// Ψ ↦ a ⋆ Ψ.
    Star(Symbol),
    /// a(X̃, Ξ̃_x) in Weyl order, for a polynomial a.
    Bopp(Polynomial),
    Affine(Affine),
}

#[derive(Debug, Clone, Copy)]
pub enum Space {
    Config(Grid1D),
    Phase(PhaseGrid),
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Config(g) => g.n_points(),
            Space::Phase(g) => g.dim(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinOp {
    repr: Representation,
    space: Space,
    kind: OpKind,
    note: Option<String>,
}

impl LinOp {
    pub fn config(grid: Grid1D, m: DMatrix<C64>) -> LinOp {
        assert_eq!(m.shape(), (grid.n_points(), grid.n_points()));
        LinOp {
            repr: Representation::Config,
            space: Space::Config(grid),
            kind: OpKind::Dense(m),
            note: None,
        }
    }

    /// Dense matrix on the flattened phase lattice.
    pub fn dense_phase(repr: Representation, grid: PhaseGrid, m: DMatrix<C64>) -> Result<LinOp> {
        if repr == Representation::Config {
            return Err(Error::Unsupported("phase matrix tagged as config".into()));
        }
        if m.shape() != (grid.dim(), grid.dim()) {
            return Err(Error::DimensionMismatch {
                expected: grid.dim() * grid.dim(),
                got: m.len(),
            });
        }
        Ok(LinOp {
            repr,
            space: Space::Phase(grid),
            kind: OpKind::Dense(m),
            note: None,
        })
    }

    pub(crate) fn structured(repr: Representation, grid: PhaseGrid, kind: OpKind) -> LinOp {
        LinOp {
            repr,
            space: Space::Phase(grid),
            kind,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> LinOp {
        self.note = Some(note.into());
        self
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn kind(&self) -> &OpKind {
        &self.kind
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// The dense matrix of a configuration-space operator.
    pub fn matrix(&self) -> Option<&DMatrix<C64>> {
        match (&self.space, &self.kind) {
            (Space::Config(_), OpKind::Dense(m)) => Some(m),
            _ => None,
        }
    }

    pub fn apply_config(&self, psi: &ConfigState) -> Result<ConfigState> {
        match (&self.space, &self.kind) {
            (Space::Config(g), OpKind::Dense(m)) => {
                g.ensure_same(psi.grid(), "operator application")?;
                Ok(psi.with_values(m * psi.values()))
            }
            _ => Err(Error::Unsupported(
                "phase-space operator applied to a configuration state".into(),
            )),
        }
    }

    pub fn apply_phase(&self, psi: &PhaseState) -> Result<PhaseState> {
        self.apply_phase_with(psi, Execution::default())
    }

    pub fn apply_phase_with(&self, psi: &PhaseState, exec: Execution) -> Result<PhaseState> {
        let grid = match &self.space {
            Space::Phase(g) => g,
            Space::Config(_) => {
                return Err(Error::Unsupported(
                    "configuration operator applied to a phase state".into(),
                ))
            }
        };
        grid.ensure_same(psi.grid(), "operator application")?;
        match &self.kind {
            OpKind::Dense(m) => {
                let v = DVector::from_column_slice(psi.values().as_slice());
                let out = m * v;
                let (r, c) = psi.values().shape();
                Ok(psi.with_values(DMatrix::from_column_slice(r, c, out.as_slice())))
            }
            OpKind::AlongX(m) => Ok(psi.with_values(m * psi.values())),
            OpKind::Windowed { matrix, window } => {
                let dp = grid.p().spacing();
                let phi = psi.values() * window.values() * C64::new(dp, 0.0);
                let out = matrix * phi;
                Ok(psi.with_values(out * window.values().map(|c| c.conj()).transpose()))
            }
            OpKind::MoyalConjugate(m) => {
                let back = moyal::moyal_map_u_inverse_with(psi, exec)?;
                let mid = back.with_values(m * back.values());
                moyal::moyal_map_u_with(&mid, exec)
            }
            OpKind::Star(a) => moyal::star_apply_with(a, psi, exec),
            OpKind::Bopp(poly) => moyal::bopp_apply(poly, psi, exec),
            OpKind::Affine(aff) => Ok(moyal::affine_apply(aff, psi, exec)),
        }
    }

    /// The full matrix; refused above [`MAX_DENSE_DIM`].
    pub fn to_dense(&self) -> Result<DMatrix<C64>> {
        let dim = self.dim();
        if dim > MAX_DENSE_DIM {
            return Err(Error::Unsupported(format!(
                "dense materialization of a {dim}-dimensional operator"
            )));
        }
        match (&self.space, &self.kind) {
            (_, OpKind::Dense(m)) => Ok(m.clone()),
            (Space::Phase(g), OpKind::AlongX(m)) => {
                let id = DMatrix::<C64>::identity(g.p().n_points(), g.p().n_points());
                Ok(id.kronecker(m))
            }
            (Space::Phase(g), _) => {
                let n = g.n_points();
                let mut out = DMatrix::zeros(dim, dim);
                for col in 0..dim {
                    let mut e = DMatrix::zeros(n, n);
                    e[(col % n, col / n)] = C64::new(1.0, 0.0);
                    let img = self.apply_phase(&PhaseState::new(*g, e)?)?;
                    out.column_mut(col).copy_from_slice(img.values().as_slice());
                }
                Ok(out)
            }
            (Space::Config(_), _) => unreachable!("configuration operators are dense"),
        }
    }
}

/// Common interface of the two state spaces, used by the time-evolution
/// and eigen-solvers.
pub trait StateVector: Clone {
    /// Samples in a fixed flat order.
    fn flat(&self) -> &[C64];
    /// Same grid, new flat samples.
    fn with_flat(&self, v: &[C64]) -> Self;
    /// Quadrature weight of one sample (dx or dx·dp).
    fn weight(&self) -> f64;
    fn apply_op(op: &LinOp, s: &Self, exec: Execution) -> Result<Self>;
}

impl StateVector for ConfigState {
    fn flat(&self) -> &[C64] {
        self.values().as_slice()
    }

    fn with_flat(&self, v: &[C64]) -> Self {
        self.with_values(DVector::from_column_slice(v))
    }

    fn weight(&self) -> f64 {
        self.grid().spacing()
    }

    fn apply_op(op: &LinOp, s: &Self, _exec: Execution) -> Result<Self> {
        op.apply_config(s)
    }
}

impl StateVector for PhaseState {
    fn flat(&self) -> &[C64] {
        self.values().as_slice()
    }

    fn with_flat(&self, v: &[C64]) -> Self {
        let (r, c) = self.values().shape();
        self.with_values(DMatrix::from_column_slice(r, c, v))
    }

    fn weight(&self) -> f64 {
        self.grid().cell()
    }

    fn apply_op(op: &LinOp, s: &Self, exec: Execution) -> Result<Self> {
        op.apply_phase_with(s, exec)
    }
}
