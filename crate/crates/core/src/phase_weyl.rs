//! Phase-space Weyl operators and their intertwining with the
//! configuration-space ones.
//!
//! The kernel of Â^W factorizes as K_a(x, x′)δ(p − p′), so Â^W is the
//! configuration matrix applied along x for every fixed p.

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exec::Execution;
use crate::fourier;
use crate::linop::{LinOp, OpKind, Representation};
use crate::states::{random_config_state, random_phase_state, PhaseState};
use crate::tchi::WindowedIsometry;
use crate::weyl::{config_matrix_with, quantize_config, Symbol};
use crate::C64;

/// Highest Hermite level mixed into random test states.
pub const RANDOM_LEVEL: usize = 8;

/// T̂_PS(z₀)Ψ(x, p) = e^{i(ξ₀x − ξ₀x₀/2)} Ψ(x − x₀, p).
pub fn ps_heisenberg_weyl(z0: (f64, f64), psi: &PhaseState) -> PhaseState {
    let (x0, xi0) = z0;
    let g = psi.grid();
    let dx = g.x().spacing();
    let xs = g.x().points();
    let mut v = psi.values().clone();
    fourier::for_each_column(&mut v, Execution::default(), |_, col| {
        if x0 != 0.0 {
            fourier::shift_in_place(col, -x0 / dx);
        }
        for (c, &x) in col.iter_mut().zip(&xs) {
            *c *= C64::from_polar(1.0, xi0 * x - 0.5 * xi0 * x0);
        }
    });
    psi.with_values(v)
}

/// Â^W on the phase lattice of the symbol (whose p axis is the ξ axis).
pub fn quantize_phase(a: &Symbol) -> Result<LinOp> {
    quantize_phase_with(a, Execution::default())
}

pub fn quantize_phase_with(a: &Symbol, exec: Execution) -> Result<LinOp> {
    let m = config_matrix_with(a, exec);
    Ok(
        LinOp::structured(Representation::PhaseSchrodinger, *a.grid(), OpKind::AlongX(m))
            .with_note("phase-space weyl operator"),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntertwiningReport {
    pub relation: String,
    pub max_residual: f64,
    pub samples: usize,
}

/// Max residuals of Â^W T_χ = T_χ â^W (over random ψ) and
/// T*_χ Â^W = â^W T*_χ (over random Ψ).
pub fn verify_intertwining<R: Rng + ?Sized>(
    a: &Symbol,
    t: &WindowedIsometry,
    samples: usize,
    rng: &mut R,
) -> Result<Vec<IntertwiningReport>> {
    let small = quantize_config(a)?;
    let x = *a.grid().x();
    let pgrid = t.phase_grid(&x)?;
    let big = LinOp::structured(
        Representation::PhaseSchrodinger,
        pgrid,
        OpKind::AlongX(small.matrix().expect("dense").clone()),
    );
    let mut forward: f64 = 0.0;
    let mut adjoint: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let psi = random_config_state(&x, rng, RANDOM_LEVEL);
        let lhs = big.apply_phase(&t.apply(&psi)?)?;
        let rhs = t.apply(&small.apply_config(&psi)?)?;
        forward = forward.max(lhs.distance(&rhs)? / psi.norm());

        let big_psi = random_phase_state(&pgrid, rng, RANDOM_LEVEL);
        let lhs = t.adjoint(&big.apply_phase(&big_psi)?)?;
        let rhs = small.apply_config(&t.adjoint(&big_psi)?)?;
        adjoint = adjoint.max(lhs.distance(&rhs)? / big_psi.norm());
    }
    Ok(vec![
        IntertwiningReport {
            relation: "forward".into(),
            max_residual: forward,
            samples: samples.max(1),
        },
        IntertwiningReport {
            relation: "adjoint".into(),
            max_residual: adjoint,
            samples: samples.max(1),
        },
    ])
}
