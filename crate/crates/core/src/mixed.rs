//! Mixed states as phase-space Schrödinger vectors Ψ = Σ_k ψ_k ⊗ χ_k^*
//! with orthogonal windows χ_k and Σ‖χ_k‖² = 1.
//!
//! Measuring a configuration observable with nondegenerate eigenvector φ_α
//! uses P_α ⊗ 1, so P(α) = Σ_k ‖χ_k‖² |(φ_α|ψ_k)|².

use std::path::Path;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::linop::LinOp;
use crate::spectral::eig;
use crate::states::{inner_config, ConfigState, PhaseState};
use crate::C64;

pub const MAX_COMPONENTS: usize = 8;

/// Gram–Schmidt corrections above this are reported.
pub const ORTHOGONALITY_WARN: f64 = 1e-8;

pub const NORM_TOL: f64 = 1e-10;

/// Relative eigenvalue gap below which a measured level counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct MixedState {
    psi: Vec<ConfigState>,
    chi: Vec<ConfigState>,
}

#[derive(Serialize, Deserialize)]
struct ComponentJson {
    psi: ConfigState,
    chi: ConfigState,
    /// When present, χ is normalized and rescaled to ‖χ‖² = weight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct MixedJson {
    components: Vec<ComponentJson>,
}

impl MixedState {
    /// Components (ψ_k, χ_k). The χ_k are orthogonalized in order with
    /// their norms kept.
    pub fn new(components: Vec<(ConfigState, ConfigState)>) -> Result<MixedState> {
        if components.is_empty() || components.len() > MAX_COMPONENTS {
            return Err(Error::InvalidState(format!(
                "{} components, expected 1..={MAX_COMPONENTS}",
                components.len()
            )));
        }
        let (psi, raw): (Vec<_>, Vec<_>) = components.into_iter().unzip();
        for p in &psi {
            p.grid().ensure_same(psi[0].grid(), "mixed components")?;
            if (p.norm() - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidState(format!("component norm {}", p.norm())));
            }
        }
        let mut chi: Vec<ConfigState> = Vec::with_capacity(raw.len());
        for (k, c) in raw.into_iter().enumerate() {
            c.grid().ensure_same(psi[0].grid(), "mixed windows")?;
            let n0 = c.norm();
            if n0 == 0.0 {
                return Err(Error::InvalidState(format!("window {k} vanishes")));
            }
            let mut v = c.values().clone();
            for e in &chi {
                let proj = inner_config(e, &c)? / e.norm().powi(2);
                v -= e.values() * proj;
            }
            let fixed = c.with_values(v);
            let n1 = fixed.norm();
            if n1 < 1e-6 * n0 {
                return Err(Error::InvalidState(format!("window {k} is linearly dependent")));
            }
            let fixed = fixed.scaled(C64::new(n0 / n1, 0.0));
            let change = fixed.distance(&c)? / n0;
            if change > ORTHOGONALITY_WARN {
                warn!("window {k} adjusted by {change:.3e} to restore orthogonality");
            }
            chi.push(fixed);
        }
        let total: f64 = chi.iter().map(|c| c.norm().powi(2)).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("window weights sum to {total}")));
        }
        Ok(MixedState { psi, chi })
    }

    /// Components with normalized windows rescaled by √w_k.
    pub fn with_weights(components: Vec<(ConfigState, ConfigState, f64)>) -> Result<MixedState> {
        let parts = components
            .into_iter()
            .map(|(p, c, w)| {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::InvalidState(format!("weight {w}")));
                }
                Ok((p, c.normalized()?.scaled(C64::new(w.sqrt(), 0.0))))
            })
            .collect::<Result<_>>()?;
        MixedState::new(parts)
    }

    pub fn from_json(text: &str) -> Result<MixedState> {
        let j: MixedJson = serde_json::from_str(text)?;
        let parts = j
            .components
            .into_iter()
            .map(|c| match c.weight {
                Some(w) => {
                    if !(w > 0.0 && w.is_finite()) {
                        return Err(Error::InvalidState(format!("weight {w}")));
                    }
                    Ok((c.psi, c.chi.normalized()?.scaled(C64::new(w.sqrt(), 0.0))))
                }
                None => Ok((c.psi, c.chi)),
            })
            .collect::<Result<_>>()?;
        MixedState::new(parts)
    }

    pub fn load(path: &Path) -> Result<MixedState> {
        MixedState::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let components = self
            .psi
            .iter()
            .zip(&self.chi)
            .map(|(p, c)| ComponentJson {
                psi: p.clone(),
                chi: c.clone(),
                weight: None,
            })
            .collect();
        Ok(serde_json::to_string(&MixedJson { components })?)
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn psi(&self) -> &[ConfigState] {
        &self.psi
    }

    pub fn chi(&self) -> &[ConfigState] {
        &self.chi
    }

    /// ‖χ_k‖².
    pub fn weights(&self) -> Vec<f64> {
        self.chi.iter().map(|c| c.norm().powi(2)).collect()
    }

    pub fn phase_grid(&self) -> Result<PhaseGrid> {
        PhaseGrid::new(*self.psi[0].grid(), *self.chi[0].grid())
    }

    /// Σ_k ψ_k ⊗ χ_k^*.
    pub fn to_phase(&self) -> Result<PhaseState> {
        let grid = self.phase_grid()?;
        let n = grid.n_points();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (p, c) in self.psi.iter().zip(&self.chi) {
            m += p.values() * c.values().map(|z| z.conj()).transpose();
        }
        PhaseState::new(grid, m)
    }

    /// P(α) = Σ_k ‖χ_k‖² |(φ_α|ψ_k)|² for a normalized φ_α.
    pub fn measure_probability(&self, phi: &ConfigState) -> Result<f64> {
        check_normalized(phi)?;
        let mut p = 0.0;
        for (psi, w) in self.psi.iter().zip(self.weights()) {
            p += w * inner_config(phi, psi)?.norm_sqr();
        }
        Ok(p)
    }

    /// (P_α ⊗ 1)Ψ / √P(α).
    pub fn collapse(&self, phi: &ConfigState) -> Result<PhaseState> {
        check_normalized(phi)?;
        let grid = self.phase_grid()?;
        let mut window = DMatrix::<C64>::zeros(1, grid.n_points());
        for (psi, c) in self.psi.iter().zip(&self.chi) {
            let amp = inner_config(phi, psi)?;
            window += c.values().map(|z| z.conj()).transpose() * amp;
        }
        let p = self.measure_probability(phi)?;
        if p <= f64::EPSILON {
            return Err(Error::ZeroProjection);
        }
        PhaseState::new(grid, phi.values() * window / C64::new(p.sqrt(), 0.0))
    }

    /// Probability and collapsed state for eigenvalue number `level` of a
    /// configuration observable; degenerate levels are refused.
    pub fn measure_level(&self, op: &LinOp, level: usize) -> Result<(f64, f64, PhaseState)> {
        let spec = eig(op)?;
        let lambda = *spec
            .values
            .get(level)
            .ok_or_else(|| Error::InvalidState(format!("level {level} out of range")))?;
        let scale = spec.values.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let near = |k: usize| {
            spec.values
                .get(k)
                .is_some_and(|v| (v - lambda).abs() <= DEGENERACY_TOL * scale)
        };
        if (level > 0 && near(level - 1)) || near(level + 1) {
            return Err(Error::Degenerate(format!("level {level} at {lambda}")));
        }
        let phi = &spec.vectors[level];
        Ok((lambda, self.measure_probability(phi)?, self.collapse(phi)?))
    }

    /// Â Ψ with Â = Σ_k T_{e_k} â T*_{e_k}, e_k = χ_k/‖χ_k‖.
    pub fn apply_represented(&self, op: &LinOp) -> Result<PhaseState> {
        let grid = self.phase_grid()?;
        let big = self.to_phase()?;
        let dp = grid.p().spacing();
        let n = grid.n_points();
        let mut out = DMatrix::<C64>::zeros(n, n);
        for c in &self.chi {
            let e = c.normalized()?;
            let reduced = ConfigState::new(
                *grid.x(),
                (big.values() * e.values() * C64::new(dp, 0.0))
                    .iter()
                    .copied()
                    .collect(),
            )?;
            let image = op.apply_config(&reduced)?;
            out += image.values() * e.values().map(|z| z.conj()).transpose();
        }
        PhaseState::new(grid, out)
    }

    /// ((Ψ|ÂΨ)) computed on the phase lattice.
    pub fn phase_expectation(&self, op: &LinOp) -> Result<C64> {
        crate::states::inner_phase(&self.to_phase()?, &self.apply_represented(op)?)
    }

    /// Σ_k ‖χ_k‖² (ψ_k|âψ_k).
    pub fn convex_expectation(&self, op: &LinOp) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for (p, w) in self.psi.iter().zip(self.weights()) {
            s += inner_config(p, &op.apply_config(p)?)? * w;
        }
        Ok(s)
    }
}

fn check_normalized(phi: &ConfigState) -> Result<()> {
    if (phi.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidState(format!("measured state has norm {}", phi.norm())));
    }
    Ok(())
}
