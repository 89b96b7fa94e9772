//! Eigen-decomposition, unitary time evolution and cross-representation
//! comparisons.
//!
//! Configuration operators are decomposed densely. Phase-space and Moyal
//! operators live on N² points, so their spectra are computed on the
//! relevant subspace (H_χ or U(H_χ)) by Rayleigh–Ritz in a smooth basis,
//! and their dynamics by a Lanczos propagator.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::Grid1D;
use crate::linop::{LinOp, StateVector};
use crate::moyal::{moyal_map_u, moyal_map_u_inverse, star_operator};
use crate::phase_weyl::quantize_phase;
use crate::states::{hermite_functions, ConfigState, PhaseState};
use crate::tchi::WindowedIsometry;
use crate::weyl::{quantize_config, Symbol};
use crate::C64;

/// Relative anti-Hermitian part tolerated before decomposition.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Levels compared across representations.
pub const COMPARED_LEVELS: usize = 8;

/// Size and dilation of the Hermite basis used for Ritz restriction.
pub const RITZ_SIZE: usize = 32;
pub const RITZ_SCALE: f64 = 1.1;

/// Eigenvalues closer than this are merged into one distinct value.
pub const DISTINCT_TOL: f64 = 1e-6;

/// Eigenpairs of a configuration operator, ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<ConfigState>,
    /// max |M − M*| / max |M| before symmetrization.
    pub asymmetry: f64,
}

fn asymmetry(m: &DMatrix<C64>) -> f64 {
    let scale = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let d = m - m.adjoint();
    d.iter().map(|c| c.norm()).fold(0.0, f64::max) / scale
}

/// Symmetrized decomposition with ascending eigenvalues.
fn hermitian_eig(m: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>, f64)> {
    let asym = asymmetry(m);
    if asym > HERMITIAN_TOL {
        return Err(Error::NotHermitian(asym));
    }
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors, asym))
}

/// Full decomposition of a configuration operator.
pub fn eig(op: &LinOp) -> Result<Spectrum> {
    let (m, grid) = config_parts(op)?;
    let (values, vecs, asymmetry) = hermitian_eig(m)?;
    let w = 1.0 / grid.spacing().sqrt();
    let vectors = (0..vecs.ncols())
        .map(|j| ConfigState::zeros(&grid).with_values(vecs.column(j) * C64::new(w, 0.0)))
        .collect();
    Ok(Spectrum {
        values,
        vectors,
        asymmetry,
    })
}

fn config_parts(op: &LinOp) -> Result<(&DMatrix<C64>, Grid1D)> {
    match (op.matrix(), op.space()) {
        (Some(m), crate::linop::Space::Config(g)) => Ok((m, *g)),
        _ => Err(Error::Unsupported(
            "dense decomposition needs a configuration operator; restrict phase operators first".into(),
        )),
    }
}

/// e^{−i·op·t} applied to `state`: spectral for configuration operators,
/// Lanczos otherwise.
pub fn evolve<S: StateVector>(op: &LinOp, state: &S, t: f64) -> Result<S> {
    evolve_with(op, state, t, Execution::default())
}

pub fn evolve_with<S: StateVector>(op: &LinOp, state: &S, t: f64, exec: Execution) -> Result<S> {
    if !t.is_finite() {
        return Err(Error::InvalidState(format!("evolution time {t}")));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    if let Some(m) = op.matrix() {
        let (values, v, _) = hermitian_eig(m)?;
        let x = DVector::from_column_slice(state.flat());
        let c = v.adjoint() * x;
        let c = DVector::from_fn(c.len(), |k, _| c[k] * C64::from_polar(1.0, -values[k] * t));
        let out = v * c;
        return Ok(state.with_flat(out.as_slice()));
    }
    lanczos_evolve(op, state, t, exec)
}

const KRYLOV_MAX: usize = 40;
const KRYLOV_TOL: f64 = 1e-12;

fn dot(a: &[C64], b: &[C64], w: f64) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>() * w
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

/// One Krylov step of length `dt`; `None` when the subspace did not
/// converge within [`KRYLOV_MAX`] vectors.
fn krylov_step<S: StateVector>(op: &LinOp, v: &S, dt: f64, exec: Execution) -> Result<Option<S>> {
    let w8 = v.weight();
    let beta0 = dot(v.flat(), v.flat(), w8).re.sqrt();
    if beta0 == 0.0 {
        return Ok(Some(v.clone()));
    }
    let mut basis: Vec<Vec<C64>> = vec![v.flat().iter().map(|c| c / beta0).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    loop {
        let j = basis.len() - 1;
        let q = v.with_flat(&basis[j]);
        let hq = S::apply_op(op, &q, exec)?;
        let mut w: Vec<C64> = hq.flat().to_vec();
        alpha.push(dot(&basis[j], &w, w8).re);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w, w8);
                axpy(&mut w, -c, b);
            }
        }
        let b = dot(&w, &w, w8).re.sqrt();
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        // y = e^{−iT dt} e₁
        let y: Vec<C64> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|k| {
                        let u = eig.eigenvectors[(r, k)] * eig.eigenvectors[(0, k)];
                        C64::from_polar(u, -eig.eigenvalues[k] * dt)
                    })
                    .sum()
            })
            .collect();
        let err = b * y[m - 1].norm();
        if err < KRYLOV_TOL || b < 1e-14 {
            let mut out = vec![C64::new(0.0, 0.0); v.flat().len()];
            for (c, q) in y.iter().zip(&basis) {
                axpy(&mut out, c * beta0, q);
            }
            return Ok(Some(v.with_flat(&out)));
        }
        if m >= KRYLOV_MAX {
            return Ok(None);
        }
        beta.push(b);
        basis.push(w.iter().map(|c| c / b).collect());
    }
}

fn lanczos_evolve<S: StateVector>(op: &LinOp, state: &S, t: f64, exec: Execution) -> Result<S> {
    let mut cur = state.clone();
    let mut done = 0.0;
    let mut dt = t;
    while (t - done).abs() > 1e-15 * t.abs().max(1.0) {
        let step = if (dt > 0.0 && done + dt > t) || (dt < 0.0 && done + dt < t) {
            t - done
        } else {
            dt
        };
        match krylov_step(op, &cur, step, exec)? {
            Some(next) => {
                cur = next;
                done += step;
            }
            None => {
                dt = step / 2.0;
                if dt.abs() < 1e-9 * t.abs() {
                    return Err(Error::Unsupported("Lanczos propagation failed to converge".into()));
                }
            }
        }
    }
    Ok(cur)
}

/// Normalized dilated Hermite functions h_k(x/s)/√s, k < `size`.
pub fn ritz_basis(grid: &Grid1D, size: usize, scale: f64) -> Vec<ConfigState> {
    let pts = grid.points();
    let table: Vec<Vec<f64>> = pts.iter().map(|&x| hermite_functions(size - 1, x / scale)).collect();
    (0..size)
        .map(|k| {
            let v: Vec<C64> = table.iter().map(|h| C64::new(h[k] / scale.sqrt(), 0.0)).collect();
            ConfigState::new(*grid, v).expect("finite samples")
        })
        .collect()
}

/// Rayleigh–Ritz eigenvalues of `apply` on span(`basis`), with Löwdin
/// orthonormalization of the basis.
pub fn ritz_values<S, F>(basis: &[S], apply: F) -> Result<Vec<f64>>
where
    S: StateVector,
    F: Fn(&S) -> Result<S>,
{
    let k = basis.len();
    let images: Vec<S> = basis.iter().map(&apply).collect::<Result<_>>()?;
    let w = basis[0].weight();
    let gram = DMatrix::from_fn(k, k, |i, j| dot(basis[i].flat(), basis[j].flat(), w));
    let b = DMatrix::from_fn(k, k, |i, j| dot(basis[i].flat(), images[j].flat(), w));
    let (gv, gvec, _) = hermitian_eig(&gram)?;
    if gv[0] <= 1e-12 {
        return Err(Error::Degenerate("Ritz basis is linearly dependent".into()));
    }
    let inv_sqrt = &gvec
        * DMatrix::from_diagonal(&DVector::from_iterator(
            k,
            gv.iter().map(|l| C64::new(1.0 / l.sqrt(), 0.0)),
        ))
        * gvec.adjoint();
    let h = &inv_sqrt * b * &inv_sqrt;
    Ok(hermitian_eig(&h)?.0)
}

/// Sorted values with neighbours closer than [`DISTINCT_TOL`] merged.
pub fn distinct(values: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for &v in values {
        if out.last().is_none_or(|l| (v - l).abs() > DISTINCT_TOL) {
            out.push(v);
        }
    }
    out
}

/// Symmetric Hausdorff distance between two finite sets.
pub fn hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let one = |a: &[f64], b: &[f64]| {
        a.iter()
            .map(|x| b.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

#[derive(Debug, Clone, Serialize)]
pub struct Ladders {
    pub config: Vec<f64>,
    pub phase: Vec<f64>,
    pub moyal: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub case: String,
    /// False when the spectrum is not a discrete ladder; only quantiles are
    /// reported then.
    pub discrete: bool,
    pub eigenvalues: Ladders,
    /// ‖â ψ_k − λ_k ψ_k‖ of the configuration eigenpairs, and the same after
    /// transport to H_χ and to U(H_χ).
    pub residuals: Vec<f64>,
    /// Hausdorff distances config–phase, config–moyal, phase–moyal.
    pub distances: Vec<f64>,
    pub quantiles: Option<Ladders>,
}

fn quantiles(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    [0.1, 0.25, 0.5, 0.75, 0.9]
        .iter()
        .map(|q| v[((v.len() - 1) as f64 * q).round() as usize])
        .collect()
}

/// Distinct low-lying spectra of â^W, Â^W|_{H_χ} and Ã^W|_{U(H_χ)}.
///
/// The Moyal operator is applied as Ψ ↦ a ⋆ Ψ rather than through U, so the
/// three ladders come from three different discretizations.
pub fn spectrum_report(case: &str, a: &Symbol, chi: &ConfigState) -> Result<SpectrumReport> {
    let g = a.grid();
    g.p().ensure_same(chi.grid(), "spectrum report window")?;
    let t = WindowedIsometry::new(chi.clone())?;
    let small = quantize_config(a)?;
    let spec = eig(&small)?;
    let config = distinct(&spec.values);
    let discrete = config.len() <= COMPARED_LEVELS || is_confining(a);

    let basis = ritz_basis(g.x(), RITZ_SIZE, RITZ_SCALE);
    let phase_basis: Vec<PhaseState> = basis.iter().map(|b| t.apply(b)).collect::<Result<_>>()?;
    let big = quantize_phase(a)?;
    let phase = distinct(&ritz_values(&phase_basis, |s| big.apply_phase(s))?);

    let moyal_basis: Vec<PhaseState> = phase_basis.iter().map(moyal_map_u).collect::<Result<_>>()?;
    let star = star_operator(a);
    let moyal = distinct(&ritz_values(&moyal_basis, |s| star.apply_phase(s))?);

    let take = |v: &[f64]| v.iter().take(COMPARED_LEVELS).copied().collect::<Vec<_>>();
    let mut residuals = Vec::new();
    if discrete {
        for (lambda, v) in spec
            .values
            .iter()
            .zip(&spec.vectors)
            .take(COMPARED_LEVELS.min(config.len()))
        {
            let r = small.apply_config(v)?.distance(&v.scaled(C64::new(*lambda, 0.0)))?;
            let tv = t.apply(v)?;
            let rp = big.apply_phase(&tv)?.distance(&tv.scaled(C64::new(*lambda, 0.0)))?;
            residuals.push(r.max(rp));
            if let Ok(uv) = moyal_map_u(&tv) {
                residuals.push(star.apply_phase(&uv)?.distance(&uv.scaled(C64::new(*lambda, 0.0)))?);
            }
        }
    }
    let (c, p, m) = (take(&config), take(&phase), take(&moyal));
    let distances = if discrete {
        vec![hausdorff(&c, &p), hausdorff(&c, &m), hausdorff(&p, &m)]
    } else {
        Vec::new()
    };
    let quant = (!discrete).then(|| Ladders {
        config: quantiles(&spec.values),
        phase: quantiles(&phase),
        moyal: quantiles(&moyal),
    });
    Ok(SpectrumReport {
        case: case.to_string(),
        discrete,
        eigenvalues: Ladders {
            config: c,
            phase: p,
            moyal: m,
        },
        residuals,
        distances,
        quantiles: quant,
    })
}

/// Whether Re a grows towards the edge of the lattice in every direction.
fn is_confining(a: &Symbol) -> bool {
    let v = a.values();
    let n = v.nrows();
    let q = n / 4;
    let inner = (q..n - q)
        .flat_map(|i| (q..n - q).map(move |j| (i, j)))
        .map(|(i, j)| v[(i, j)].re)
        .fold(f64::NEG_INFINITY, f64::max);
    let frame = (0..n)
        .flat_map(|i| [(i, 0), (i, n - 1), (0, i), (n - 1, i)])
        .map(|(i, j)| v[(i, j)].re)
        .fold(f64::INFINITY, f64::min);
    frame > inner
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsReport {
    pub case: String,
    pub t: f64,
    /// Distances config–phase, config–moyal, phase–moyal after mapping back
    /// to configuration space.
    pub distances: Vec<f64>,
    /// |‖ψ(t)‖ − ‖ψ₀‖| in each representation.
    pub norm_drift: Vec<f64>,
}

/// Evolves ψ₀ by â^W, T_χψ₀ by Â^W and UT_χψ₀ by a ⋆ ·, and compares the
/// three results in configuration space.
pub fn compare_representations(
    case: &str,
    a: &Symbol,
    chi: &ConfigState,
    t: f64,
    psi0: &ConfigState,
) -> Result<DynamicsReport> {
    let w = WindowedIsometry::new(chi.clone())?;
    let small = quantize_config(a)?;
    let c = evolve(&small, psi0, t)?;

    let big = quantize_phase(a)?;
    let p0 = w.apply(psi0)?;
    let p = evolve(&big, &p0, t)?;
    let p_back = w.adjoint(&p)?;

    let m0 = moyal_map_u(&p0)?;
    let m = evolve(&star_operator(a), &m0, t)?;
    let m_back = w.adjoint(&moyal_map_u_inverse(&m)?)?;

    let n0 = psi0.norm();
    Ok(DynamicsReport {
        case: case.to_string(),
        t,
        distances: vec![c.distance(&p_back)?, c.distance(&m_back)?, p_back.distance(&m_back)?],
        norm_drift: vec![(c.norm() - n0).abs(), (p.norm() - n0).abs(), (m.norm() - n0).abs()],
    })
}

/// max |(a|Ob) − (Oa|b)| over the given probe pairs.
pub fn hermiticity_defect<S: StateVector>(op: &LinOp, probes: &[(S, S)]) -> Result<f64> {
    let exec = Execution::default();
    let mut worst: f64 = 0.0;
    for (a, b) in probes {
        let w = a.weight();
        let ob = S::apply_op(op, b, exec)?;
        let oa = S::apply_op(op, a, exec)?;
        worst = worst.max((dot(a.flat(), ob.flat(), w) - dot(oa.flat(), b.flat(), w)).norm());
    }
    Ok(worst)
}
