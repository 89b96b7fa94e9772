//! The Moyal representation: the unitaries U_D, U_R and U, cross-Wigner
//! functions, Bopp operators, Moyal–Weyl operators and the star action.
//!
//! U is evaluated by its closed form
//!     UΨ = F_p⁻¹[Ψ̂(x − ξ_p/2, x + ξ_p/2)],
//! where Ψ̂ is the partial Fourier transform in p. On a dual pair with a
//! centered x axis the ξ_p lattice is the x lattice, so the shear lands on
//! lattice points for even ξ_p indices and on half-shifted points otherwise.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fourier;
use crate::grid::{inverse_partial_ft_p_with, partial_ft_p_with, Grid1D, PhaseGrid};
use crate::linop::{Affine, LinOp, OpKind, Representation};
use crate::states::{ConfigState, PhaseState};
use crate::weyl::{apply_diff_terms, config_matrix_with, refine_rows, twisted_product, Polynomial, Symbol};
use crate::C64;

/// Largest relative weight a resampled state may lose off the lattice or
/// above the representable band.
pub const RESAMPLE_TOL: f64 = 1e-8;

/// Fraction of the lattice (and of the band) treated as safely interior.
const EDGE: f64 = 0.95;

/// √(lost/total) of the weight of `m` outside `keep`, evaluated at
/// normalized centered indices u, v ∈ [−1, 1).
fn lost_fraction(m: &DMatrix<C64>, keep: impl Fn(f64, f64) -> bool) -> f64 {
    let (r, c) = m.shape();
    let (hr, hc) = ((r / 2) as f64, (c / 2) as f64);
    let mut total = 0.0;
    let mut lost = 0.0;
    for j in 0..c {
        let v = (j as f64 - hc) / hc;
        for i in 0..r {
            let w = m[(i, j)].norm_sqr();
            total += w;
            if !keep((i as f64 - hr) / hr, v) {
                lost += w;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (lost / total).sqrt()
    }
}

/// As [`lost_fraction`] for the 2-D discrete spectrum, with u, v the signed
/// frequencies relative to Nyquist.
fn band_lost_fraction(m: &DMatrix<C64>, keep: impl Fn(f64, f64) -> bool, exec: Execution) -> f64 {
    let mut s = m.clone();
    fourier::for_each_column(&mut s, exec, |_, col| fourier::fft(col));
    fourier::for_each_row(&mut s, exec, |_, row| fourier::fft(row));
    let (r, c) = s.shape();
    let mut total = 0.0;
    let mut lost = 0.0;
    for j in 0..c {
        let v = fourier::signed_index(j, c) as f64 / (c / 2) as f64;
        for i in 0..r {
            let w = s[(i, j)].norm_sqr();
            total += w;
            if !keep(fourier::signed_index(i, r) as f64 / (r / 2) as f64, v) {
                lost += w;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (lost / total).sqrt()
    }
}

fn guard(what: &'static str, residual: f64) -> Result<()> {
    if residual > RESAMPLE_TOL {
        Err(Error::NotBandLimited {
            what,
            residual,
            tolerance: RESAMPLE_TOL,
        })
    } else {
        Ok(())
    }
}

pub fn moyal_map_u(psi: &PhaseState) -> Result<PhaseState> {
    moyal_map_u_with(psi, Execution::default())
}

/// UΨ by the closed-form shear.
pub fn moyal_map_u_with(psi: &PhaseState, exec: Execution) -> Result<PhaseState> {
    psi.grid().ensure_moyal("Moyal map")?;
    let hat = partial_ft_p_with(psi, exec);
    let f = hat.values();
    // Output (I, J) reads (A, B) = (I − J/2, I + J/2).
    guard(
        "Moyal map resampling",
        lost_fraction(f, |u, v| (u + v).abs() < 2.0 * EDGE && (v - u).abs() < EDGE),
    )?;
    guard(
        "Moyal map band",
        band_lost_fraction(f, |u, v| (u + v).abs() < EDGE && (v - u).abs() < 2.0 * EDGE, exec),
    )?;
    let fh = fourier::shift_2d(f, 0.5, 0.5, exec);
    let n = f.nrows();
    let c = (n / 2) as i64;
    let nn = n as i64;
    let at = |m: &DMatrix<C64>, a: i64, b: i64| {
        if (0..nn).contains(&a) && (0..nn).contains(&b) {
            m[(a as usize, b as usize)]
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let out = DMatrix::from_fn(n, n, |i, j| {
        let ii = i as i64 - c;
        let jj = j as i64 - c;
        if jj.rem_euclid(2) == 0 {
            at(f, ii - jj / 2 + c, ii + jj / 2 + c)
        } else {
            at(&fh, ii - (jj + 1) / 2 + c, ii + (jj - 1) / 2 + c)
        }
    });
    Ok(inverse_partial_ft_p_with(&hat.with_values(out), exec))
}

pub fn moyal_map_u_inverse(psi: &PhaseState) -> Result<PhaseState> {
    moyal_map_u_inverse_with(psi, Execution::default())
}

/// U⁻¹Φ: Ψ̂(A, B) = Φ̂((A + B)/2, B − A).
pub fn moyal_map_u_inverse_with(phi: &PhaseState, exec: Execution) -> Result<PhaseState> {
    phi.grid().ensure_moyal("inverse Moyal map")?;
    let hat = partial_ft_p_with(phi, exec);
    let f = hat.values();
    guard(
        "inverse Moyal map resampling",
        lost_fraction(f, |u, v| (u - v / 2.0).abs() < EDGE && (u + v / 2.0).abs() < EDGE),
    )?;
    guard(
        "inverse Moyal map band",
        band_lost_fraction(f, |u, v| (u / 2.0 - v).abs() < EDGE && (u / 2.0 + v).abs() < EDGE, exec),
    )?;
    let fh = fourier::shift_2d(f, 0.5, 0.0, exec);
    let n = f.nrows();
    let c = (n / 2) as i64;
    let nn = n as i64;
    let out = DMatrix::from_fn(n, n, |a, b| {
        let aa = a as i64 - c;
        let bb = b as i64 - c;
        let s = aa + bb;
        let j = bb - aa + c;
        if !(0..nn).contains(&j) {
            return C64::new(0.0, 0.0);
        }
        let (src, i) = if s.rem_euclid(2) == 0 {
            (f, s / 2 + c)
        } else {
            (&fh, (s - 1) / 2 + c)
        };
        if (0..nn).contains(&i) {
            src[(i as usize, j as usize)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(inverse_partial_ft_p_with(&hat.with_values(out), exec))
}

/// U_D(s)Ψ(x, p) = e^{−s} Ψ(e^{−s}x, e^{−s}p), by trigonometric interpolation.
pub fn dilation_u_d(s: f64, psi: &PhaseState) -> Result<PhaseState> {
    if s == 0.0 {
        return Ok(psi.clone());
    }
    let exec = Execution::default();
    let lambda = (-s).exp();
    let v = psi.values();
    let space = EDGE * lambda.min(1.0);
    let band = EDGE * (1.0 / lambda).min(1.0);
    guard(
        "dilation resampling",
        lost_fraction(v, |a, b| a.abs() < space && b.abs() < space),
    )?;
    guard(
        "dilation band",
        band_lost_fraction(v, |a, b| a.abs() < band && b.abs() < band, exec),
    )?;
    let g = psi.grid();
    let ex = dilation_matrix(g.x(), lambda);
    let ep = dilation_matrix(g.p(), lambda);
    let out = ex * v * ep.transpose() * C64::new(lambda, 0.0);
    Ok(psi.with_values(out))
}

fn dilation_matrix(axis: &Grid1D, lambda: f64) -> DMatrix<C64> {
    let pos: Vec<f64> = axis.points().iter().map(|&y| axis.index_of(lambda * y)).collect();
    fourier::interpolation_matrix(axis.n_points(), &pos)
}

/// U_R(θ)Ψ = F_p⁻¹[Ψ̂(x cos θ + ξ_p sin θ, ξ_p cos θ − x sin θ)].
///
/// Quarter turns are exact index permutations; the remainder, |θ| ≤ π/4,
/// is applied as three Fourier shears.
pub fn rotation_u_r(theta: f64, psi: &PhaseState) -> Result<PhaseState> {
    let exec = Execution::default();
    psi.grid().ensure_moyal("phase-space rotation")?;
    let quarters = (theta / FRAC_PI_2).round();
    let rest = theta - quarters * FRAC_PI_2;
    let hat = partial_ft_p_with(psi, exec);
    let mut f = hat.values().clone();
    let n = f.nrows();
    let c = n / 2;

    for _ in 0..(quarters as i64).rem_euclid(4) {
        // new(I, J) = old(J, −I)
        let old = f.clone();
        f = DMatrix::from_fn(n, n, |i, j| {
            let src = 2 * c as i64 - i as i64;
            if src < n as i64 {
                old[(j, src as usize)]
            } else {
                C64::new(0.0, 0.0)
            }
        });
    }

    if rest != 0.0 {
        let r = 0.67;
        guard("rotation resampling", lost_fraction(&f, |u, v| u * u + v * v < r * r))?;
        guard(
            "rotation band",
            band_lost_fraction(&f, |u, v| u * u + v * v < r * r, exec),
        )?;
        // [[c, s], [−s, c]] = Sx(t)·Sy(−sin θ)·Sx(t), t = tan(θ/2); each step
        // replaces F(v) by F(S v).
        let t = (rest / 2.0).tan();
        let sn = rest.sin();
        let offset = |k: usize| k as f64 - c as f64;
        let shear_x = |m: &mut DMatrix<C64>, alpha: f64| {
            fourier::for_each_column(m, exec, |j, col| fourier::shift_in_place(col, alpha * offset(j)));
        };
        shear_x(&mut f, t);
        fourier::for_each_row(&mut f, exec, |i, row| fourier::shift_in_place(row, -sn * offset(i)));
        shear_x(&mut f, t);
    }
    Ok(inverse_partial_ft_p_with(&hat.with_values(f), exec))
}

/// W(ψ, φ)(x, p) = (2π)⁻¹ ∫ e^{ipη} ψ(x − η/2) φ*(x + η/2) dη on the phase
/// lattice whose p axis is dual to the x axis of the states.
pub fn cross_wigner(psi: &ConfigState, phi: &ConfigState) -> Result<PhaseState> {
    cross_wigner_with(psi, phi, Execution::default())
}

pub fn cross_wigner_with(psi: &ConfigState, phi: &ConfigState, exec: Execution) -> Result<PhaseState> {
    let g = *psi.grid();
    g.ensure_same(phi.grid(), "cross-Wigner transform")?;
    let grid = PhaseGrid::from_x(g);
    let n = g.n_points();
    let nn = n as i64;
    let a: Vec<C64> = psi.values().iter().copied().collect();
    let b: Vec<C64> = phi.values().iter().map(|c| c.conj()).collect();
    let ah = fourier::half_shift(&a);
    let bh = fourier::half_shift(&b);
    let get = |v: &[C64], k: i64| {
        if (0..nn).contains(&k) {
            v[k as usize]
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let dx = g.spacing();
    let p0 = grid.p().start();
    let scale = dx / TAU;
    let tw: Vec<C64> = (0..n)
        .map(|s| C64::from_polar(scale, p0 * fourier::signed_index(s, n) as f64 * dx))
        .collect();
    let rows: Vec<Vec<C64>> = exec.map(n, |i| {
        let i = i as i64;
        let mut buf: Vec<C64> = (0..n)
            .map(|s| {
                let j = fourier::signed_index(s, n);
                let v = if j.rem_euclid(2) == 0 {
                    get(&a, i - j / 2) * get(&b, i + j / 2)
                } else {
                    get(&ah, i - (j + 1) / 2) * get(&bh, i + (j - 1) / 2)
                };
                v * tw[s]
            })
            .collect();
        fourier::ifft(&mut buf);
        buf
    });
    PhaseState::new(grid, DMatrix::from_fn(n, n, |i, m| rows[i][m]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bopp {
    /// X̃ = x + (i/2)∂_p
    X,
    /// P̃ = p + (i/2)∂_x
    P,
    /// Ξ̃_x = p − (i/2)∂_x
    XiX,
    /// Ξ̃_p = x − (i/2)∂_p
    XiP,
}

impl Bopp {
    pub fn affine(self) -> Affine {
        let one = C64::new(1.0, 0.0);
        let half_i = C64::new(0.0, 0.5);
        match self {
            Bopp::X => Affine {
                x: one,
                d_p: half_i,
                ..Affine::ZERO
            },
            Bopp::P => Affine {
                p: one,
                d_x: half_i,
                ..Affine::ZERO
            },
            Bopp::XiX => Affine {
                p: one,
                d_x: -half_i,
                ..Affine::ZERO
            },
            Bopp::XiP => Affine {
                x: one,
                d_p: -half_i,
                ..Affine::ZERO
            },
        }
    }
}

pub fn bopp_operator(which: Bopp, grid: &PhaseGrid) -> LinOp {
    LinOp::structured(Representation::Moyal, *grid, OpKind::Affine(which.affine()))
}

pub(crate) fn affine_apply(aff: &Affine, psi: &PhaseState, exec: Execution) -> PhaseState {
    let g = psi.grid();
    let v = psi.values();
    let zero = C64::new(0.0, 0.0);
    let mut out = v * aff.constant;
    if aff.x != zero || aff.p != zero {
        let xs = g.x().points();
        let ps = g.p().points();
        for (j, &p) in ps.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                out[(i, j)] += (aff.x * x + aff.p * p) * v[(i, j)];
            }
        }
    }
    if aff.d_x != zero {
        let mut d = v.clone();
        let dx = g.x().spacing();
        fourier::for_each_column(&mut d, exec, |_, c| fourier::derivative_in_place(c, dx, 1));
        out += d * aff.d_x;
    }
    if aff.d_p != zero {
        let mut d = v.clone();
        let dp = g.p().spacing();
        fourier::for_each_row(&mut d, exec, |_, r| fourier::derivative_in_place(r, dp, 1));
        out += d * aff.d_p;
    }
    psi.with_values(out)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

/// a(X̃, Ξ̃_x) in Weyl order: x^α ξ^β ↦ 2^{−α} Σ_k C(α,k) X̃^k Ξ̃_x^β X̃^{α−k}.
pub(crate) fn bopp_apply(poly: &Polynomial, psi: &PhaseState, exec: Execution) -> Result<PhaseState> {
    let xt = Bopp::X.affine();
    let xi = Bopp::XiX.affine();
    let power = |aff: &Affine, s: PhaseState, k: u32| (0..k).fold(s, |s, _| affine_apply(aff, &s, exec));
    let mut out = DMatrix::zeros(psi.values().nrows(), psi.values().ncols());
    for (alpha, beta, c) in poly.terms() {
        let norm = 0.5f64.powi(alpha as i32);
        for k in 0..=alpha {
            let s = power(&xt, psi.clone(), alpha - k);
            let s = power(&xi, s, beta);
            let s = power(&xt, s, k);
            out += s.values() * (c * binomial(alpha, k) * norm);
        }
    }
    Ok(psi.with_values(out))
}

/// T̃_M(z₀)Ψ(x, p) = e^{−i(x₀p − ξ₀x)} Ψ(x − x₀/2, p − ξ₀/2).
pub fn moyal_heisenberg_weyl(z0: (f64, f64), psi: &PhaseState) -> PhaseState {
    let (x0, xi0) = z0;
    let g = psi.grid();
    let exec = Execution::default();
    let shifted = fourier::shift_2d(
        psi.values(),
        -x0 / (2.0 * g.x().spacing()),
        -xi0 / (2.0 * g.p().spacing()),
        exec,
    );
    let xs = g.x().points();
    let ps = g.p().points();
    let out = DMatrix::from_fn(xs.len(), ps.len(), |i, j| {
        shifted[(i, j)] * C64::from_polar(1.0, -(x0 * ps[j] - xi0 * xs[i]))
    });
    psi.with_values(out)
}

/// Ã^W = U (â^W ⊗ 1) U⁻¹.
pub fn quantize_moyal(a: &Symbol) -> Result<LinOp> {
    let g = a.grid();
    g.ensure_moyal("Moyal quantization")?;
    let m = config_matrix_with(a, Execution::default());
    Ok(LinOp::structured(Representation::Moyal, *g, OpKind::MoyalConjugate(m)).with_note("U-conjugated weyl operator"))
}

/// Ã^W as the Bopp substitution a(X̃, Ξ̃_x); polynomial symbols only.
pub fn quantize_moyal_bopp(a: &Symbol) -> Result<LinOp> {
    let poly = a
        .polynomial()
        .ok_or_else(|| Error::Unsupported("Bopp substitution of a non-polynomial symbol".into()))?;
    Ok(LinOp::structured(Representation::Moyal, *a.grid(), OpKind::Bopp(poly.clone())).with_note("bopp substitution"))
}

/// Ψ ↦ a ⋆ Ψ as an operator.
pub fn star_operator(a: &Symbol) -> LinOp {
    LinOp::structured(Representation::Moyal, *a.grid(), OpKind::Star(a.clone())).with_note("star product")
}

pub fn star_apply(a: &Symbol, psi: &PhaseState) -> Result<PhaseState> {
    star_apply_with(a, psi, Execution::default())
}

/// a ⋆ Ψ: an exact differential operator for polynomial symbols, the
/// twisted spectral product otherwise.
pub fn star_apply_with(a: &Symbol, psi: &PhaseState, exec: Execution) -> Result<PhaseState> {
    let g = a.grid();
    g.ensure_same(psi.grid(), "star product")?;
    g.ensure_dual_pair("star product")?;
    match a.polynomial() {
        Some(poly) => {
            let xs = g.x().points();
            let v = apply_diff_terms(&poly.left_star_terms(), psi.values(), &xs, g.x().spacing(), g.p(), exec);
            Ok(psi.with_values(v))
        }
        None => {
            let b = refine_rows(psi.values(), exec);
            let v = twisted_product(a.refined(), &b, g, false, exec)?;
            Ok(psi.with_values(v))
        }
    }
}

/// |||a ⋆ Ψ − λΨ|||.
pub fn stargen_residual(a: &Symbol, lambda: f64, psi: &PhaseState) -> Result<f64> {
    let s = star_apply(a, psi)?;
    let d = s.values() - psi.values() * C64::new(lambda, 0.0);
    Ok(d.norm() * psi.grid().cell().sqrt())
}

/// Applies the Weyl quantization on L²(ℝ²) of a four-variable symbol
/// A(x, p, ξ_x, ξ_p) directly from its kernel. Cost O(N⁴); meant for coarse
/// lattices only.
pub fn double_phase_weyl_apply<F>(symbol: F, psi: &PhaseState) -> Result<PhaseState>
where
    F: Fn(f64, f64, f64, f64) -> C64 + Sync + Send,
{
    let g = *psi.grid();
    g.ensure_dual_pair("double phase-space quantization")?;
    let n = g.n_points();
    let (x, p) = (*g.x(), *g.p());
    let (dx, dp) = (x.spacing(), p.spacing());
    let xi_x = p.points();
    let xi_p = x.points();
    let (xi_x0, xi_p0) = (p.start(), x.start());
    let inv = 1.0 / (n * n) as f64;
    let v = psi.values();

    let partials: Vec<DMatrix<C64>> = Execution::default().map(2 * n - 1, |rx| {
        let xm = x.start() + rx as f64 * dx / 2.0;
        let mut acc = DMatrix::<C64>::zeros(n, n);
        let i_lo = rx.saturating_sub(n - 1);
        let i_hi = rx.min(n - 1);
        for rp in 0..2 * n - 1 {
            let pm = p.start() + rp as f64 * dp / 2.0;
            let mut gm = DMatrix::from_fn(n, n, |m1, m2| symbol(xm, pm, xi_x[m1], xi_p[m2]));
            fourier::for_each_column(&mut gm, Execution::Sequential, |_, c| fourier::ifft(c));
            fourier::for_each_row(&mut gm, Execution::Sequential, |_, r| fourier::ifft(r));
            let n_lo = rp.saturating_sub(n - 1);
            let n_hi = rp.min(n - 1);
            for i in i_lo..=i_hi {
                let k = rx - i;
                let d1 = i as i64 - k as i64;
                let ph1 = C64::from_polar(inv, xi_x0 * d1 as f64 * dx);
                let s1 = fourier::storage_index(d1, n);
                for nn in n_lo..=n_hi {
                    let l = rp - nn;
                    let d2 = nn as i64 - l as i64;
                    let ph2 = C64::from_polar(1.0, xi_p0 * d2 as f64 * dp);
                    acc[(i, nn)] += ph1 * ph2 * gm[(s1, fourier::storage_index(d2, n))] * v[(k, l)];
                }
            }
        }
        acc
    });
    let out = partials.into_iter().fold(DMatrix::zeros(n, n), |a, b| a + b);
    PhaseState::new(g, out)
}

/// A 4×4 real matrix acting on (x, p, ξ_x, ξ_p).
pub type Symplectic4 = [[f64; 4]; 4];

/// S(x, p, ξ_x, ξ_p) = (x − ξ_p/2, p − ξ_x/2, ξ_x/2 + p, ξ_p/2 + x); the
/// lifted symbol of the Moyal representation is A ∘ S with A(z) = a(x, ξ_x).
pub fn moyal_symplectic_map() -> Symplectic4 {
    [
        [1.0, 0.0, 0.0, -0.5],
        [0.0, 1.0, -0.5, 0.0],
        [0.0, 1.0, 0.5, 0.0],
        [1.0, 0.0, 0.0, 0.5],
    ]
}

/// A_M(x, p, ξ_x, ξ_p) = a(x − ξ_p/2, p + ξ_x/2).
pub fn moyal_lift<F>(a: F) -> impl Fn(f64, f64, f64, f64) -> C64 + Sync + Send
where
    F: Fn(f64, f64) -> C64 + Sync + Send,
{
    move |x, p, xi_x, xi_p| a(x - xi_p / 2.0, p + xi_x / 2.0)
}

/// SᵀJS = J for the standard J on (x, p | ξ_x, ξ_p).
pub fn is_symplectic(s: &Symplectic4, tol: f64) -> bool {
    let j = |r: usize, c: usize| -> f64 {
        match (r, c) {
            (0, 2) | (1, 3) => 1.0,
            (2, 0) | (3, 1) => -1.0,
            _ => 0.0,
        }
    };
    (0..4).all(|r| {
        (0..4).all(|c| {
            let v: f64 = (0..4)
                .flat_map(|a| (0..4).map(move |b| (a, b)))
                .map(|(a, b)| s[a][r] * j(a, b) * s[b][c])
                .sum();
            (v - j(r, c)).abs() <= tol
        })
    })
}
