//! The Moyal product evaluated spectrally.
//!
//! Writing both factors as Fourier series in the second variable,
//! f(x, p) = Σ_k f̌(x, k) e^{ikp}, the twisted product becomes
//!     (a ⋆ b)(x, p) = Σ_{q,k} e^{i(q+k)p} ǎ(x − q/2, k) b̌(x + k/2, q),
//! with q, k on the lattice dual to p. Because that dual lattice is the x
//! lattice, the shifted arguments x ∓ q/2 are rows of the x-refined arrays.
//! Factors are taken to vanish off the x lattice.
//!
//! A polynomial factor turns the product into a finite differential
//! operator (see [`crate::weyl::Polynomial::left_star_terms`]); that route is exact and is
//! preferred whenever it applies.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fourier;
use crate::grid::{Grid1D, PhaseGrid};
use crate::weyl::poly::DiffTerm;
use crate::weyl::symbol::{Symbol, BAND_LIMIT_TOL};
use crate::C64;

/// Largest relative weight a product may carry outside the representable
/// p band before it is rejected as aliased.
pub const ALIAS_TOL: f64 = 1e-8;

/// Fourier-series coefficients in p of every row; `coeff[r][s]` belongs to
/// the signed frequency `signed_index(s)` in units of the x spacing.
fn p_series(f: &DMatrix<C64>, p_axis: &Grid1D, exec: Execution) -> Vec<Vec<C64>> {
    let n = p_axis.n_points();
    let dk = p_axis.dual_spacing();
    let p0 = p_axis.start();
    let inv_n = 1.0 / n as f64;
    let tw: Vec<C64> = (0..n)
        .map(|s| C64::from_polar(inv_n, -(fourier::signed_index(s, n) as f64) * dk * p0))
        .collect();
    exec.map(f.nrows(), |r| {
        let mut buf: Vec<C64> = f.row(r).iter().copied().collect();
        fourier::fft(&mut buf);
        buf.iter_mut().zip(&tw).for_each(|(v, w)| *v *= w);
        buf
    })
}

fn p_tail(f: &DMatrix<C64>, exec: Execution) -> f64 {
    let global = f.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if global == 0.0 {
        return 0.0;
    }
    exec.map(f.nrows(), |r| {
        let row: Vec<C64> = f.row(r).iter().copied().collect();
        let top = row.iter().map(|c| c.norm()).fold(0.0, f64::max);
        fourier::spectral_tail(&row) * top / global
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Values of `f` (N×N lattice samples) on the x-refined lattice, by a
/// Fourier half-shift of every column.
pub(crate) fn refine_rows(f: &DMatrix<C64>, exec: Execution) -> DMatrix<C64> {
    let n = f.nrows();
    let half = fourier::shift_2d(f, 0.5, 0.0, exec);
    DMatrix::from_fn(2 * n, f.ncols(), |r, m| {
        if r % 2 == 0 {
            f[(r / 2, m)]
        } else {
            half[(r / 2, m)]
        }
    })
}

/// Twisted product of two x-refined arrays (2N×N). Returns the product on
/// the refined rows when `refined_output`, otherwise on the lattice rows.
pub(crate) fn twisted_product(
    a: &DMatrix<C64>,
    b: &DMatrix<C64>,
    grid: &PhaseGrid,
    refined_output: bool,
    exec: Execution,
) -> Result<DMatrix<C64>> {
    grid.ensure_dual_pair("Moyal product")?;
    let n = grid.n_points();
    for (f, what) in [(a, "left factor"), (b, "right factor")] {
        let tail = p_tail(f, exec);
        if tail > BAND_LIMIT_TOL {
            log::debug!("{what} fails the p band-limit test ({tail:.3e})");
            return Err(Error::NotBandLimited {
                what: "Moyal product factor",
                residual: tail,
                tolerance: BAND_LIMIT_TOL,
            });
        }
    }
    let aa = p_series(a, grid.p(), exec);
    let bb = p_series(b, grid.p(), exec);
    // Column view of b̌: bt[s][r] = b̌(row r, frequency s).
    let bt: Vec<Vec<C64>> = (0..n).map(|s| bb.iter().map(|row| row[s]).collect()).collect();

    let rows_out = if refined_output { 2 * n } else { n };
    let step = if refined_output { 1 } else { 2 };
    let half = (n / 2) as i64;
    let two_n = 2 * n as i64;
    let zero = C64::new(0.0, 0.0);

    let per_row: Vec<(Vec<C64>, f64, f64)> = exec.map(rows_out, |row| {
        let r = (row * step) as i64;
        // acc[m + N] for output frequency m in [-N, N).
        let mut acc = vec![zero; 2 * n];
        for q in -half..half {
            let ra = r - q;
            if !(0..two_n).contains(&ra) {
                continue;
            }
            let arow = &aa[ra as usize];
            let bcol = &bt[fourier::storage_index(q, n)];
            let lo = (-half).max(-r);
            let hi = half.min(two_n - r);
            for k in lo..hi {
                let av = arow[fourier::storage_index(k, n)];
                let bv = bcol[(r + k) as usize];
                acc[(q + k + n as i64) as usize] += av * bv;
            }
        }
        let mut kept = vec![zero; n];
        let mut inside = 0.0;
        let mut outside = 0.0;
        for (idx, v) in acc.iter().enumerate() {
            let m = idx as i64 - n as i64;
            if (-half..half).contains(&m) {
                kept[fourier::storage_index(m, n)] = *v;
                inside += v.norm_sqr();
            } else {
                outside += v.norm_sqr();
            }
        }
        (kept, inside, outside)
    });

    let inside: f64 = per_row.iter().map(|t| t.1).sum();
    let outside: f64 = per_row.iter().map(|t| t.2).sum();
    let aliased = if inside + outside > 0.0 {
        (outside / (inside + outside)).sqrt()
    } else {
        0.0
    };
    if aliased > ALIAS_TOL {
        return Err(Error::NotBandLimited {
            what: "Moyal product output band",
            residual: aliased,
            tolerance: ALIAS_TOL,
        });
    }

    let dk = grid.p().dual_spacing();
    let p0 = grid.p().start();
    let tw: Vec<C64> = (0..n)
        .map(|s| C64::from_polar(1.0, fourier::signed_index(s, n) as f64 * dk * p0))
        .collect();
    let out_rows: Vec<Vec<C64>> = exec.map(rows_out, |row| {
        let mut buf: Vec<C64> = per_row[row].0.iter().zip(&tw).map(|(v, w)| v * w).collect();
        fourier::ifft(&mut buf);
        buf
    });
    Ok(DMatrix::from_fn(rows_out, n, |r, m| out_rows[r][m]))
}

/// Applies Σ c · x^α ξ^β ∂_x^i ∂_ξ^j to samples `f` whose rows sit at `xs`
/// (uniform with spacing `dx`) and whose columns sit on `p_axis`.
pub(crate) fn apply_diff_terms(
    terms: &[DiffTerm],
    f: &DMatrix<C64>,
    xs: &[f64],
    dx: f64,
    p_axis: &Grid1D,
    exec: Execution,
) -> DMatrix<C64> {
    let ps = p_axis.points();
    let mut out = DMatrix::zeros(f.nrows(), f.ncols());
    let mut orders: Vec<(u32, u32)> = terms.iter().map(|t| (t.d_x, t.d_xi)).collect();
    orders.sort_unstable();
    orders.dedup();
    for (d_x, d_xi) in orders {
        let mut field = f.clone();
        if d_x > 0 {
            fourier::for_each_column(&mut field, exec, |_, c| fourier::derivative_in_place(c, dx, d_x));
        }
        if d_xi > 0 {
            let dp = p_axis.spacing();
            fourier::for_each_row(&mut field, exec, |_, r| fourier::derivative_in_place(r, dp, d_xi));
        }
        for t in terms.iter().filter(|t| t.d_x == d_x && t.d_xi == d_xi) {
            for (m, &p) in ps.iter().enumerate() {
                let pm = p.powi(t.xi_pow as i32);
                for (i, &x) in xs.iter().enumerate() {
                    out[(i, m)] += t.coeff * x.powi(t.x_pow as i32) * pm * field[(i, m)];
                }
            }
        }
    }
    out
}

/// c = a ⋆ b.
pub fn moyal_product(a: &Symbol, b: &Symbol) -> Result<Symbol> {
    moyal_product_with(a, b, Execution::default())
}

pub fn moyal_product_with(a: &Symbol, b: &Symbol, exec: Execution) -> Result<Symbol> {
    let grid = *a.grid();
    grid.ensure_same(b.grid(), "Moyal product")?;
    let n = grid.n_points();
    let x = grid.x();
    let xs: Vec<f64> = (0..2 * n).map(|r| x.start() + r as f64 * x.spacing() / 2.0).collect();
    let h = x.spacing() / 2.0;
    match (a.polynomial(), b.polynomial()) {
        (Some(pa), Some(pb)) => Symbol::from_polynomial(&grid, pa.star(pb)),
        (Some(pa), None) => {
            let v = apply_diff_terms(&pa.left_star_terms(), b.refined(), &xs, h, grid.p(), exec);
            Ok(Symbol::from_refined(&grid, v, None))
        }
        (None, Some(pb)) => {
            let v = apply_diff_terms(&pb.right_star_terms(), a.refined(), &xs, h, grid.p(), exec);
            Ok(Symbol::from_refined(&grid, v, None))
        }
        (None, None) => {
            let v = twisted_product(a.refined(), b.refined(), &grid, true, exec)?;
            Ok(Symbol::from_refined(&grid, v, None))
        }
    }
}

/// Convenience: the polynomial-free copy of a symbol, forcing the sampled
/// code paths.
pub fn sampled_only(a: &Symbol) -> Symbol {
    Symbol::from_refined(a.grid(), a.refined().clone(), None)
}
