//! Low-level periodic Fourier helpers: cached FFT plans, band-limited
//! shifts and interpolation, spectral derivatives.
//!
//! Sample-index conventions: a length-N sequence is the lattice restriction
//! of a trigonometric polynomial with signed frequencies j in [-N/2, N/2).

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use rustfft::{Fft, FftPlanner};

use crate::exec::Execution;
use crate::C64;

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

fn cache() -> &'static Mutex<(FftPlanner<f64>, PlanCache)> {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, PlanCache)>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())))
}

/// Unnormalized FFT plan; `inverse` selects the e^{+2πi jk/N} kernel.
pub fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut guard = cache().lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((n, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

pub fn fft(buf: &mut [C64]) {
    plan(buf.len(), false).process(buf);
}

/// Unnormalized inverse FFT.
pub fn ifft(buf: &mut [C64]) {
    plan(buf.len(), true).process(buf);
}

/// Maps storage index k to its signed frequency in [-N/2, N/2).
#[inline]
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Inverse of [`signed_index`].
#[inline]
pub fn storage_index(j: i64, n: usize) -> usize {
    j.rem_euclid(n as i64) as usize
}

/// Band-limited shift: returns f(k + s) for k = 0..N, with f the periodic
/// trigonometric interpolant of `values`. Integer `s` reduces to a cyclic roll.
pub fn shift(values: &[C64], s: f64) -> Vec<C64> {
    let mut buf = values.to_vec();
    shift_in_place(&mut buf, s);
    buf
}

pub fn shift_in_place(buf: &mut [C64], s: f64) {
    let n = buf.len();
    fft(buf);
    let inv_n = 1.0 / n as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        let j = signed_index(k, n) as f64;
        *c *= C64::from_polar(inv_n, TAU * j * s / n as f64);
    }
    ifft(buf);
}

/// Values at the midpoints k + 1/2.
pub fn half_shift(values: &[C64]) -> Vec<C64> {
    shift(values, 0.5)
}

/// Spectral derivative of the given order for samples with lattice spacing
/// `spacing`. The Nyquist coefficient is dropped.
pub fn derivative(values: &[C64], spacing: f64, order: u32) -> Vec<C64> {
    let mut buf = values.to_vec();
    derivative_in_place(&mut buf, spacing, order);
    buf
}

pub fn derivative_in_place(buf: &mut [C64], spacing: f64, order: u32) {
    if order == 0 {
        return;
    }
    let n = buf.len();
    fft(buf);
    let dk = TAU / (n as f64 * spacing);
    let inv_n = 1.0 / n as f64;
    for (k, c) in buf.iter_mut().enumerate() {
        let j = signed_index(k, n);
        if j == -(n as i64) / 2 {
            *c = C64::new(0.0, 0.0);
            continue;
        }
        let ik = C64::new(0.0, j as f64 * dk);
        *c *= ik.powu(order) * inv_n;
    }
    ifft(buf);
}

/// Ratio of the largest Fourier coefficient in the outer half band
/// (|j| >= N/4) to the largest coefficient overall.
pub fn spectral_tail(values: &[C64]) -> f64 {
    let n = values.len();
    let mut buf = values.to_vec();
    fft(&mut buf);
    let mut inner: f64 = 0.0;
    let mut outer: f64 = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let j = signed_index(k, n).unsigned_abs() as usize;
        let a = c.norm();
        if 4 * j >= n {
            outer = outer.max(a);
        } else {
            inner = inner.max(a);
        }
    }
    let top = inner.max(outer);
    if top == 0.0 {
        0.0
    } else {
        outer / top
    }
}

/// Periodic sinc: the trigonometric interpolation weight of sample 0 at
/// fractional index `t` for even N.
pub fn dirichlet(t: f64, n: usize) -> f64 {
    let nf = n as f64;
    let den = (PI * t / nf).sin();
    if den.abs() < 1e-12 {
        (PI * t).cos()
    } else {
        (PI * t).sin() / (nf * den) * (PI * t / nf).cos()
    }
}

/// Matrix E with (E f)_r = f evaluated at fractional index `positions[r]`.
/// Positions outside the periodic cell [-1/2, N - 1/2) give zero rows, i.e.
/// the state is treated as vanishing off the lattice.
pub fn interpolation_matrix(n: usize, positions: &[f64]) -> DMatrix<C64> {
    let mut e = DMatrix::zeros(positions.len(), n);
    for (r, &t) in positions.iter().enumerate() {
        if !(-0.5..n as f64 - 0.5).contains(&t) {
            continue;
        }
        for k in 0..n {
            e[(r, k)] = C64::new(dirichlet(t - k as f64, n), 0.0);
        }
    }
    e
}

/// Applies `f(column_index, column)` to every column of `m` in place.
pub fn for_each_column<F>(m: &mut DMatrix<C64>, exec: Execution, f: F)
where
    F: Fn(usize, &mut [C64]) + Sync + Send,
{
    let rows = m.nrows();
    if rows == 0 {
        return;
    }
    exec.for_each_chunk(m.as_mut_slice(), rows, f);
}

/// Applies `f(row_index, row)` to every row of `m` (via a transpose).
pub fn for_each_row<F>(m: &mut DMatrix<C64>, exec: Execution, f: F)
where
    F: Fn(usize, &mut [C64]) + Sync + Send,
{
    let mut t = m.transpose();
    for_each_column(&mut t, exec, f);
    *m = t.transpose();
}

/// Band-limited shift along both axes of a sampled 2-D array.
pub fn shift_2d(m: &DMatrix<C64>, s_rows: f64, s_cols: f64, exec: Execution) -> DMatrix<C64> {
    let mut out = m.clone();
    if s_rows != 0.0 {
        for_each_column(&mut out, exec, |_, c| shift_in_place(c, s_rows));
    }
    if s_cols != 0.0 {
        for_each_row(&mut out, exec, |_, r| shift_in_place(r, s_cols));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn integer_shift_is_roll() {
        let v: Vec<C64> = (0..16).map(|k| C64::new(k as f64, -(k as f64) * 0.5)).collect();
        let s = shift(&v, 3.0);
        for k in 0..16 {
            assert!((s[k] - v[(k + 3) % 16]).norm() < 1e-12);
        }
    }

    #[test]
    fn half_shift_of_pure_tone() {
        let n = 32;
        let w = TAU * 3.0 / n as f64;
        let v: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, w * k as f64)).collect();
        let h = half_shift(&v);
        for (k, hk) in h.iter().enumerate() {
            let want = C64::from_polar(1.0, w * (k as f64 + 0.5));
            assert!((hk - want).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_tone() {
        let n = 64;
        let dx = 0.1;
        let kk = TAU * 5.0 / (n as f64 * dx);
        let v: Vec<C64> = (0..n).map(|k| C64::from_polar(1.0, kk * k as f64 * dx)).collect();
        let d = derivative(&v, dx, 1);
        for k in 0..n {
            assert!((d[k] - C64::new(0.0, kk) * v[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn dirichlet_is_cardinal() {
        for k in -20i64..20 {
            let want = if k.rem_euclid(16) == 0 { 1.0 } else { 0.0 };
            assert!((dirichlet(k as f64, 16) - want).abs() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn interpolation_matrix_matches_shift() {
        let n = 64;
        let v: Vec<C64> = (0..n).map(|k| c((-(k as f64 - 32.0).powi(2) / 32.0).exp())).collect();
        let pos: Vec<f64> = (0..n).map(|k| k as f64 + 0.5).collect();
        let e = interpolation_matrix(n, &pos);
        let out = &e * nalgebra::DVector::from_vec(v.clone());
        let h = half_shift(&v);
        for k in 0..n - 1 {
            assert!((out[k] - h[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn tail_detects_ramp() {
        let smooth: Vec<C64> = (0..128).map(|k| c((-(k as f64 - 64.0).powi(2) / 40.0).exp())).collect();
        let ramp: Vec<C64> = (0..64).map(|k| c(k as f64)).collect();
        assert!(spectral_tail(&smooth) < 1e-9);
        assert!(spectral_tail(&ramp) > 1e-3);
    }
}
