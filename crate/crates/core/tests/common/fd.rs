//! Finite-difference oracle for −½ψ″ + V(x)ψ on [−L, L] with Dirichlet
//! ends: Sturm-sequence bisection on the tridiagonal matrix, followed by
//! two Richardson extrapolation steps in h².

fn count_below(diag: &[f64], off: f64, lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (k, &d) in diag.iter().enumerate() {
        let prev = if k == 0 { 0.0 } else { off * off / q };
        q = d - lambda - prev;
        if q == 0.0 {
            q = 1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn kth_eigenvalue(diag: &[f64], off: f64, k: usize, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn levels(v: &dyn Fn(f64) -> f64, half: f64, intervals: usize, count: usize) -> Vec<f64> {
    let h = 2.0 * half / intervals as f64;
    let diag: Vec<f64> = (1..intervals)
        .map(|k| 1.0 / (h * h) + v(-half + k as f64 * h))
        .collect();
    let off = -0.5 / (h * h);
    let hi = diag.iter().cloned().fold(f64::MIN, f64::max) + 2.0 / (h * h);
    (0..count).map(|k| kth_eigenvalue(&diag, off, k, -1e3, hi)).collect()
}

/// Lowest `count` eigenvalues, extrapolated from meshes h, h/2, h/4.
pub fn fd_levels(v: &dyn Fn(f64) -> f64, half: f64, count: usize) -> Vec<f64> {
    let base = 2000;
    let e1 = levels(v, half, base, count);
    let e2 = levels(v, half, 2 * base, count);
    let e4 = levels(v, half, 4 * base, count);
    (0..count)
        .map(|k| {
            let r1 = (4.0 * e2[k] - e1[k]) / 3.0;
            let r2 = (4.0 * e4[k] - e2[k]) / 3.0;
            (16.0 * r2 - r1) / 15.0
        })
        .collect()
}
