mod common;

use common::*;
use nalgebra::DMatrix;
use phasespace::phase_weyl::{ps_heisenberg_weyl, quantize_phase, verify_intertwining};
use phasespace::states::{gaussian_state, random_config_state, random_phase_state};
use phasespace::tchi::WindowedIsometry;
use phasespace::weyl::{heisenberg_weyl, quantize_config, NamedSymbol, Symbol};
use phasespace::C64;

#[test]
fn displacement_acts_on_x_only() {
    let g = grid();
    let t = WindowedIsometry::hermite(g.p(), 1).unwrap();
    let psi = random_config_state(g.x(), &mut rng(1), 8);
    let big = t.apply(&psi).unwrap();
    assert!(ps_heisenberg_weyl((0.0, 0.0), &big).distance(&big).unwrap() < 1e-14);
    for z0 in [(1.0, 0.5), (-0.37, 2.2), (0.0, -1.0)] {
        let lhs = ps_heisenberg_weyl(z0, &big);
        let rhs = t.apply(&heisenberg_weyl(z0, &psi)).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-10);
        assert!((lhs.norm() - big.norm()).abs() < 1e-10);
    }
}

#[test]
fn unit_symbol_is_identity() {
    let g = grid();
    let op = quantize_phase(&Symbol::named(&g, NamedSymbol::Unit).unwrap()).unwrap();
    let big = random_phase_state(&g, &mut rng(2), 8);
    assert!(op.apply_phase(&big).unwrap().distance(&big).unwrap() < 1e-12);
}

#[test]
fn intertwining_reports() {
    let g = grid();
    let t = WindowedIsometry::standard(&g);
    let mut r = rng(3);
    let x = verify_intertwining(&Symbol::named(&g, NamedSymbol::Position).unwrap(), &t, 5, &mut r).unwrap();
    assert!(x.iter().all(|rep| rep.max_residual < 1e-10));
    let h = verify_intertwining(&Symbol::named(&g, NamedSymbol::Oscillator).unwrap(), &t, 5, &mut r).unwrap();
    assert!(h.iter().all(|rep| rep.max_residual < 1e-8));
    assert_eq!(h[0].relation, "forward");
    let json = serde_json::to_string(&h[1]).unwrap();
    assert!(json.contains("\"relation\":\"adjoint\""));
}

#[test]
fn agrees_with_window_representation_on_h_chi() {
    let g = grid();
    let t = WindowedIsometry::hermite(g.p(), 2).unwrap();
    let a = Symbol::named(&g, NamedSymbol::PositionMomentum).unwrap();
    let big = quantize_phase(&a).unwrap();
    let windowed = t.represent(&quantize_config(&a).unwrap()).unwrap();
    let mut r = rng(4);
    for _ in 0..5 {
        let s = t.apply(&random_config_state(g.x(), &mut r, 8)).unwrap();
        let d = big
            .apply_phase(&s)
            .unwrap()
            .distance(&windowed.apply_phase(&s).unwrap())
            .unwrap();
        assert!(d < 1e-8);
    }
}

#[test]
fn commutes_with_p_multipliers() {
    let g = grid();
    let op = quantize_phase(&Symbol::named(&g, NamedSymbol::Oscillator).unwrap()).unwrap();
    let mut r = rng(5);
    let big = random_phase_state(&g, &mut r, 8);
    let ps = g.p().points();
    let mult = |s: &phasespace::states::PhaseState| {
        s.with_values(DMatrix::from_fn(N, N, |i, j| s.values()[(i, j)] * (0.3 * ps[j]).sin()))
    };
    let a = op.apply_phase(&mult(&big)).unwrap();
    let b = mult(&op.apply_phase(&big).unwrap());
    assert!(a.distance(&b).unwrap() < 1e-10);
}

#[test]
fn displacement_quadrature_oracle() {
    // Â^W = (2π)⁻¹∫F_σa(z₀)T̂_PS(z₀)dz₀ with a = e^{−(x²+ξ²)/2}, whose
    // symplectic Fourier transform is e^{−(x₀²+ξ₀²)/2}.
    let g = grid();
    let a = Symbol::from_fn(&g, |x, xi| re((-(x * x + xi * xi) / 2.0).exp())).unwrap();
    let t = WindowedIsometry::standard(&g);
    let big = t.apply(&gaussian_state(g.x(), 0.5, -0.3, 1.0).unwrap()).unwrap();
    let direct = quantize_phase(&a).unwrap().apply_phase(&big).unwrap();

    let m = 32;
    let step = 12.0 / m as f64;
    let mut acc = DMatrix::<C64>::zeros(N, N);
    for k in 0..m {
        for l in 0..m {
            let z0 = (-6.0 + k as f64 * step, -6.0 + l as f64 * step);
            let w = (-(z0.0 * z0.0 + z0.1 * z0.1) / 2.0).exp() * step * step / std::f64::consts::TAU;
            acc += ps_heisenberg_weyl(z0, &big).values() * re(w);
        }
    }
    let quad = big.with_values(acc);
    assert!(quad.distance(&direct).unwrap() < 1e-3);
}
