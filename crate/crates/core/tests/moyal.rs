mod common;

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use common::quadrature::*;
use common::*;
use nalgebra::DMatrix;
use phasespace::grid::{forward_ft, PhaseGrid};
use phasespace::moyal::*;
use phasespace::phase_weyl::ps_heisenberg_weyl;
use phasespace::states::*;
use phasespace::tchi::WindowedIsometry;
use phasespace::weyl::{moyal_product, quantize_config, NamedSymbol, Polynomial, Symbol};
use phasespace::C64;
use proptest::prelude::*;

fn damped(g: &PhaseGrid, f: impl Fn(f64, f64) -> C64) -> Symbol {
    Symbol::from_fn(g, |x, xi| f(x, xi) * (-(x * x + xi * xi) / 4.0).exp()).unwrap()
}

/// Polynomial and Gaussian-damped symbols used across the star checks.
fn corpus(g: &PhaseGrid) -> Vec<(&'static str, Symbol)> {
    vec![
        ("unit", Symbol::named(g, NamedSymbol::Unit).unwrap()),
        ("x", Symbol::named(g, NamedSymbol::Position).unwrap()),
        ("xi", Symbol::named(g, NamedSymbol::Momentum).unwrap()),
        ("x xi", Symbol::named(g, NamedSymbol::PositionMomentum).unwrap()),
        ("oscillator", Symbol::named(g, NamedSymbol::Oscillator).unwrap()),
        ("gaussian", damped(g, |_, _| re(1.0))),
        ("damped x xi", damped(g, |x, xi| re(x * xi))),
        ("damped complex", damped(g, |x, xi| C64::new((x - xi).cos(), 0.4 * x))),
    ]
}

#[test]
fn hermite_wigner_is_gaussian() {
    let g = grid();
    let h0 = hermite_state(g.x(), 0).unwrap();
    let w = cross_wigner(&h0, &h0).unwrap();
    let want = PhaseState::from_fn(w.grid(), |x, p| re((-(x * x + p * p)).exp() / PI));
    assert!(max_abs(&(w.values() - want.values())) < 1e-8);
    let q = wigner_quadrature(g.x(), hermite(0), hermite(0));
    assert!(max_abs(&(q - want.values())) < 1e-8);

    // U T_ĥ₀ h₀ = (2π)^{1/2} π⁻¹ e^{−(x²+p²)}
    let t = WindowedIsometry::new(forward_ft(&h0)).unwrap();
    let u = moyal_map_u(&t.apply(&h0).unwrap()).unwrap();
    assert!(max_abs(&(u.values() - want.values() * re(TAU.sqrt()))) < 1e-8);
}

#[test]
fn wigner_marginal_and_symmetry() {
    let g = grid();
    let mut r = rng(1);
    let a = random_config_state(g.x(), &mut r, 8);
    let b = random_config_state(g.x(), &mut r, 8);
    let w = cross_wigner(&a, &a).unwrap();
    let total: C64 = w.values().iter().sum::<C64>() * w.grid().cell();
    assert!((total - re(1.0)).norm() < 1e-8);
    let ab = cross_wigner(&a, &b).unwrap();
    let ba = cross_wigner(&b, &a).unwrap();
    assert!(max_abs(&(ab.values().map(|c| c.conj()) - ba.values())) < 1e-12);
}

#[test]
fn moyal_map_matches_wigner_quadrature() {
    let g = grid();
    let mut r = rng(2);
    let check = |psi: &dyn Fn(f64) -> C64, chi: &dyn Fn(f64) -> C64| {
        let ps = ConfigState::from_fn(g.x(), psi);
        let cs = ConfigState::from_fn(g.x(), chi);
        let t = WindowedIsometry::new(forward_ft(&cs)).unwrap();
        let u = moyal_map_u(&t.apply(&ps).unwrap()).unwrap();
        let q = wigner_quadrature(g.x(), psi, chi);
        let err = max_abs(&(u.values() - q * re(TAU.sqrt())));
        assert!(err < 1e-7, "{err:e}");
    };
    for k in 0..5 {
        check(&hermite(k), &hermite((k * 3) % 7));
    }
    for _ in 0..5 {
        let a = coherent(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let b = coherent(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        check(&a, &b);
    }
}

use rand::Rng;

#[test]
fn closed_form_matches_composition() {
    let g = grid();
    let mut r = rng(3);
    for _ in 0..5 {
        let s = random_phase_state(&g, &mut r, 8);
        let direct = moyal_map_u(&s).unwrap();
        let composed = dilation_u_d(-(2f64.sqrt().ln()), &rotation_u_r(-FRAC_PI_4, &s).unwrap()).unwrap();
        assert!(direct.distance(&composed).unwrap() < 1e-7);
    }
}

#[test]
fn rotations_and_dilations() {
    let g = grid();
    let s = random_phase_state(&g, &mut rng(4), 8);
    assert!(rotation_u_r(0.0, &s).unwrap().distance(&s).unwrap() < 1e-12);
    assert!(rotation_u_r(TAU, &s).unwrap().distance(&s).unwrap() < 1e-8);
    assert!(dilation_u_d(0.0, &s).unwrap().distance(&s).unwrap() < 1e-14);
    let d = dilation_u_d(0.2, &s).unwrap();
    assert!((d.norm() - s.norm()).abs() < 1e-8);
    assert!(dilation_u_d(-0.2, &d).unwrap().distance(&s).unwrap() < 1e-8);

    // Ψ̂ = e^{−(x²+ξ²)/2} is rotation invariant: Ψ = e^{−x²/2}e^{−p²/2} up to scale.
    let gauss = PhaseState::from_fn(&g, |x, p| re((-(x * x + p * p) / 2.0).exp()));
    assert!(rotation_u_r(0.9, &gauss).unwrap().distance(&gauss).unwrap() < 1e-8);

    let half = dilation_u_d(2f64.sqrt().ln(), &gauss).unwrap();
    let want = PhaseState::from_fn(&g, |x, p| re((-(x * x + p * p) / 4.0).exp() / 2f64.sqrt()));
    assert!(half.distance(&want).unwrap() < 1e-8);
}

#[test]
fn wide_states_are_rejected() {
    let g = grid();
    let wide = PhaseState::from_fn(&g, |x, p| re((-(x * x + p * p) / 200.0).exp()));
    assert!(moyal_map_u(&wide).is_err());
    assert!(dilation_u_d(1.0, &wide).is_err());
}

#[test]
fn bopp_operators_match_conjugated_multipliers() {
    let g = grid();
    let s = random_phase_state(&g, &mut rng(5), 8);
    let back = moyal_map_u_inverse(&s).unwrap();
    let xs = g.x().points();
    let times_x = back.with_values(DMatrix::from_fn(N, N, |i, j| back.values()[(i, j)] * xs[i]));
    let lhs = moyal_map_u(&times_x).unwrap();
    let rhs = bopp_operator(Bopp::X, &g).apply_phase(&s).unwrap();
    assert!(lhs.distance(&rhs).unwrap() < 1e-7);

    let quantized = quantize_moyal(&Symbol::named(&g, NamedSymbol::Position).unwrap()).unwrap();
    assert!(quantized.apply_phase(&s).unwrap().distance(&rhs).unwrap() < 1e-7);
}

#[test]
fn moyal_displacement_is_conjugated_displacement() {
    let g = grid();
    let s = random_phase_state(&g, &mut rng(6), 6);
    assert!(moyal_heisenberg_weyl((0.0, 0.0), &s).distance(&s).unwrap() < 1e-14);
    for z0 in [(1.0, -0.5), (0.33, 0.71)] {
        let direct = moyal_heisenberg_weyl(z0, &s);
        let via = moyal_map_u(&ps_heisenberg_weyl(z0, &moyal_map_u_inverse(&s).unwrap())).unwrap();
        assert!(direct.distance(&via).unwrap() < 1e-7);
        assert!((direct.norm() - s.norm()).abs() < 1e-10);
    }
}

#[test]
fn star_action_matches_moyal_operator() {
    let g = grid();
    let s = random_phase_state(&g, &mut rng(7), 8);
    for (name, a) in corpus(&g) {
        let star = star_apply(&a, &s).unwrap();
        let op = quantize_moyal(&a).unwrap().apply_phase(&s).unwrap();
        assert!(star.distance(&op).unwrap() < 1e-6, "{name}");
    }
    assert!(star_apply(&corpus(&g)[0].1, &s).unwrap().distance(&s).unwrap() < 1e-12);
}

#[test]
fn bopp_substitution_matches_conjugation() {
    let g = grid();
    let s = random_phase_state(&g, &mut rng(8), 8);
    for (name, a) in corpus(&g).into_iter().filter(|(_, a)| a.polynomial().is_some()) {
        let bopp = quantize_moyal_bopp(&a).unwrap().apply_phase(&s).unwrap();
        let conj = quantize_moyal(&a).unwrap().apply_phase(&s).unwrap();
        assert!(bopp.distance(&conj).unwrap() < 1e-6, "{name}");
    }
    assert!(quantize_moyal_bopp(&damped(&g, |_, _| re(1.0))).is_err());
}

#[test]
fn stargenfunctions_of_the_oscillator() {
    let g = grid();
    let h = Symbol::named(&g, NamedSymbol::Oscillator).unwrap();
    let w0 = PhaseState::from_fn(&g, |x, p| re((-(x * x + p * p)).exp()))
        .normalized()
        .unwrap();
    assert!(stargen_residual(&h, 0.5, &w0).unwrap() < 1e-6);
    let wrong = stargen_residual(&h, 1.0, &w0).unwrap();
    assert!((wrong - 0.5).abs() < 1e-6);
    let unit = Symbol::named(&g, NamedSymbol::Unit).unwrap();
    assert!(stargen_residual(&unit, 1.0, &random_phase_state(&g, &mut rng(9), 8)).unwrap() < 1e-12);

    // (X̃² + Ξ̃_x²)/2 applied by hand.
    let x = bopp_operator(Bopp::X, &g);
    let xi = bopp_operator(Bopp::XiX, &g);
    let sq = |op: &phasespace::linop::LinOp| op.apply_phase(&op.apply_phase(&w0).unwrap()).unwrap();
    let hw = sq(&x).values() + sq(&xi).values();
    let hw = w0.with_values(hw * re(0.5));
    assert!(hw.distance(&w0.scaled(re(0.5))).unwrap() < 1e-6);

    for k in 0..6 {
        let hk = hermite_state(g.x(), k).unwrap();
        let t = WindowedIsometry::new(forward_ft(&hermite_state(g.x(), 0).unwrap())).unwrap();
        let wk = moyal_map_u(&t.apply(&hk).unwrap()).unwrap();
        assert!(stargen_residual(&h, k as f64 + 0.5, &wk).unwrap() < 1e-6, "level {k}");
        let back = t.adjoint(&moyal_map_u_inverse(&wk).unwrap()).unwrap();
        let hq = quantize_config(&h).unwrap();
        let res = hq
            .apply_config(&back)
            .unwrap()
            .distance(&back.scaled(re(k as f64 + 0.5)))
            .unwrap();
        assert!(back.norm() > 0.5 && res < 1e-6);
    }
}

#[test]
fn product_quantization_in_moyal_form() {
    let g = grid();
    let s = random_phase_state(&g, &mut rng(10), 6);
    let a = damped(&g, C64::new);
    let b = Symbol::named(&g, NamedSymbol::Oscillator).unwrap();
    let ab = moyal_product(&a, &b).unwrap();
    let lhs = quantize_moyal(&ab).unwrap().apply_phase(&s).unwrap();
    let qb = quantize_moyal(&b).unwrap().apply_phase(&s).unwrap();
    let rhs = quantize_moyal(&a).unwrap().apply_phase(&qb).unwrap();
    assert!(lhs.distance(&rhs).unwrap() < 1e-6);
}

#[test]
fn metaplectic_covariance_on_coarse_lattice() {
    assert!(is_symplectic(&moyal_symplectic_map(), 1e-14));
    let g = PhaseGrid::self_dual(64).unwrap();
    let s = random_phase_state(&g, &mut rng(11), 2);
    let f = |x: f64, xi: f64| C64::new(1.0 + x * xi, 0.2 * xi) * (-(x * x + xi * xi) / 4.0).exp();
    let direct = double_phase_weyl_apply(moyal_lift(f), &s).unwrap();
    let via = quantize_moyal(&Symbol::from_fn(&g, f).unwrap())
        .unwrap()
        .apply_phase(&s)
        .unwrap();
    assert!(direct.distance(&via).unwrap() < 1e-3);
    let poly = Polynomial::oscillator();
    let direct = double_phase_weyl_apply(moyal_lift(|x, xi| poly.eval(x, xi)), &s).unwrap();
    let via = quantize_moyal(&Symbol::from_polynomial(&g, poly.clone()).unwrap())
        .unwrap()
        .apply_phase(&s)
        .unwrap();
    assert!(direct.distance(&via).unwrap() < 1e-3);
}

fn commutator(a: Bopp, b: Bopp, s: &PhaseState) -> PhaseState {
    let g = s.grid();
    let (oa, ob) = (bopp_operator(a, g), bopp_operator(b, g));
    let ab = oa.apply_phase(&ob.apply_phase(s).unwrap()).unwrap();
    let ba = ob.apply_phase(&oa.apply_phase(s).unwrap()).unwrap();
    s.with_values(ab.values() - ba.values())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn moyal_map_is_unitary(seed in any::<u64>()) {
        let g = grid();
        let s = random_phase_state(&g, &mut rng(seed), 8);
        let u = moyal_map_u(&s).unwrap();
        prop_assert!((u.norm() - s.norm()).abs() < 1e-8);
        prop_assert!(moyal_map_u_inverse(&u).unwrap().distance(&s).unwrap() < 1e-8);
    }

    #[test]
    fn bopp_commutators(seed in any::<u64>()) {
        let g = grid();
        let s = random_phase_state(&g, &mut rng(seed), 8);
        let i = C64::new(0.0, 1.0);
        let ops = [Bopp::X, Bopp::P, Bopp::XiX, Bopp::XiP];
        for a in ops {
            for b in ops {
                let c = commutator(a, b, &s);
                let want = match (a, b) {
                    (Bopp::X, Bopp::XiX) | (Bopp::P, Bopp::XiP) => s.scaled(i),
                    (Bopp::XiX, Bopp::X) | (Bopp::XiP, Bopp::P) => s.scaled(-i),
                    _ => s.scaled(re(0.0)),
                };
                prop_assert!(c.distance(&want).unwrap() < 1e-8, "{:?} {:?}", a, b);
            }
        }
    }
}
