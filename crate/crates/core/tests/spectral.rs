mod common;

use common::fd::fd_levels;
use common::{grid, re, xgrid};
use phasespace::linop::StateVector;
use phasespace::spectral::{compare_representations, distinct, eig, evolve, hausdorff, spectrum_report};
use phasespace::states::{gaussian_state, hermite_state, inner_config};
use phasespace::tchi::WindowedIsometry;
use phasespace::weyl::{quantize_config, NamedSymbol, Symbol};

fn window() -> phasespace::states::ConfigState {
    hermite_state(grid().p(), 0).unwrap()
}

#[test]
fn oscillator_levels_match_finite_differences() {
    let h = quantize_config(&Symbol::named(&grid(), NamedSymbol::Oscillator).unwrap()).unwrap();
    let spec = eig(&h).unwrap();
    let fd = fd_levels(&|x| 0.5 * x * x, 12.0, 5);
    for (k, (a, b)) in spec.values.iter().zip(&fd).enumerate() {
        assert!((a - b).abs() < 1e-6, "level {k}: {a} vs {b}");
    }
    assert!(spec.asymmetry < 1e-12);
}

#[test]
fn eigenvectors_are_normalized_eigenpairs() {
    let h = quantize_config(&Symbol::named(&grid(), NamedSymbol::Oscillator).unwrap()).unwrap();
    let spec = eig(&h).unwrap();
    for (l, v) in spec.values.iter().zip(&spec.vectors).take(6) {
        assert!((v.norm() - 1.0).abs() < 1e-12);
        let r = h.apply_config(v).unwrap().distance(&v.scaled(re(*l))).unwrap();
        assert!(r < 1e-9);
    }
}

#[test]
fn coherent_state_returns_after_one_period() {
    let h = quantize_config(&Symbol::named(&grid(), NamedSymbol::Oscillator).unwrap()).unwrap();
    let psi = gaussian_state(&xgrid(), 1.5, -0.7, 1.0).unwrap();
    let out = evolve(&h, &psi, 2.0 * std::f64::consts::PI).unwrap();
    let f = inner_config(&psi, &out).unwrap().norm_sqr();
    assert!(f > 1.0 - 1e-5, "fidelity {f}");
}

#[test]
fn evolution_commutes_with_the_isometry() {
    let a = Symbol::named(&grid(), NamedSymbol::Oscillator).unwrap();
    let t = WindowedIsometry::new(window()).unwrap();
    let psi = gaussian_state(&xgrid(), 0.5, 1.0, 0.9).unwrap();
    let small = evolve(&quantize_config(&a).unwrap(), &psi, 0.7).unwrap();
    let big = evolve(
        &phasespace::phase_weyl::quantize_phase(&a).unwrap(),
        &t.apply(&psi).unwrap(),
        0.7,
    )
    .unwrap();
    let d = big.distance(&t.apply(&small).unwrap()).unwrap();
    assert!(d < 1e-7, "{d}");
}

#[test]
fn oscillator_ladders_agree_across_representations() {
    let a = Symbol::named(&grid(), NamedSymbol::Oscillator).unwrap();
    let r = spectrum_report("oscillator", &a, &window()).unwrap();
    assert!(r.discrete);
    assert_eq!(r.eigenvalues.config.len(), 8);
    for d in &r.distances {
        assert!(*d < 1e-6, "{:?}", r.distances);
    }
    let fd = fd_levels(&|x| 0.5 * x * x, 12.0, 8);
    assert!(hausdorff(&r.eigenvalues.moyal, &fd) < 1e-5);
    assert!(r.residuals.iter().all(|x| *x < 1e-6), "{:?}", r.residuals);
}

#[test]
fn unit_symbol_has_a_single_level() {
    let a = Symbol::named(&grid(), NamedSymbol::Unit).unwrap();
    let r = spectrum_report("unit", &a, &window()).unwrap();
    assert!(r.discrete);
    for l in [&r.eigenvalues.config, &r.eigenvalues.phase, &r.eigenvalues.moyal] {
        assert_eq!(l.len(), 1);
        assert!((l[0] - 1.0).abs() < 1e-10);
    }
}

#[test]
fn position_is_flagged_continuous() {
    let a = Symbol::named(&grid(), NamedSymbol::Position).unwrap();
    let r = spectrum_report("position", &a, &window()).unwrap();
    assert!(!r.discrete);
    assert!(r.distances.is_empty());
    let q = r.quantiles.unwrap();
    assert_eq!(q.config.len(), 5);
    assert!(q.config[2].abs() < 0.2);
}

#[test]
fn dynamics_agree_in_all_three_representations() {
    let psi0 = gaussian_state(&xgrid(), 1.0, 0.5, 1.0).unwrap();
    for (name, s) in [
        ("oscillator", NamedSymbol::Oscillator),
        ("free", NamedSymbol::FreeParticle),
    ] {
        let a = Symbol::named(&grid(), s).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let r = compare_representations(name, &a, &window(), t, &psi0).unwrap();
            assert!(r.distances.iter().all(|d| *d < 1e-6), "{name} {t}: {:?}", r.distances);
            assert!(r.norm_drift.iter().all(|d| *d < 1e-8), "{name} {t}: {:?}", r.norm_drift);
        }
    }
}

#[test]
fn distinct_merges_close_values() {
    assert_eq!(distinct(&[1.0, 1.0 + 1e-9, 2.0]), vec![1.0, 2.0]);
    assert_eq!(hausdorff(&[0.0, 1.0], &[0.0]), 1.0);
}

#[test]
fn zero_time_is_the_identity() {
    let h = quantize_config(&Symbol::named(&grid(), NamedSymbol::Oscillator).unwrap()).unwrap();
    let psi = gaussian_state(&xgrid(), 0.0, 0.0, 1.0).unwrap();
    assert_eq!(evolve(&h, &psi, 0.0).unwrap().flat(), psi.flat());
}

#[test]
fn phase_eigenvectors_project_to_config_eigenvectors() {
    let g = grid();
    let a = Symbol::named(&g, NamedSymbol::Oscillator).unwrap();
    let small = quantize_config(&a).unwrap();
    let big = phasespace::phase_weyl::quantize_phase(&a).unwrap();
    let spec = eig(&small).unwrap();
    let t = WindowedIsometry::new(window()).unwrap();
    // φ_k ⊗ η* is an eigenvector of the phase operator for any η.
    let eta = gaussian_state(g.p(), 0.3, 0.2, 1.3).unwrap();
    for k in 0..4 {
        let l = spec.values[k];
        let big_v = phasespace::states::PhaseState::outer(&spec.vectors[k], &eta).unwrap();
        let r = big.apply_phase(&big_v).unwrap().distance(&big_v.scaled(re(l))).unwrap();
        assert!(r < 1e-8);
        let back = t.adjoint(&big_v).unwrap();
        assert!(back.norm() > 0.1);
        let r = small
            .apply_config(&back)
            .unwrap()
            .distance(&back.scaled(re(l)))
            .unwrap();
        assert!(r < 1e-8 * back.norm().max(1.0));
    }
}

mod props {
    use super::*;
    use phasespace::grid::Grid1D;
    use phasespace::linop::LinOp;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn evolution_conserves_norm(entries in proptest::collection::vec(-1.0f64..1.0, 512), t in -5.0f64..5.0) {
            let g = Grid1D::self_dual(16).unwrap();
            let m = nalgebra::DMatrix::from_fn(16, 16, |i, j| phasespace::C64::new(entries[i * 16 + j], entries[256 + i * 16 + j]));
            let h = (&m + m.adjoint()) * re(0.5);
            let op = LinOp::config(g, h);
            let psi = gaussian_state(&g, 0.0, 0.0, 1.0).unwrap().normalized().unwrap();
            let out = evolve(&op, &psi, t).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-8);
            let back = evolve(&op, &out, -t).unwrap();
            prop_assert!(back.distance(&psi).unwrap() < 1e-8);
        }
    }
}
