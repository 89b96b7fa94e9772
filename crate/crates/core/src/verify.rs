//! Named verification suites. Each suite returns a list of residual checks;
//! all randomness comes from one ChaCha8 generator seeded from the config,
//! so reports are reproducible byte for byte.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_ft, make_grid, Grid1D, PhaseGrid};
use crate::mixed::MixedState;
use crate::moyal::{
    bopp_operator, cross_wigner, dilation_u_d, moyal_map_u, quantize_moyal, rotation_u_r, star_apply, stargen_residual,
    Bopp,
};
use crate::phase_weyl::{verify_intertwining, RANDOM_LEVEL};
use crate::spectral::{compare_representations, eig, spectrum_report, DynamicsReport, SpectrumReport};
use crate::states::{
    gaussian_state, hermite_state, inner_config, inner_phase, random_config_state, random_phase_state, ConfigState,
    PhaseState,
};
use crate::tchi::WindowedIsometry;
use crate::weyl::{moyal_product, quantize_config, NamedSymbol, Symbol};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Isometry,
    Intertwining,
    Unitarity,
    Star,
    Spectrum,
    Dynamics,
    Mixed,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Isometry,
        Suite::Intertwining,
        Suite::Unitarity,
        Suite::Star,
        Suite::Spectrum,
        Suite::Dynamics,
        Suite::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Isometry => "isometry",
            Suite::Intertwining => "intertwining",
            Suite::Unitarity => "unitarity",
            Suite::Star => "star",
            Suite::Spectrum => "spectrum",
            Suite::Dynamics => "dynamics",
            Suite::Mixed => "mixed",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::EACH
            .iter()
            .chain([Suite::All].iter())
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// Flat run configuration; `tol_<suite>` overrides every tolerance of
/// that suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub n_points: usize,
    /// Defaults to the self-dual width √(πN/2).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    /// Hermite level of the window χ.
    pub window: usize,
    pub symbol: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_isometry: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_intertwining: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_unitarity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_spectrum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_dynamics: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_mixed: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            n_points: 256,
            half_width: None,
            window: 0,
            symbol: "oscillator".into(),
            t: None,
            seed: 17,
            tol_isometry: None,
            tol_intertwining: None,
            tol_unitarity: None,
            tol_star: None,
            tol_spectrum: None,
            tol_dynamics: None,
            tol_mixed: None,
        }
    }
}

impl VerifyConfig {
    /// Configuration and symbol grids; p is the dual of x.
    pub fn grid(&self) -> Result<PhaseGrid> {
        let x = match self.half_width {
            Some(w) => make_grid(self.n_points, w, 0.0)?,
            None => Grid1D::self_dual(self.n_points)?,
        };
        PhaseGrid::new(x, x.dual())
    }

    pub fn named_symbol(&self) -> Result<NamedSymbol> {
        self.symbol.parse()
    }

    pub fn window_state(&self) -> Result<ConfigState> {
        hermite_state(self.grid()?.p(), self.window)
    }

    fn override_for(&self, suite: Suite) -> Option<f64> {
        match suite {
            Suite::Isometry => self.tol_isometry,
            Suite::Intertwining => self.tol_intertwining,
            Suite::Unitarity => self.tol_unitarity,
            Suite::Star => self.tol_star,
            Suite::Spectrum => self.tol_spectrum,
            Suite::Dynamics => self.tol_dynamics,
            Suite::Mixed => self.tol_mixed,
            Suite::All => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub spectra: Vec<SpectrumReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dynamics: Vec<DynamicsReport>,
    pub pass: bool,
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    suite: Suite,
    grid: PhaseGrid,
    rng: ChaCha8Rng,
    checks: Vec<Check>,
    spectra: Vec<SpectrumReport>,
    dynamics: Vec<DynamicsReport>,
}

impl Ctx<'_> {
    fn check(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let tolerance = self.cfg.override_for(self.suite).unwrap_or(tolerance);
        self.checks.push(Check {
            name: format!("{}.{}", self.suite, name.into()),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        });
    }

    fn window(&self) -> Result<WindowedIsometry> {
        WindowedIsometry::new(self.cfg.window_state()?)
    }
}

/// Runs one suite (or all of them, in a fixed order).
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut ctx = Ctx {
        cfg,
        suite,
        grid: cfg.grid()?,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        checks: Vec::new(),
        spectra: Vec::new(),
        dynamics: Vec::new(),
    };
    let list: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    for s in list {
        ctx.suite = s;
        match s {
            Suite::Isometry => isometry(&mut ctx)?,
            Suite::Intertwining => intertwining(&mut ctx)?,
            Suite::Unitarity => unitarity(&mut ctx)?,
            Suite::Star => star(&mut ctx)?,
            Suite::Spectrum => spectrum(&mut ctx)?,
            Suite::Dynamics => dynamics(&mut ctx)?,
            Suite::Mixed => mixed(&mut ctx)?,
            Suite::All => unreachable!(),
        }
    }
    let pass = ctx.checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        suite: suite.name().into(),
        seed: cfg.seed,
        config: cfg.clone(),
        checks: ctx.checks,
        spectra: ctx.spectra,
        dynamics: ctx.dynamics,
        pass,
    })
}

fn isometry(ctx: &mut Ctx) -> Result<()> {
    let t = ctx.window()?;
    let x = *ctx.grid.x();
    let mut inner: f64 = 0.0;
    for _ in 0..50 {
        let a = random_config_state(&x, &mut ctx.rng, RANDOM_LEVEL);
        let b = random_config_state(&x, &mut ctx.rng, RANDOM_LEVEL);
        let lhs = inner_phase(&t.apply(&a)?, &t.apply(&b)?)?;
        inner = inner.max((lhs - inner_config(&a, &b)?).norm());
    }
    ctx.check("inner_product", inner, 1e-10);

    let pg = t.phase_grid(&x)?;
    let (mut idem, mut adj): (f64, f64) = (0.0, 0.0);
    for _ in 0..10 {
        let a = random_phase_state(&pg, &mut ctx.rng, RANDOM_LEVEL);
        let b = random_phase_state(&pg, &mut ctx.rng, RANDOM_LEVEL);
        let pa = t.project(&a)?;
        idem = idem.max(t.project(&pa)?.distance(&pa)?);
        let pb = t.project(&b)?;
        adj = adj.max((inner_phase(&b, &pa)? - inner_phase(&pb, &a)?).norm());
    }
    ctx.check("projector_idempotent", idem, 1e-10);
    ctx.check("projector_self_adjoint", adj, 1e-10);
    Ok(())
}

fn intertwining(ctx: &mut Ctx) -> Result<()> {
    let t = ctx.window()?;
    let symbols = [
        NamedSymbol::Position,
        NamedSymbol::Momentum,
        NamedSymbol::PositionMomentum,
        NamedSymbol::Oscillator,
    ];
    for s in symbols {
        let a = Symbol::named(&ctx.grid, s)?;
        for r in verify_intertwining(&a, &t, 20, &mut ctx.rng)? {
            ctx.check(format!("{}.{}", s, r.relation), r.max_residual, 1e-8);
        }
    }
    Ok(())
}

fn unitarity(ctx: &mut Ctx) -> Result<()> {
    let g = ctx.grid;
    let mut drift: f64 = 0.0;
    for _ in 0..50 {
        let s = random_phase_state(&g, &mut ctx.rng, RANDOM_LEVEL);
        drift = drift.max((moyal_map_u(&s)?.norm() - s.norm()).abs());
    }
    ctx.check("norm", drift, 1e-8);

    // U T_χ̂ ψ = (2π)^{1/2} W(ψ, χ) for Hermite and coherent pairs.
    let x = g.x();
    let mut pairs: Vec<(ConfigState, ConfigState)> = (0..5)
        .map(|k| Ok((hermite_state(x, k)?, hermite_state(x, (k + 2) % 5)?)))
        .collect::<Result<_>>()?;
    for (a, b) in [(0.5, -1.0), (-1.5, 0.3), (1.0, 1.0), (0.0, 2.0), (-0.7, -0.7)] {
        pairs.push((gaussian_state(x, a, b, 1.0)?, gaussian_state(x, -b, a, 0.9)?));
    }
    let mut wig: f64 = 0.0;
    for (psi, chi) in &pairs {
        let t = WindowedIsometry::new(forward_ft(chi).normalized()?)?;
        let u = moyal_map_u(&t.apply(psi)?)?;
        let w = cross_wigner(psi, chi)?;
        let diff = u.values() - w.values() * C64::new(TAU.sqrt(), 0.0);
        wig = wig.max(diff.iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    ctx.check("wigner_identity", wig, 1e-7);

    let mut comp: f64 = 0.0;
    for _ in 0..3 {
        let s = random_phase_state(&g, &mut ctx.rng, RANDOM_LEVEL);
        let composed = dilation_u_d(-(2f64.sqrt().ln()), &rotation_u_r(-FRAC_PI_4, &s)?)?;
        comp = comp.max(moyal_map_u(&s)?.distance(&composed)?);
    }
    ctx.check("closed_form_vs_composition", comp, 1e-7);
    Ok(())
}

fn damped(g: &PhaseGrid, f: impl Fn(f64, f64) -> C64) -> Result<Symbol> {
    Symbol::from_fn(g, |x, xi| f(x, xi) * (-(x * x + xi * xi) / 4.0).exp())
}

fn star(ctx: &mut Ctx) -> Result<()> {
    let g = ctx.grid;
    let mut corpus: Vec<(String, Symbol)> = NamedSymbol::ALL
        .iter()
        .map(|&s| Ok((s.name().to_string(), Symbol::named(&g, s)?)))
        .collect::<Result<_>>()?;
    corpus.push(("damped-unit".into(), damped(&g, |_, _| C64::new(1.0, 0.0))?));
    corpus.push((
        "damped-position-momentum".into(),
        damped(&g, |x, xi| C64::new(x * xi, 0.0))?,
    ));
    corpus.push((
        "damped-complex".into(),
        damped(&g, |x, xi| C64::new((x - xi).cos(), 0.4 * x))?,
    ));
    let states: Vec<PhaseState> = (0..2).map(|_| random_phase_state(&g, &mut ctx.rng, 6)).collect();
    for (name, a) in &corpus {
        let q = quantize_moyal(a)?;
        let mut worst: f64 = 0.0;
        for s in &states {
            worst = worst.max(star_apply(a, s)?.distance(&q.apply_phase(s)?)?);
        }
        ctx.check(format!("star_vs_quantized.{name}"), worst, 1e-6);
    }

    let s = &states[0];
    let i = C64::new(0.0, 1.0);
    let ops = [Bopp::X, Bopp::P, Bopp::XiX, Bopp::XiP];
    let mut comm: f64 = 0.0;
    for a in ops {
        for b in ops {
            let (oa, ob) = (bopp_operator(a, &g), bopp_operator(b, &g));
            let ab = oa.apply_phase(&ob.apply_phase(s)?)?;
            let ba = ob.apply_phase(&oa.apply_phase(s)?)?;
            let c = s.with_values(ab.values() - ba.values());
            let want = match (a, b) {
                (Bopp::X, Bopp::XiX) | (Bopp::P, Bopp::XiP) => s.scaled(i),
                (Bopp::XiX, Bopp::X) | (Bopp::XiP, Bopp::P) => s.scaled(-i),
                _ => s.scaled(C64::new(0.0, 0.0)),
            };
            comm = comm.max(c.distance(&want)?);
        }
    }
    ctx.check("bopp_commutators", comm, 1e-8);

    let h = Symbol::named(&g, NamedSymbol::Oscillator)?;
    let w0 = PhaseState::from_fn(&g, |x, p| C64::new((-(x * x + p * p)).exp(), 0.0)).normalized()?;
    ctx.check("stargen_oscillator_ground", stargen_residual(&h, 0.5, &w0)?, 1e-6);

    let a = damped(&g, |x, xi| C64::new(x * xi, 1.0))?;
    let b = damped(&g, |x, xi| C64::new(1.0 + x - xi * xi, 0.0))?;
    let mut prod: f64 = 0.0;
    for (a, b) in [(&a, &b), (&h, &b)] {
        let c = moyal_product(a, b)?;
        let ma = quantize_config(a)?;
        let mb = quantize_config(b)?;
        let want = ma.matrix().expect("dense") * mb.matrix().expect("dense");
        let got = quantize_config(&c)?;
        let scale = want.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let err = (got.matrix().expect("dense") - &want)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        prod = prod.max(err / scale);
    }
    ctx.check("product_quantization", prod, 1e-6);
    Ok(())
}

fn spectrum(ctx: &mut Ctx) -> Result<()> {
    let s = ctx.cfg.named_symbol()?;
    let a = Symbol::named(&ctx.grid, s)?;
    let report = spectrum_report(s.name(), &a, &ctx.cfg.window_state()?)?;
    if report.discrete {
        let labels = ["config_phase", "config_moyal", "phase_moyal"];
        for (l, d) in labels.iter().zip(&report.distances) {
            ctx.check(format!("{s}.hausdorff.{l}"), *d, 1e-6);
        }
        let res = report.residuals.iter().copied().fold(0.0, f64::max);
        ctx.check(format!("{s}.eigenvector_residual"), res, 1e-6);
    }
    ctx.spectra.push(report);
    Ok(())
}

fn dynamics(ctx: &mut Ctx) -> Result<()> {
    let chi = ctx.cfg.window_state()?;
    let psi0 = gaussian_state(ctx.grid.x(), 1.0, 0.5, 1.0)?;
    let times = match ctx.cfg.t {
        Some(t) => vec![t],
        None => vec![0.1, 0.5, 1.0],
    };
    for s in [NamedSymbol::Oscillator, NamedSymbol::FreeParticle] {
        let a = Symbol::named(&ctx.grid, s)?;
        for &t in &times {
            let r = compare_representations(s.name(), &a, &chi, t, &psi0)?;
            let d = r.distances.iter().copied().fold(0.0, f64::max);
            let n = r.norm_drift.iter().copied().fold(0.0, f64::max);
            ctx.check(format!("{s}.t={t}.distance"), d, 1e-6);
            ctx.check(format!("{s}.t={t}.norm_drift"), n, 1e-8);
            ctx.dynamics.push(r);
        }
    }
    Ok(())
}

fn mixed(ctx: &mut Ctx) -> Result<()> {
    let g = ctx.grid;
    let x = g.x();
    let h = quantize_config(&Symbol::named(&g, NamedSymbol::Oscillator)?)?;
    let spec = eig(&h)?;
    let p_axis = g.p();

    // ψ₁ = φ_α, ψ₂ ⊥ φ_α with weights 0.3 / 0.7, then a generic pair.
    let cases = vec![
        MixedState::with_weights(vec![
            (spec.vectors[2].clone(), hermite_state(p_axis, 0)?, 0.3),
            (spec.vectors[5].clone(), hermite_state(p_axis, 1)?, 0.7),
        ])?,
        MixedState::with_weights(vec![
            (
                random_config_state(x, &mut ctx.rng, RANDOM_LEVEL),
                hermite_state(p_axis, 0)?,
                0.45,
            ),
            (
                random_config_state(x, &mut ctx.rng, RANDOM_LEVEL),
                hermite_state(p_axis, 2)?,
                0.55,
            ),
        ])?,
    ];
    ctx.check(
        "example_probability",
        (cases[0].measure_probability(&spec.vectors[2])? - 0.3).abs(),
        1e-10,
    );

    let (mut formula, mut transition, mut total, mut expect): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for m in &cases {
        let psi = m.to_phase()?;
        let mut sum = 0.0;
        for (level, phi) in spec.vectors.iter().enumerate().take(8) {
            let p = m.measure_probability(phi)?;
            // ((Ψ|(P_α ⊗ 1)Ψ)) on the lattice.
            let reduced = phi.values().adjoint() * psi.values() * C64::new(x.spacing(), 0.0);
            let direct = reduced.norm_squared() * p_axis.spacing();
            formula = formula.max((p - direct).abs());
            if p > 1e-12 {
                let (_, _, collapsed) = m.measure_level(&h, level)?;
                transition = transition.max((inner_phase(&psi, &collapsed)?.norm_sqr() - p).abs());
            }
            sum += p;
        }
        for phi in spec.vectors.iter().skip(8) {
            sum += m.measure_probability(phi)?;
        }
        total = total.max(sum - 1.0);
        for s in [NamedSymbol::Oscillator, NamedSymbol::PositionMomentum] {
            let op = quantize_config(&Symbol::named(&g, s)?)?;
            expect = expect.max((m.phase_expectation(&op)? - m.convex_expectation(&op)?).norm());
        }
    }
    ctx.check("convex_formula", formula, 1e-10);
    ctx.check("transition_probability", transition, 1e-10);
    ctx.check("total_probability_excess", total.max(0.0), 1e-8);
    ctx.check("expectation_consistency", expect, 1e-8);
    Ok(())
}
