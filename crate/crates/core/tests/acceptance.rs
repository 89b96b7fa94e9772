//! One PASS/FAIL line per acceptance criterion on the 256-point lattice.
//! The library suites supply most residuals; the finite-difference
//! spectrum and the Wigner quadrature are computed here independently.

mod common;

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use common::fd::fd_levels;
use common::quadrature::{coherent, hermite, max_abs, wigner_quadrature};
use common::{grid, re};
use phasespace::grid::forward_ft;
use phasespace::moyal::moyal_map_u;
use phasespace::spectral::hausdorff;
use phasespace::states::ConfigState;
use phasespace::tchi::WindowedIsometry;
use phasespace::verify::{run_suite, Check, Suite, VerifyConfig, VerifyReport};
use phasespace::C64;

type Wave = Box<dyn Fn(f64) -> C64>;

struct Line {
    pass: bool,
    detail: String,
}

fn from_checks(report: &VerifyReport, prefix: &str) -> Line {
    let checks: Vec<&Check> = report.checks.iter().filter(|c| c.name.starts_with(prefix)).collect();
    let worst = checks
        .iter()
        .max_by(|a, b| (a.value / a.tolerance).total_cmp(&(b.value / b.tolerance)))
        .expect("suite produced checks");
    Line {
        pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
        detail: format!(
            "{} checks, worst {} = {:.2e} (tol {:.0e})",
            checks.len(),
            worst.name,
            worst.value,
            worst.tolerance
        ),
    }
}

fn spectrum_line(report: &VerifyReport) -> Line {
    let suite = from_checks(report, "spectrum.");
    let s = &report.spectra[0];
    let fd = fd_levels(&|x| 0.5 * x * x, 12.0, 8);
    let oracle = [&s.eigenvalues.config, &s.eigenvalues.phase, &s.eigenvalues.moyal]
        .iter()
        .map(|l| if l.len() == 8 { hausdorff(l, &fd) } else { f64::INFINITY })
        .fold(0.0, f64::max);
    Line {
        pass: suite.pass && oracle < 1e-5,
        detail: format!(
            "{}; finite-difference oracle distance {:.2e} (tol 1e-5)",
            suite.detail, oracle
        ),
    }
}

fn moyal_line(report: &VerifyReport) -> Line {
    let g = grid();
    let mut pairs: Vec<(Wave, Wave)> = Vec::new();
    for k in 0..5 {
        pairs.push((Box::new(hermite(k)), Box::new(hermite((k * 3 + 1) % 7))));
    }
    for (a, b) in [(0.5, -1.0), (-1.5, 0.3), (1.0, 1.0), (0.0, 2.0), (-0.7, -1.2)] {
        pairs.push((Box::new(coherent(a, b)), Box::new(coherent(-b, a))));
    }
    let mut worst: f64 = 0.0;
    for (psi, chi) in &pairs {
        let ps = ConfigState::from_fn(g.x(), psi);
        let cs = ConfigState::from_fn(g.x(), chi);
        let t = WindowedIsometry::new(forward_ft(&cs).normalized().unwrap()).unwrap();
        let u = moyal_map_u(&t.apply(&ps).unwrap()).unwrap();
        let q = wigner_quadrature(g.x(), psi, chi);
        worst = worst.max(max_abs(&(u.values() - q * re(TAU.sqrt()))));
    }
    let norm = from_checks(report, "unitarity.norm");
    let comp = from_checks(report, "unitarity.closed_form");
    Line {
        pass: norm.pass && comp.pass && worst < 1e-7,
        detail: format!(
            "{}; {}; quadrature Wigner error {:.2e} over 10 pairs (tol 1e-7)",
            norm.detail, comp.detail, worst
        ),
    }
}

fn main() -> ExitCode {
    let cfg = VerifyConfig::default();
    let start = Instant::now();
    let first = run_suite(Suite::All, &cfg).expect("verify all");
    let elapsed = start.elapsed().as_secs_f64();
    let second = run_suite(Suite::All, &cfg).expect("verify all");
    let a = serde_json::to_string(&first).unwrap();
    let b = serde_json::to_string(&second).unwrap();

    let lines = [
        ("isometry", from_checks(&first, "isometry.")),
        ("intertwining", from_checks(&first, "intertwining.")),
        ("spectrum", spectrum_line(&first)),
        ("moyal map", moyal_line(&first)),
        ("star", from_checks(&first, "star.")),
        ("dynamics", from_checks(&first, "dynamics.")),
        ("mixed", from_checks(&first, "mixed.")),
        (
            "determinism",
            Line {
                pass: a == b,
                detail: format!("two `verify all` runs with seed {}: {} bytes each", cfg.seed, a.len()),
            },
        ),
    ];
    let mut ok = true;
    for (k, (name, line)) in lines.iter().enumerate() {
        let tag = if line.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {tag} ({})", k + 1, line.detail);
        ok &= line.pass;
    }
    println!("verify all took {elapsed:.1}s");
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
