//! Plot-friendly exports.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::spectral::Ladders;
use crate::states::PhaseState;

#[derive(Serialize)]
struct WignerRow {
    x: f64,
    p: f64,
    re: f64,
    im: f64,
}

/// One row per lattice point: x, p, Re, Im (x outer, p inner).
pub fn write_phase_csv<W: Write>(state: &PhaseState, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let xs = state.grid().x().points();
    let ps = state.grid().p().points();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            let v = state.values()[(i, j)];
            w.serialize(WignerRow {
                x,
                p,
                re: v.re,
                im: v.im,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// gnuplot `nonuniform matrix` layout of the real part: first row is N
/// followed by the p axis, every further row is x followed by Re Ψ(x, ·).
/// Plot with `splot 'file' nonuniform matrix with pm3d`.
pub fn write_gnuplot_matrix<W: Write>(state: &PhaseState, mut out: W) -> Result<()> {
    let xs = state.grid().x().points();
    let ps = state.grid().p().points();
    write!(out, "{}", ps.len())?;
    for p in &ps {
        write!(out, " {p}")?;
    }
    writeln!(out)?;
    for (i, x) in xs.iter().enumerate() {
        write!(out, "{x}")?;
        for j in 0..ps.len() {
            write!(out, " {}", state.values()[(i, j)].re)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn save_phase_csv(state: &PhaseState, path: &Path) -> Result<()> {
    write_phase_csv(state, std::fs::File::create(path)?)
}

pub fn save_gnuplot_matrix(state: &PhaseState, path: &Path) -> Result<()> {
    write_gnuplot_matrix(state, std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Columns level, config, phase, moyal; missing entries are left empty.
pub fn write_ladders_csv<W: Write>(l: &Ladders, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "config", "phase", "moyal"])?;
    let n = l.config.len().max(l.phase.len()).max(l.moyal.len());
    let cell = |v: &[f64], k: usize| v.get(k).map(|x| x.to_string()).unwrap_or_default();
    for k in 0..n {
        w.write_record([k.to_string(), cell(&l.config, k), cell(&l.phase, k), cell(&l.moyal, k)])?;
    }
    w.flush()?;
    Ok(())
}
