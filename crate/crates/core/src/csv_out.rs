//! CSV emission for traces and sweep grids.
//!
//! Numbers use Rust's shortest round-trip formatting, lines end in `\n`, and
//! nothing depends on the clock or on thread scheduling, so identical inputs
//! give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ScenarioRun, SweepRow};

pub const TRACE_HEADER: &str = "z,re_u1,im_u1,re_u2,im_u2,energy,re_dE,im_E1,im_E2,cos_phase";
pub const GRID_HEADER: &str = "delta_z,period_ratio,ratio,log10_ratio,cos_phase_f";

pub fn write_trace<W: Write>(run: &ScenarioRun, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    let t = &run.trajectory;
    for (k, ((z, u), e)) in t.z.iter().zip(&t.states).zip(&t.energies).enumerate() {
        let s = &run.eigen[k];
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            z, u[0].re, u[0].im, u[1].re, u[1].im, e, s.re_de, s.im_e1, s.im_e2, s.cos_phase
        )?;
    }
    w.flush()
}

/// Rows sorted by `(period_ratio, delta_z)`.
pub fn sorted_rows(rows: &[SweepRow]) -> Vec<SweepRow> {
    let mut out = rows.to_vec();
    out.sort_by(|a, b| {
        a.period_ratio
            .total_cmp(&b.period_ratio)
            .then(a.delta_z.total_cmp(&b.delta_z))
    });
    out
}

pub fn write_grid<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{GRID_HEADER}")?;
    for r in sorted_rows(rows) {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.delta_z, r.period_ratio, r.ratio, r.log10_ratio, r.cos_phase_f
        )?;
    }
    w.flush()
}

fn to_file(path: &Path, f: impl FnOnce(BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    f(BufWriter::new(file)).map_err(io)
}

pub fn write_trace_csv(run: &ScenarioRun, path: &Path) -> Result<()> {
    to_file(path, |w| write_trace(run, w))
}

pub fn write_grid_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    to_file(path, |w| write_grid(rows, w))
}
