//! CSV and JSON writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gpcq_core::Trajectory;
use serde::Serialize;

use crate::error::CliError;

pub const CSV_HEADER: &str = "t,E,reL2sq,M,C0,h1dot,l2,l4,l6,linf,boundary_shell_max";

/// One row per snapshot, 17 significant digits.
pub fn write_csv<W: Write>(out: &mut W, traj: &Trajectory) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (t, d) in traj.timestamps().iter().zip(traj.diagnostics()) {
        let e = &d.energy;
        let n = &d.norms;
        let row = [
            *t,
            e.energy,
            e.re_l2_sq,
            e.m_value,
            e.c0,
            n.h1dot,
            n.l2,
            n.l4,
            n.l6,
            n.linf,
            n.boundary_shell_max,
        ];
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

/// `path` if absolute, else under `out_dir`; `default` when unset.
pub fn resolve_path(out_dir: &Path, path: Option<&Path>, default: &str) -> PathBuf {
    match path {
        Some(p) if p.is_absolute() => p.to_path_buf(),
        Some(p) => out_dir.join(p),
        None => out_dir.join(default),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn save_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let mut w = create(path)?;
    write_csv(&mut w, traj)?;
    w.flush()?;
    Ok(())
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn save_trajectory(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let mut w = create(path)?;
    gpcq_core::io::write_trajectory(&mut w, traj)?;
    w.flush()?;
    Ok(())
}
