//! Binary snapshot records.
//!
//! Each record is a 40-byte little-endian header followed by the field:
//!
//! | bytes  | content                         |
//! |--------|---------------------------------|
//! | 0..8   | magic `GPCQSNAP`                |
//! | 8..12  | format version (`u32`, = 1)     |
//! | 12..16 | dimension `n` (`u32`)           |
//! | 16..20 | points per axis `N` (`u32`)     |
//! | 20..24 | reserved, zero                  |
//! | 24..32 | box length `L` (`f64`)          |
//! | 32..40 | timestamp `t` (`f64`)           |
//!
//! then `N^n` pairs `(re, im)` of `f64`, row-major with the last axis
//! fastest. A trajectory file is a concatenation of records.

use std::io::{ErrorKind, Read, Write};

use num_complex::Complex64;

use crate::equations::EquationSpec;
use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::integrator::Trajectory;

pub const MAGIC: &[u8; 8] = b"GPCQSNAP";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 40;

pub fn write_snapshot<W: Write>(out: &mut W, field: &ComplexField, t: f64) -> Result<()> {
    let g = field.grid();
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    header.extend_from_slice(&(g.points_per_axis() as u32).to_le_bytes());
    header.extend_from_slice(&0u32.to_le_bytes());
    header.extend_from_slice(&g.box_length().to_le_bytes());
    header.extend_from_slice(&t.to_le_bytes());
    out.write_all(&header)?;
    let mut body = Vec::with_capacity(16 * field.values().len());
    for z in field.values() {
        body.extend_from_slice(&z.re.to_le_bytes());
        body.extend_from_slice(&z.im.to_le_bytes());
    }
    out.write_all(&body)?;
    Ok(())
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

/// Next record, or `None` at a clean end of input.
pub fn read_snapshot<R: Read>(input: &mut R) -> Result<Option<(f64, ComplexField)>> {
    let mut header = [0u8; HEADER_LEN];
    let mut filled = 0;
    while filled < HEADER_LEN {
        match input.read(&mut header[filled..]) {
            Ok(0) if filled == 0 => return Ok(None),
            Ok(0) => return Err(Error::Format("truncated snapshot header".into())),
            Ok(k) => filled += k,
            Err(e) if e.kind() == ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    if &header[..8] != MAGIC {
        return Err(Error::Format("not a snapshot record (bad magic)".into()));
    }
    let version = u32_at(&header, 8);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported snapshot version {version}")));
    }
    let grid = Grid::new(
        u32_at(&header, 12) as usize,
        u32_at(&header, 16) as usize,
        f64_at(&header, 24),
    )?;
    let t = f64_at(&header, 32);
    let mut body = vec![0u8; 16 * grid.len()];
    input.read_exact(&mut body).map_err(|e| match e.kind() {
        ErrorKind::UnexpectedEof => Error::Format("truncated snapshot body".into()),
        _ => e.into(),
    })?;
    let values = body
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    Ok(Some((t, ComplexField::from_values(grid, values)?)))
}

pub fn write_trajectory<W: Write>(out: &mut W, traj: &Trajectory) -> Result<()> {
    traj.require_fields()?;
    for (t, f) in traj.timestamps().iter().zip(traj.snapshots()) {
        write_snapshot(out, f, *t)?;
    }
    Ok(())
}

pub fn read_trajectory<R: Read>(input: &mut R, spec: EquationSpec) -> Result<Trajectory> {
    let mut times = Vec::new();
    let mut snaps = Vec::new();
    while let Some((t, f)) = read_snapshot(input)? {
        times.push(t);
        snaps.push(f);
    }
    Trajectory::from_snapshots(spec, times, snaps)
}
