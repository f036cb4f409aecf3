//! CSV and raw binary formats for observables, snapshots and phase-space
//! tables.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::moyal::PhaseField;
use crate::phase_space::{PhaseSpaceGrid, SpinChargeState};
use crate::selfenergy::{SelfEnergySet, TABLE_FIELD_NAMES};
use crate::transport::Observables;

pub const OBSERVABLE_COLUMNS: [&str; 7] = [
    "t",
    "total_charge",
    "mx_mean",
    "my_mean",
    "mz_mean",
    "m_norm_mean",
    "phi_mid",
];

/// Enough significant digits for an exact `f64` round trip.
pub const DEFAULT_PRECISION: usize = 17;

const BINARY_MAGIC: &[u8; 8] = b"SPWGSNAP";
const BINARY_VERSION: u32 = 1;
const BINARY_HEADER: usize = 64;

fn check_precision(precision: usize) -> Result<()> {
    if (1..=17).contains(&precision) {
        Ok(())
    } else {
        Err(Error::invalid("output.precision", "must be between 1 and 17"))
    }
}

/// Scientific notation with `precision` significant digits.
pub fn format_value(v: f64, precision: usize) -> String {
    format!("{:.*e}", precision.saturating_sub(1), v)
}

pub fn write_observables<W: Write>(obs: &[Observables], mut w: W, precision: usize) -> Result<()> {
    check_precision(precision)?;
    writeln!(w, "{}", OBSERVABLE_COLUMNS.join(","))?;
    for o in obs {
        let row = [
            o.t,
            o.total_charge,
            o.mx_mean,
            o.my_mean,
            o.mz_mean,
            o.m_norm_mean,
            o.phi_mid,
        ];
        let cells: Vec<String> = row.iter().map(|v| format_value(*v, precision)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_observables_file(obs: &[Observables], path: &Path, precision: usize) -> Result<()> {
    write_observables(obs, BufWriter::new(File::create(path)?), precision)
}

fn p_columns(grid: &PhaseSpaceGrid) -> &'static [&'static str] {
    if grid.momentum_dims() == 1 {
        &["p_index"]
    } else {
        &["px_index", "py_index"]
    }
}

pub fn snapshot_header(grid: &PhaseSpaceGrid) -> String {
    let mut cols = vec!["q_index"];
    cols.extend_from_slice(p_columns(grid));
    cols.extend_from_slice(&["s0", "sx", "sy", "sz"]);
    cols.join(",")
}

/// One row per node in storage order.
pub fn write_snapshot<W: Write>(
    state: &SpinChargeState,
    grid: &PhaseSpaceGrid,
    mut w: W,
    precision: usize,
) -> Result<()> {
    check_precision(precision)?;
    state.check_shape(grid)?;
    writeln!(w, "{}", snapshot_header(grid))?;
    for idx in 0..grid.len() {
        let (iq, m) = grid.split(idx);
        let (jx, jy) = grid.momentum_indices(m);
        let s = state.spin[idx];
        let f = |v: f64| format_value(v, precision);
        if grid.momentum_dims() == 1 {
            write!(w, "{iq},{jx},")?;
        } else {
            write!(w, "{iq},{jx},{jy},")?;
        }
        writeln!(w, "{},{},{},{}", f(state.s0[idx]), f(s[0]), f(s[1]), f(s[2]))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_snapshot_file(
    state: &SpinChargeState,
    grid: &PhaseSpaceGrid,
    path: &Path,
    precision: usize,
) -> Result<()> {
    write_snapshot(state, grid, BufWriter::new(File::create(path)?), precision)
}

fn parse_index(cell: &str, line: usize, limit: usize) -> Result<usize> {
    let v: usize = cell.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad index '{}'", cell.trim()),
    })?;
    if v >= limit {
        return Err(Error::Parse {
            line,
            message: format!("index {v} out of range (< {limit})"),
        });
    }
    Ok(v)
}

fn parse_value(cell: &str, line: usize) -> Result<f64> {
    cell.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad number '{}'", cell.trim()),
    })
}

fn node_index(grid: &PhaseSpaceGrid, iq: usize, p: &[usize]) -> usize {
    let m = if p.len() == 1 { p[0] } else { p[0] * grid.n_p() + p[1] };
    grid.index(iq, m)
}

/// Reads a snapshot written by [`write_snapshot`]. Every node must appear
/// exactly once; the time stamp is set to zero.
pub fn read_snapshot<R: BufRead>(r: R, grid: &PhaseSpaceGrid) -> Result<SpinChargeState> {
    let mut state = SpinChargeState::zeros(grid);
    let mut seen = vec![false; grid.len()];
    let dims = grid.momentum_dims();
    let mut lines = r.lines();
    let header = lines.next().transpose()?;
    match header {
        Some(h) if h.trim() == snapshot_header(grid) => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header '{}'", snapshot_header(grid)),
            })
        }
    }
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 5 + dims {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} columns, got {}", 5 + dims, cells.len()),
            });
        }
        let iq = parse_index(cells[0], lineno, grid.n_q())?;
        let mut p = [0usize; 2];
        for a in 0..dims {
            p[a] = parse_index(cells[1 + a], lineno, grid.n_p())?;
        }
        let idx = node_index(grid, iq, &p[..dims]);
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Parse {
                line: lineno,
                message: "duplicate node".into(),
            });
        }
        let v = &cells[1 + dims..];
        state.s0[idx] = parse_value(v[0], lineno)?;
        state.spin[idx] = [
            parse_value(v[1], lineno)?,
            parse_value(v[2], lineno)?,
            parse_value(v[3], lineno)?,
        ];
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidState {
            node: missing,
            reason: "missing from snapshot".into(),
        });
    }
    Ok(state)
}

pub fn read_snapshot_file(path: &Path, grid: &PhaseSpaceGrid) -> Result<SpinChargeState> {
    read_snapshot(BufReader::new(File::open(path)?), grid)
}

/// Reads a phase-space table with columns `p index (or px, py), q index,
/// value`. A header line is optional; nodes that do not appear are zero.
pub fn read_phase_field<R: BufRead>(
    r: R,
    grid: &PhaseSpaceGrid,
    name: &str,
) -> Result<PhaseField> {
    let dims = grid.momentum_dims();
    let mut values = vec![0.0; grid.len()];
    let mut seen = vec![false; grid.len()];
    for (k, line) in r.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cells: Vec<&str> = trimmed.split(',').collect();
        if k == 0 && cells[0].trim().parse::<usize>().is_err() {
            continue;
        }
        if cells.len() != dims + 2 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {} columns, got {}", dims + 2, cells.len()),
            });
        }
        let mut p = [0usize; 2];
        for a in 0..dims {
            p[a] = parse_index(cells[a], lineno, grid.n_p())?;
        }
        let iq = parse_index(cells[dims], lineno, grid.n_q())?;
        let v = parse_value(cells[dims + 1], lineno)?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                message: "non-finite value".into(),
            });
        }
        let idx = node_index(grid, iq, &p[..dims]);
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::Parse {
                line: lineno,
                message: "duplicate node".into(),
            });
        }
        values[idx] = v;
    }
    Ok(PhaseField::new(name, values))
}

/// Loads `<name>.csv` for every table field present in `dir`; absent files
/// leave the field at zero.
pub fn load_table_dir(dir: &Path, grid: &PhaseSpaceGrid) -> Result<SelfEnergySet> {
    if !dir.is_dir() {
        return Err(Error::invalid(
            "closure.table_dir",
            format!("'{}' is not a directory", dir.display()),
        ));
    }
    let mut set = SelfEnergySet::zeros(grid);
    for (field, name) in set.fields_mut().zip(TABLE_FIELD_NAMES) {
        let path = dir.join(format!("{name}.csv"));
        if path.is_file() {
            let file = BufReader::new(File::open(&path)?);
            *field = read_phase_field(file, grid, name).map_err(|e| match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{}: {message}", path.display()),
                },
                other => other,
            })?;
        }
    }
    set.check(grid)?;
    Ok(set)
}

/// Raw little-endian layout: a 64-byte header (magic, version, momentum
/// dims, `n_q`, `n_p`, time) followed by `s0, sx, sy, sz` per node.
pub fn write_snapshot_binary<W: Write>(
    state: &SpinChargeState,
    grid: &PhaseSpaceGrid,
    mut w: W,
) -> Result<()> {
    state.check_shape(grid)?;
    let mut header = [0u8; BINARY_HEADER];
    header[..8].copy_from_slice(BINARY_MAGIC);
    header[8..12].copy_from_slice(&BINARY_VERSION.to_le_bytes());
    header[12..16].copy_from_slice(&(grid.momentum_dims() as u32).to_le_bytes());
    header[16..24].copy_from_slice(&(grid.n_q() as u64).to_le_bytes());
    header[24..32].copy_from_slice(&(grid.n_p() as u64).to_le_bytes());
    header[32..40].copy_from_slice(&state.time.to_le_bytes());
    w.write_all(&header)?;
    for idx in 0..grid.len() {
        let s = state.spin[idx];
        for v in [state.s0[idx], s[0], s[1], s[2]] {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot_binary<R: Read>(mut r: R, grid: &PhaseSpaceGrid) -> Result<SpinChargeState> {
    let mut header = [0u8; BINARY_HEADER];
    r.read_exact(&mut header)?;
    let bad = |msg: &str| Error::Io(io::Error::new(io::ErrorKind::InvalidData, msg.to_string()));
    if &header[..8] != BINARY_MAGIC {
        return Err(bad("not a snapshot file"));
    }
    let word = |a: usize| u32::from_le_bytes(header[a..a + 4].try_into().unwrap());
    let long = |a: usize| u64::from_le_bytes(header[a..a + 8].try_into().unwrap());
    if word(8) != BINARY_VERSION {
        return Err(bad("unsupported snapshot version"));
    }
    if word(12) as usize != grid.momentum_dims()
        || long(16) as usize != grid.n_q()
        || long(24) as usize != grid.n_p()
    {
        return Err(bad("snapshot dimensions do not match the grid"));
    }
    let mut state = SpinChargeState::zeros(grid);
    state.time = f64::from_le_bytes(header[32..40].try_into().unwrap());
    let mut buf = [0u8; 32];
    for idx in 0..grid.len() {
        r.read_exact(&mut buf)?;
        let f = |k: usize| f64::from_le_bytes(buf[8 * k..8 * k + 8].try_into().unwrap());
        state.s0[idx] = f(0);
        state.spin[idx] = [f(1), f(2), f(3)];
    }
    Ok(state)
}
