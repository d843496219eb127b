//! Binary orbital dump.
//!
//! Layout, all little-endian: 8-byte magic, `u32` d, M, N, then `f64` L,
//! alpha, eps, t, then `N * M^d` pairs `(re, im)` orbital by orbital.

use std::io::{Read, Write};

use num_complex::Complex64 as C64;

use super::SlaterState;
use crate::error::{Error, Result};
use crate::lattice::{ComplexField, Grid, ScaledParams};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"TDHFORB1";

pub fn write_checkpoint<W: Write>(state: &SlaterState, mut out: W) -> Result<()> {
    let g = state.grid();
    let p = state.params();
    out.write_all(CHECKPOINT_MAGIC)?;
    for v in [g.dim(), g.sites_per_axis(), state.n_particles()] {
        out.write_all(&(v as u32).to_le_bytes())?;
    }
    for v in [g.length(), p.alpha(), p.epsilon(), state.time()] {
        out.write_all(&v.to_le_bytes())?;
    }
    for f in state.orbitals() {
        for v in f.values() {
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<usize> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b) as usize)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Checkpoint("truncated file".into())
    } else {
        Error::Io(e)
    }
}

/// Restores a state written by [`write_checkpoint`]; orthonormality is
/// re-validated but the orbitals are taken verbatim.
pub fn read_checkpoint<R: Read>(mut input: R) -> Result<SlaterState> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(truncated)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let d = read_u32(&mut input)?;
    let m = read_u32(&mut input)?;
    let n = read_u32(&mut input)?;
    let length = read_f64(&mut input)?;
    let alpha = read_f64(&mut input)?;
    let eps = read_f64(&mut input)?;
    let t = read_f64(&mut input)?;
    let grid = Grid::new(d, m, length)?;
    let params = ScaledParams::with_epsilon(n, alpha, eps)?;
    let mut orbitals = Vec::with_capacity(n);
    for _ in 0..n {
        let mut vals = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = read_f64(&mut input)?;
            let im = read_f64(&mut input)?;
            vals.push(C64::new(re, im));
        }
        orbitals.push(ComplexField::new(grid, vals)?);
    }
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", rest.len())));
    }
    SlaterState::new(grid, orbitals, params, t)
}
