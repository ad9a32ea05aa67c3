//! Binary checkpoints of `(w, j)` with the run parameters.
//!
//! Layout: magic `GMHD2\0`, one version byte, `n` as little-endian `u64`,
//! then `time, nu, eta, alpha, beta` as little-endian `f64`, then the `w` and
//! `j` coefficient arrays in row-major mode order, real and imaginary parts
//! interleaved.

use std::fs;
use std::io::Write;
use std::path::Path;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mhd::{MhdState, SimParams};
use crate::spectral::{ScalarField, SpectralGrid};

pub const MAGIC: &[u8; 6] = b"GMHD2\0";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = 6 + 1 + 8 + 5 * 8;

fn encode(state: &MhdState, params: &SimParams) -> Vec<u8> {
    let n = state.grid().n();
    let mut buf = Vec::with_capacity(HEADER_LEN + 32 * n * n);
    buf.extend_from_slice(MAGIC);
    buf.push(FORMAT_VERSION);
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    for v in [state.time(), params.nu, params.eta, params.alpha, params.beta] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for field in [state.w(), state.j()] {
        for c in field.coeffs() {
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    buf
}

/// Writes a checkpoint atomically (temporary file, then rename).
pub fn save_checkpoint(state: &MhdState, params: &SimParams, path: &Path) -> Result<()> {
    if params.n != state.grid().n() {
        return Err(Error::GridMismatch(params.n, state.grid().n()));
    }
    let bytes = encode(state, params);
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        fs::rename(tmp, path)
    };
    write().map_err(|e| Error::io(path, e))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

pub fn load_checkpoint(path: &Path) -> Result<(MhdState, SimParams)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

fn decode(bytes: &[u8]) -> Result<(MhdState, SimParams)> {
    if bytes.len() < 7 || &bytes[..6] != MAGIC {
        return Err(Error::CorruptHeader);
    }
    if bytes[6] != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: bytes[6],
            expected: FORMAT_VERSION,
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::CorruptHeader);
    }
    let n = u64::from_le_bytes(bytes[7..15].try_into().expect("8 bytes"));
    let n = usize::try_from(n).map_err(|_| Error::CorruptHeader)?;
    let expected = n
        .checked_mul(n)
        .and_then(|m| m.checked_mul(32))
        .and_then(|m| m.checked_add(HEADER_LEN))
        .ok_or(Error::CorruptHeader)?;
    if bytes.len() != expected {
        return Err(Error::CorruptHeader);
    }
    let grid = SpectralGrid::new(n).map_err(|_| Error::CorruptHeader)?;
    let time = f64_at(bytes, 15);
    let params = SimParams {
        nu: f64_at(bytes, 23),
        eta: f64_at(bytes, 31),
        alpha: f64_at(bytes, 39),
        beta: f64_at(bytes, 47),
        n,
    };
    let len = n * n;
    let read_field = |offset: usize| {
        let coeffs = (0..len)
            .map(|i| {
                let at = offset + 16 * i;
                Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8))
            })
            .collect();
        ScalarField::from_coeffs(&grid, coeffs)
    };
    let w = read_field(HEADER_LEN);
    let j = read_field(HEADER_LEN + 16 * len);
    Ok((MhdState::from_parts_unchecked(time, w, j), params))
}
