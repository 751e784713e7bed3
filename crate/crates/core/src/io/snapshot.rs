//! Layout (little endian): 8-byte magic, `u32` version, `u32` N, `f64` L,
//! `f64` t, `f64` mu, then N*N samples of `a` and of `b`, row-major.

use std::path::Path;

use super::IoError;
use crate::model::StateAB;
use crate::spectral::{ScalarField, TorusGrid};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"EMHDSNAP";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn encode_snapshot(state: &StateAB) -> Vec<u8> {
    let grid = state.grid();
    let n = grid.n();
    let mut out = Vec::with_capacity(40 + 16 * n * n);
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for v in [grid.period(), state.t, state.mu] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in state.a.physical().iter().chain(state.b.physical()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], IoError> {
        let rest = &self.bytes[self.offset..];
        if rest.len() < len {
            return Err(IoError::Truncated {
                offset: self.offset,
                needed: len - rest.len(),
            });
        }
        self.offset += len;
        Ok(&rest[..len])
    }

    fn u32(&mut self) -> Result<u32, IoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, IoError> {
        let at = self.offset;
        let value = f64::from_le_bytes(self.take(8)?.try_into().unwrap());
        if !value.is_finite() {
            return Err(IoError::NonFinite { offset: at, value });
        }
        Ok(value)
    }
}

/// Inverse of [`encode_snapshot`]; samples are restored bit for bit.
pub fn decode_snapshot(bytes: &[u8]) -> Result<StateAB, IoError> {
    let mut cur = Cursor { bytes, offset: 0 };
    let magic = cur.take(8).map_err(|_| IoError::BadMagic {
        expected: "EMHDSNAP",
    })?;
    if magic != SNAPSHOT_MAGIC {
        return Err(IoError::BadMagic {
            expected: "EMHDSNAP",
        });
    }
    let version = cur.u32()?;
    if version != SNAPSHOT_VERSION {
        return Err(IoError::UnsupportedVersion {
            found: version,
            expected: SNAPSHOT_VERSION,
        });
    }
    let n = cur.u32()? as usize;
    let period = cur.f64()?;
    let t = cur.f64()?;
    let mu = cur.f64()?;
    let grid = TorusGrid::new(n, period)?;
    let read_field = |cur: &mut Cursor<'_>| -> Result<ScalarField, IoError> {
        let samples = (0..n * n).map(|_| cur.f64()).collect::<Result<Vec<_>, _>>()?;
        Ok(ScalarField::from_physical(&grid, samples)?)
    };
    let a = read_field(&mut cur)?;
    let b = read_field(&mut cur)?;
    if cur.offset != bytes.len() {
        return Err(IoError::TrailingBytes {
            offset: cur.offset,
            len: bytes.len() - cur.offset,
        });
    }
    if !(mu > 0.0) {
        return Err(crate::Error::InvalidParameter {
            name: "mu",
            reason: format!("resistivity must be positive, got {mu}"),
        }
        .into());
    }
    Ok(StateAB { a, b, t, mu })
}

pub fn write_snapshot(path: impl AsRef<Path>, state: &StateAB) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, encode_snapshot(state)).map_err(|e| IoError::file(path, e))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<StateAB, IoError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| IoError::file(path, e))?;
    decode_snapshot(&bytes)
}
