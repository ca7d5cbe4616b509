//! SGM1 mask files: `"SGM1"`, `u32` LE time steps, `u32` LE frequency bins,
//! then one byte per bin in time-major order (0-255 score).

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

pub const SGM1_MAGIC: &[u8; 4] = b"SGM1";
pub const SGM1_HEADER_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sgm1Mask {
    pub scores: Array2<u8>,
}

impl Sgm1Mask {
    /// Hard mask: passing bins 255, others 0.
    pub fn from_binary(mask: &Array2<bool>) -> Self {
        Sgm1Mask {
            scores: mask.mapv(|m| if m { 255 } else { 0 }),
        }
    }

    /// Decision at score > 127.
    pub fn to_binary(&self) -> Array2<bool> {
        self.scores.mapv(|s| s > 127)
    }

    pub fn dim(&self) -> (usize, usize) {
        self.scores.dim()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let (t, f) = self.dim();
        if t == 0 || f == 0 {
            return Err(Error::Format(format!("mask dimensions {t}x{f} must be non-zero")));
        }
        let t32 = u32::try_from(t).map_err(|_| Error::Format("too many time steps".into()))?;
        let f32_ = u32::try_from(f).map_err(|_| Error::Format("too many frequency bins".into()))?;
        let mut out = Vec::with_capacity(SGM1_HEADER_LEN + t * f);
        out.extend_from_slice(SGM1_MAGIC);
        out.extend_from_slice(&t32.to_le_bytes());
        out.extend_from_slice(&f32_.to_le_bytes());
        out.extend(self.scores.iter());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < SGM1_HEADER_LEN || &bytes[..4] != SGM1_MAGIC {
            return Err(Error::Format("missing SGM1 magic".into()));
        }
        let t = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
        let f = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
        if t == 0 || f == 0 {
            return Err(Error::Format(format!("mask dimensions {t}x{f} must be non-zero")));
        }
        let payload = &bytes[SGM1_HEADER_LEN..];
        if Some(payload.len()) != t.checked_mul(f) {
            return Err(Error::Format(format!(
                "header declares {t}x{f} bins, payload holds {} bytes",
                payload.len()
            )));
        }
        let scores = Array2::from_shape_vec((t, f), payload.to_vec()).expect("length checked");
        Ok(Sgm1Mask { scores })
    }
}

pub fn write_mask(path: &Path, mask: &Sgm1Mask) -> Result<()> {
    fs::write(path, mask.to_bytes()?).map_err(|e| Error::io(path, e))
}

pub fn read_mask(path: &Path) -> Result<Sgm1Mask> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Sgm1Mask::from_bytes(&bytes).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        e => e,
    })
}
