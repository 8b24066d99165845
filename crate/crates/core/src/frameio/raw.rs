//! SHF1 raw tensors: `"SHF1"`, then width, height and channels as `u32`
//! little-endian, then `d` little-endian `f32` values.

use std::path::Path;

use super::{check_frame_shape, FrameShape};
use crate::error::{Error, Result};
use crate::vector::FrameVector;

const MAGIC: &[u8; 4] = b"SHF1";
const HEADER_LEN: usize = 16;

pub fn load_raw(path: &Path) -> Result<(FrameVector, FrameShape)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_raw(&bytes, path)
}

pub fn save_raw(frame: &FrameVector, shape: FrameShape, path: &Path) -> Result<()> {
    let bytes = encode_raw(frame, shape)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn decode_raw(bytes: &[u8], path: &Path) -> Result<(FrameVector, FrameShape)> {
    let fail = |offset: usize, reason: String| Error::Format {
        path: path.to_path_buf(),
        offset,
        reason,
    };
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(fail(0, "missing SHF1 magic".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(fail(bytes.len(), "truncated header".into()));
    }
    let field = |i: usize| {
        let at = 4 + 4 * i;
        u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize
    };
    let shape = FrameShape::new(field(0), field(1), field(2))
        .map_err(|_| fail(4, "zero dimension in header".into()))?;
    let expected = shape
        .d()
        .checked_mul(4)
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| fail(4, "dimensions overflow".into()))?;
    if bytes.len() != expected {
        let offset = bytes.len().min(expected);
        return Err(fail(
            offset,
            format!(
                "expected {expected} bytes for {shape}, found {}",
                bytes.len()
            ),
        ));
    }
    let values: Vec<f64> = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))))
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(fail(HEADER_LEN + 4 * i, "non-finite value".into()));
    }
    Ok((FrameVector::from_vec_unchecked(values), shape))
}

/// Values are narrowed to `f32` with round-to-nearest-even.
pub fn encode_raw(frame: &FrameVector, shape: FrameShape) -> Result<Vec<u8>> {
    check_frame_shape(frame, shape)?;
    let header_field = |v: usize| {
        u32::try_from(v).map_err(|_| Error::param(format!("dimension {v} does not fit in u32")))
    };
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * shape.d());
    out.extend_from_slice(MAGIC);
    for v in [shape.width, shape.height, shape.channels] {
        out.extend_from_slice(&header_field(v)?.to_le_bytes());
    }
    for &v in frame.iter() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    Ok(out)
}
