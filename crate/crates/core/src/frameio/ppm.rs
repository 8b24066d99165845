//! Binary PPM (`P6`, maxval 255).

use std::path::Path;

use super::{check_frame_shape, FrameShape};
use crate::error::{Error, Result};
use crate::vector::FrameVector;

pub fn load_ppm(path: &Path) -> Result<(FrameVector, FrameShape)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_ppm(&bytes, path)
}

pub fn save_ppm(frame: &FrameVector, shape: FrameShape, path: &Path) -> Result<()> {
    let bytes = encode_ppm(frame, shape)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Parses a P6 byte stream. `path` is only used in error messages.
pub fn decode_ppm(bytes: &[u8], path: &Path) -> Result<(FrameVector, FrameShape)> {
    let fail = |offset: usize, reason: &str| Error::Format {
        path: path.to_path_buf(),
        offset,
        reason: reason.to_string(),
    };
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(fail(0, "missing P6 magic"));
    }
    let mut cursor = Cursor { bytes, pos: 2 };
    let width = cursor.header_number().map_err(|(o, r)| fail(o, r))?;
    let height = cursor.header_number().map_err(|(o, r)| fail(o, r))?;
    let maxval_offset = cursor.pos;
    let maxval = cursor.header_number().map_err(|(o, r)| fail(o, r))?;
    if maxval != 255 {
        return Err(fail(maxval_offset, "only maxval 255 is supported"));
    }
    if width == 0 || height == 0 {
        return Err(fail(3, "zero image dimension"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(cursor.pos) {
        Some(b) if b.is_ascii_whitespace() => cursor.pos += 1,
        _ => return Err(fail(cursor.pos, "expected whitespace before raster")),
    }
    let shape = FrameShape::rgb(width, height);
    let raster = &bytes[cursor.pos..];
    if raster.len() < shape.d() {
        return Err(fail(bytes.len(), "truncated raster"));
    }
    if raster.len() > shape.d() {
        return Err(fail(cursor.pos + shape.d(), "trailing bytes after raster"));
    }
    let values = raster.iter().map(|&b| f64::from(b) / 255.0).collect();
    Ok((FrameVector::from_vec_unchecked(values), shape))
}

/// Clamps to `[0, 1]` and quantizes with round-half-away-from-zero.
pub fn encode_ppm(frame: &FrameVector, shape: FrameShape) -> Result<Vec<u8>> {
    check_frame_shape(frame, shape)?;
    if shape.channels != 3 {
        return Err(Error::param(format!(
            "PPM needs 3 channels, shape is {shape}"
        )));
    }
    let mut out = format!("P6\n{} {}\n255\n", shape.width, shape.height).into_bytes();
    out.reserve(shape.d());
    out.extend(frame.iter().map(|&v| quantize(v)));
    Ok(out)
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Skips whitespace and `#` comments, then reads a decimal number.
    fn header_number(&mut self) -> std::result::Result<usize, (usize, &'static str)> {
        let start = self.pos;
        loop {
            match self.bytes.get(self.pos) {
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' || b == b'\r' {
                            break;
                        }
                    }
                }
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(_) => break,
                None => return Err((self.pos, "truncated header")),
            }
        }
        if self.pos == start {
            return Err((self.pos, "expected whitespace in header"));
        }
        let digits_start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(b - b'0')))
                .ok_or((digits_start, "header number overflows"))?;
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err((self.pos, "expected a decimal number in header"));
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> &'static Path {
        Path::new("test.ppm")
    }

    #[test]
    fn white_pixel() {
        let bytes = b"P6\n1 1\n255\n\xff\xff\xff";
        let (frame, shape) = decode_ppm(bytes, p()).unwrap();
        assert_eq!(frame.as_slice(), &[1.0, 1.0, 1.0]);
        assert_eq!(shape, FrameShape::rgb(1, 1));
    }

    #[test]
    fn two_pixels_interleaved() {
        let bytes = b"P6 2 1 255\n\x00\x00\x00\xff\x00\x00";
        let (frame, shape) = decode_ppm(bytes, p()).unwrap();
        assert_eq!(frame.as_slice(), &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(shape.d(), 6);
    }

    #[test]
    fn comments_in_header() {
        let bytes = b"P6\n# made by hand\n1 # width\n1\n255\n\x80\x00\xff";
        let (frame, _) = decode_ppm(bytes, p()).unwrap();
        assert_eq!(frame[0], 128.0 / 255.0);
    }

    #[test]
    fn format_errors_carry_offsets() {
        let offset = |bytes: &[u8]| match decode_ppm(bytes, p()) {
            Err(Error::Format { offset, .. }) => offset,
            other => panic!("expected format error, got {other:?}"),
        };
        assert_eq!(offset(b"P3\n1 1\n255\n000"), 0);
        assert_eq!(offset(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00"), 6);
        assert_eq!(offset(b"P6\n2 1\n255\n\x00\x00\x00"), 14);
        assert_eq!(offset(b"P6\n1 1\n255\n\x00\x00\x00\x00"), 14);
        assert_eq!(offset(b"P6\n1"), 4);
        assert_eq!(offset(b"P6\nx 1\n255\n"), 3);
    }

    #[test]
    fn quantization_rules() {
        let shape = FrameShape::rgb(1, 1);
        let enc = |v: [f64; 3]| {
            let bytes = encode_ppm(&FrameVector::new(v.to_vec()).unwrap(), shape).unwrap();
            bytes[bytes.len() - 3..].to_vec()
        };
        assert_eq!(enc([0.5, 0.5, 0.5]), vec![128, 128, 128]);
        assert_eq!(enc([1.7, -0.2, 1.0]), vec![255, 0, 255]);
        assert_eq!(enc([1.0 / 255.0, 254.0 / 255.0, 0.0]), vec![1, 254, 0]);
    }

    #[test]
    fn shape_must_match() {
        let frame = FrameVector::new(vec![0.0; 6]).unwrap();
        assert!(encode_ppm(&frame, FrameShape::rgb(1, 1)).is_err());
        assert!(encode_ppm(&frame, FrameShape::new(6, 1, 1).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn byte_round_trip(w in 1usize..8, h in 1usize..8, seed in any::<u64>()) {
            let mut state = seed;
            let raster: Vec<u8> = (0..w * h * 3)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 56) as u8
                })
                .collect();
            let mut file = format!("P6\n{w} {h}\n255\n").into_bytes();
            file.extend(&raster);
            let (frame, shape) = decode_ppm(&file, p()).unwrap();
            prop_assert_eq!(encode_ppm(&frame, shape).unwrap(), file);
        }
    }
}
