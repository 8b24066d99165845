//! Frame files on disk: binary PPM, the SHF1 raw tensor format, ordered
//! directory loading and a seeded synthetic-sequence generator.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::vector::FrameVector;

mod ppm;
mod raw;
mod sequence;
mod synth;

pub use ppm::{decode_ppm, encode_ppm, load_ppm, save_ppm};
pub use raw::{decode_raw, encode_raw, load_raw, save_raw};
pub use sequence::{
    denormalize, export_sequence, frame_file_name, list_frame_files, load_frames, load_sequence,
    read_norms, write_norms, NORMS_FILE,
};
pub use synth::{synthesize_frames, synthesize_sequence, write_synthetic, SyntheticSpec};

/// Image geometry; `d = width · height · channels`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameShape {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
}

impl FrameShape {
    pub fn new(width: usize, height: usize, channels: usize) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(Error::param(format!(
                "frame shape must be positive, got {width}x{height}x{channels}"
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
        })
    }

    /// Three-channel shape.
    pub fn rgb(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            channels: 3,
        }
    }

    pub fn d(&self) -> usize {
        self.width * self.height * self.channels
    }
}

impl fmt::Display for FrameShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.width, self.height, self.channels)
    }
}

/// On-disk frame encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FrameFormat {
    #[default]
    Ppm,
    Raw,
}

impl FrameFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FrameFormat::Ppm => "ppm",
            FrameFormat::Raw => "raw",
        }
    }

    pub fn load(self, path: &Path) -> Result<(FrameVector, FrameShape)> {
        match self {
            FrameFormat::Ppm => load_ppm(path),
            FrameFormat::Raw => load_raw(path),
        }
    }

    pub fn save(self, frame: &FrameVector, shape: FrameShape, path: &Path) -> Result<()> {
        match self {
            FrameFormat::Ppm => save_ppm(frame, shape, path),
            FrameFormat::Raw => save_raw(frame, shape, path),
        }
    }
}

impl fmt::Display for FrameFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for FrameFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ppm" => Ok(FrameFormat::Ppm),
            "raw" | "shf1" => Ok(FrameFormat::Raw),
            other => Err(Error::param(format!("unknown frame format {other:?}"))),
        }
    }
}

fn check_frame_shape(frame: &FrameVector, shape: FrameShape) -> Result<()> {
    crate::vector::check_dims(shape.d(), frame.dim())
}
