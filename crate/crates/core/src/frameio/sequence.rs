//! Directory-ordered sequences, the `norms.txt` sidecar and export.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{FrameFormat, FrameShape};
use crate::error::{Error, Result};
use crate::store::PatternStore;
use crate::vector::FrameVector;

/// Sidecar holding the pre-normalization norm of each frame, one per line.
pub const NORMS_FILE: &str = "norms.txt";

/// `frame_%06d.<ext>`.
pub fn frame_file_name(index: usize, format: FrameFormat) -> String {
    format!("frame_{index:06}.{}", format.extension())
}

/// Regular files in `dir` with the format's extension, sorted by the raw
/// bytes of their file names.
pub fn list_frame_files(dir: &Path, format: FrameFormat) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let is_file = entry
            .file_type()
            .map_err(|e| Error::io(&path, e))?
            .is_file()
            || path.is_file();
        if is_file && path.extension().is_some_and(|e| e == format.extension()) {
            files.push(path);
        }
    }
    files.sort_by(|a, b| {
        let name = |p: &PathBuf| p.file_name().map(|n| n.as_encoded_bytes().to_vec());
        name(a).cmp(&name(b))
    });
    Ok(files)
}

/// Loads every frame in `dir` in file-name order without normalizing.
pub fn load_frames(
    dir: &Path,
    format: FrameFormat,
) -> Result<(Vec<FrameVector>, FrameShape, Vec<PathBuf>)> {
    let files = list_frame_files(dir, format)?;
    let (frames, shape) = load_files(&files, format, dir)?;
    Ok((frames, shape, files))
}

fn load_files(
    files: &[PathBuf],
    format: FrameFormat,
    dir: &Path,
) -> Result<(Vec<FrameVector>, FrameShape)> {
    if files.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no .{} frames in {}",
            format.extension(),
            dir.display()
        )));
    }
    let loaded = files
        .par_iter()
        .map(|path| format.load(path))
        .collect::<Result<Vec<_>>>()?;
    let shape = loaded[0].1;
    let mut frames = Vec::with_capacity(loaded.len());
    for ((frame, s), path) in loaded.into_iter().zip(files) {
        if s != shape {
            return Err(Error::ShapeMismatch {
                path: path.clone(),
                expected: shape.to_string(),
                found: s.to_string(),
            });
        }
        frames.push(frame);
    }
    Ok((frames, shape))
}

/// Loads a normalized store from `dir`.
///
/// `window = Some((p, n))` keeps frames `p ..= p + n - 1`, counting from 1 in
/// file-name order.
pub fn load_sequence(
    dir: &Path,
    format: FrameFormat,
    window: Option<(usize, usize)>,
) -> Result<(PatternStore, FrameShape)> {
    let mut files = list_frame_files(dir, format)?;
    if let Some((p, n)) = window {
        if p == 0 {
            return Err(Error::param("window start p is 1-based"));
        }
        if n == 0 {
            return Err(Error::EmptyInput(format!(
                "window p={p}, n=0 selects no frames"
            )));
        }
        if p - 1 + n > files.len() {
            return Err(Error::Window {
                p,
                n,
                available: files.len(),
            });
        }
        files = files[p - 1..p - 1 + n].to_vec();
    }
    let (frames, shape) = load_files(&files, format, dir)?;
    Ok((PatternStore::normalized(frames)?, shape))
}

pub fn write_norms(dir: &Path, norms: &[f64]) -> Result<()> {
    let path = dir.join(NORMS_FILE);
    let text: String = norms.iter().map(|n| format!("{n}\n")).collect();
    fs::write(&path, text).map_err(|e| Error::io(path, e))
}

pub fn read_norms(dir: &Path) -> Result<Vec<f64>> {
    let path = dir.join(NORMS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut norms = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            let v: f64 = trimmed.parse().map_err(|_| Error::Format {
                path: path.clone(),
                offset,
                reason: format!("not a number: {trimmed:?}"),
            })?;
            norms.push(v);
        }
        offset += line.len();
    }
    Ok(norms)
}

/// Scales a normalized frame back by `norm / √d`.
pub fn denormalize(frame: &FrameVector, norm: f64) -> FrameVector {
    frame.scaled(norm / (frame.dim() as f64).sqrt())
}

/// Writes `frames` as `frame_%06d.<ext>` into `dir`, creating it if needed.
/// With `norms`, each frame is denormalized first.
pub fn export_sequence(
    frames: &[FrameVector],
    shape: FrameShape,
    norms: Option<&[f64]>,
    dir: &Path,
    format: FrameFormat,
) -> Result<Vec<PathBuf>> {
    if let Some(norms) = norms {
        if norms.len() != frames.len() {
            return Err(Error::param(format!(
                "{} norms for {} frames",
                norms.len(),
                frames.len()
            )));
        }
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    frames
        .par_iter()
        .enumerate()
        .map(|(k, frame)| {
            let path = dir.join(frame_file_name(k, format));
            match norms {
                Some(n) => format.save(&denormalize(frame, n[k]), shape, &path)?,
                None => format.save(frame, shape, &path)?,
            }
            Ok(path)
        })
        .collect()
}
