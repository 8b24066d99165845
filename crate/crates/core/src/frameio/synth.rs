//! Seeded synthetic sequences for tests and benchmarks.
//!
//! Frame 0 holds uniform values in `[0, 1]`. Each later frame adds
//! `drift · sin(ω_i m + φ_i)` per coordinate to a running state, so
//! consecutive frames differ smoothly. A cut replaces the state with a fresh
//! sparse frame: roughly a quarter of its entries are nonzero, which keeps
//! it far from the previous scene after normalization. Output is clamped
//! to `[0, 1]`.

use std::f64::consts::TAU;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{export_sequence, FrameFormat, FrameShape};
use crate::error::{Error, Result};
use crate::store::PatternStore;
use crate::vector::FrameVector;

/// Fraction of nonzero entries in a frame that starts a new scene.
const CUT_DENSITY: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub shape: FrameShape,
    pub n: usize,
    /// Amplitude of the per-step perturbation.
    pub drift: f64,
    /// Frame indices that start a new scene, in `[1, n - 1]`, strictly increasing.
    pub cuts: Vec<usize>,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("synthetic sequence needs n >= 1"));
        }
        if !(self.drift >= 0.0) || !self.drift.is_finite() {
            return Err(Error::param(format!(
                "drift must be >= 0, got {}",
                self.drift
            )));
        }
        FrameShape::new(self.shape.width, self.shape.height, self.shape.channels)?;
        let mut last = 0;
        for &c in &self.cuts {
            if c <= last || c >= self.n {
                return Err(Error::param(format!(
                    "cuts must be strictly increasing within [1, {}], got {:?}",
                    self.n - 1,
                    self.cuts
                )));
            }
            last = c;
        }
        Ok(())
    }
}

/// Frames with values in `[0, 1]`, before normalization.
pub fn synthesize_frames(spec: &SyntheticSpec) -> Result<Vec<FrameVector>> {
    spec.validate()?;
    let d = spec.shape.d();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let omega: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..0.5)).collect();
    let phase: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..TAU)).collect();
    let mut state: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..=1.0)).collect();

    let mut frames = Vec::with_capacity(spec.n);
    let mut next_cut = spec.cuts.iter().peekable();
    for m in 0..spec.n {
        if next_cut.peek() == Some(&&m) {
            next_cut.next();
            state = sparse_frame(&mut rng, d);
        } else if m > 0 {
            for i in 0..d {
                state[i] += spec.drift * (omega[i] * m as f64 + phase[i]).sin();
            }
        }
        frames.push(FrameVector::new(
            state.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        )?);
    }
    Ok(frames)
}

fn sparse_frame(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let mut frame: Vec<f64> = (0..d)
        .map(|_| {
            if rng.gen_bool(CUT_DENSITY) {
                rng.gen_range(0.0..=1.0)
            } else {
                0.0
            }
        })
        .collect();
    if frame.iter().all(|v| *v == 0.0) {
        frame[0] = 1.0;
    }
    frame
}

/// The synthetic sequence as a normalized store.
pub fn synthesize_sequence(spec: &SyntheticSpec) -> Result<PatternStore> {
    PatternStore::normalized(synthesize_frames(spec)?)
}

/// Writes the unnormalized frames to `dir` as `frame_%06d.<ext>`.
pub fn write_synthetic(spec: &SyntheticSpec, dir: &Path, format: FrameFormat) -> Result<()> {
    let frames = synthesize_frames(spec)?;
    export_sequence(&frames, spec.shape, None, dir, format)?;
    Ok(())
}
