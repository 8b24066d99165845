//! Ordered, immutable collection of stored patterns.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::vector::{check_dims, dot_slices, normalize_frame, FrameVector};

/// Below this many multiply-adds, inner products run on the calling thread.
const PARALLEL_WORK_THRESHOLD: usize = 1 << 16;

/// Patterns `s^(0) .. s^(N-1)` ordered by time index.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternStore {
    patterns: Vec<FrameVector>,
    dim: usize,
    normalized: bool,
    /// Norms of the frames before normalization, if the store normalized them.
    source_norms: Option<Vec<f64>>,
}

impl PatternStore {
    /// Stores the patterns verbatim (no normalization).
    pub fn new(patterns: Vec<FrameVector>) -> Result<Self> {
        let dim = Self::common_dim(&patterns)?;
        Ok(Self {
            patterns,
            dim,
            normalized: false,
            source_norms: None,
        })
    }

    /// Normalizes every pattern to `‖s‖ = √d`, remembering the original norms.
    pub fn normalized(patterns: Vec<FrameVector>) -> Result<Self> {
        let dim = Self::common_dim(&patterns)?;
        let norms: Vec<f64> = patterns.iter().map(FrameVector::norm).collect();
        let patterns = patterns
            .iter()
            .map(normalize_frame)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            patterns,
            dim,
            normalized: true,
            source_norms: Some(norms),
        })
    }

    fn common_dim(patterns: &[FrameVector]) -> Result<usize> {
        let first = patterns
            .first()
            .ok_or_else(|| Error::EmptyInput("pattern store needs at least one pattern".into()))?;
        let dim = first.dim();
        for p in patterns {
            check_dims(dim, p.dim())?;
        }
        Ok(dim)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn source_norms(&self) -> Option<&[f64]> {
        self.source_norms.as_deref()
    }

    pub fn pattern(&self, k: usize) -> &FrameVector {
        &self.patterns[k]
    }

    pub fn get(&self, k: usize) -> Result<&FrameVector> {
        self.patterns.get(k).ok_or(Error::Index {
            index: k,
            len: self.len(),
        })
    }

    pub fn patterns(&self) -> &[FrameVector] {
        &self.patterns
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FrameVector> {
        self.patterns.iter()
    }

    /// Selects patterns `start .. start + count` (0-based), keeping normalization metadata.
    pub fn window(&self, start: usize, count: usize) -> Result<Self> {
        if count == 0 || start + count > self.len() {
            return Err(Error::Window {
                p: start + 1,
                n: count,
                available: self.len(),
            });
        }
        Ok(Self {
            patterns: self.patterns[start..start + count].to_vec(),
            dim: self.dim,
            normalized: self.normalized,
            source_norms: self
                .source_norms
                .as_ref()
                .map(|n| n[start..start + count].to_vec()),
        })
    }

    /// `⟨s, s^(k)⟩` for every k, in pattern order.
    ///
    /// Each product is a sequential reduction; only the loop over k may be
    /// spread across threads, so the result does not depend on thread count.
    pub(crate) fn inner_products(&self, s: &[f64]) -> Vec<f64> {
        debug_assert_eq!(s.len(), self.dim);
        if self.len() * self.dim >= PARALLEL_WORK_THRESHOLD && self.len() > 1 {
            self.patterns.par_iter().map(|p| dot_slices(s, p)).collect()
        } else {
            self.patterns.iter().map(|p| dot_slices(s, p)).collect()
        }
    }

    /// Writes `Σ_k coeffs[k] · s^(k)` into `out`, summing over k in order per coordinate.
    pub(crate) fn weighted_sum_into(&self, coeffs: &[f64], out: &mut [f64]) {
        debug_assert_eq!(coeffs.len(), self.len());
        debug_assert_eq!(out.len(), self.dim);
        let active: Vec<(usize, f64)> = coeffs
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, c)| c != 0.0)
            .collect();
        let fill = |offset: usize, chunk: &mut [f64]| {
            chunk.iter_mut().for_each(|v| *v = 0.0);
            for &(k, c) in &active {
                let src = &self.patterns[k].as_slice()[offset..offset + chunk.len()];
                for (o, x) in chunk.iter_mut().zip(src) {
                    *o += c * x;
                }
            }
        };
        const CHUNK: usize = 4096;
        if active.len() * self.dim >= PARALLEL_WORK_THRESHOLD && self.dim > CHUNK {
            out.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(i, chunk)| fill(i * CHUNK, chunk));
        } else {
            fill(0, out);
        }
    }
}
