//! Dense frame vectors and the fixed-order reductions everything else builds on.
//!
//! All sums run left to right over the index range so that energies are
//! bit-identical regardless of how many worker threads are active.

use std::ops::{Deref, Index};

use crate::error::{Error, Result};

/// A dense state or stored pattern of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameVector {
    values: Vec<f64>,
}

impl FrameVector {
    /// Builds a frame, rejecting empty input and non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("frame vector with d = 0".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "frame entry {i} is {}",
                values[i]
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d > 0, "frame dimension must be positive");
        Self {
            values: vec![0.0; d],
        }
    }

    /// Wraps values already known to be finite (optimizer output, loaders).
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn norm_squared(&self) -> f64 {
        dot_slices(&self.values, &self.values)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

impl Deref for FrameVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl Index<usize> for FrameVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl TryFrom<Vec<f64>> for FrameVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

pub(crate) fn check_dims(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::Dimension { expected, actual });
    }
    Ok(())
}

/// Inner product `Σ a_i b_i`.
pub fn dot(a: &FrameVector, b: &FrameVector) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(dot_slices(a, b))
}

/// Sequential left-to-right dot product; callers guarantee equal lengths.
#[inline]
pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

/// Sum in index order.
#[inline]
pub(crate) fn ordered_sum(values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for v in values {
        acc += v;
    }
    acc
}

pub(crate) fn inf_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Rescales `v` to Euclidean norm `√d`, so that `‖v‖² = d`.
pub fn normalize_frame(v: &FrameVector) -> Result<FrameVector> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let d = v.dim() as f64;
    Ok(v.scaled(d.sqrt() / norm))
}
