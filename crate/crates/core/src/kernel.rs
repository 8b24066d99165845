//! Temporal kernels coupling the current time step to stored pattern indices.
//!
//! The Gaussian kernel `K(m, k) = exp(-(m - k)² / 2σ²)` is the only kernel
//! shipped. [`TemporalKernel`] is the extension point for others.

use crate::error::{Error, Result};
use crate::vector::ordered_sum;

/// A nonnegative weight over pattern indices, evaluated in the log domain.
pub trait TemporalKernel {
    /// `log K(m, k)`; may be `-inf` for zero weight.
    fn log_weight(&self, m: f64, k: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    sigma: f64,
}

impl GaussianKernel {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::param(format!(
                "sigma must be finite and > 0, got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl TemporalKernel for GaussianKernel {
    fn log_weight(&self, m: f64, k: f64) -> f64 {
        let diff = m - k;
        -(diff * diff) / (2.0 * self.sigma * self.sigma)
    }
}

/// Normalized weights `w_k(m)` over `N` patterns, centered at `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelWeights {
    weights: Vec<f64>,
    center: f64,
}

impl KernelWeights {
    /// Wraps caller-provided weights; entries must be finite and nonnegative
    /// with a positive sum. They are not renormalized.
    pub fn from_raw(weights: Vec<f64>, center: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("kernel weights".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::param("kernel weights must be finite and >= 0"));
        }
        if weights.iter().all(|w| *w == 0.0) {
            return Err(Error::DegenerateWeights);
        }
        Ok(Self { weights, center })
    }

    /// Equal weight `1/N` on every pattern.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("kernel weights".into()));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
            center: (n - 1) as f64 / 2.0,
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn sum(&self) -> f64 {
        ordered_sum(&self.weights)
    }

    /// Index of the largest weight (smallest index on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = k;
            }
        }
        best
    }
}

/// Unnormalized Gaussian kernel value `exp(-(m - k)² / 2σ²)`.
pub fn raw_kernel(m: f64, k: usize, sigma: f64) -> Result<f64> {
    let kernel = GaussianKernel::new(sigma)?;
    Ok(kernel.log_weight(m, k as f64).exp())
}

/// Gaussian weights over `0..n` centered at `m`, normalized to sum to one.
///
/// `m` may be fractional. Weights are computed relative to the largest one
/// before exponentiating, so the nearest pattern never underflows; far
/// patterns whose relative weight underflows are exactly zero.
pub fn normalized_weights(m: f64, n: usize, sigma: f64) -> Result<KernelWeights> {
    normalized_weights_with(&GaussianKernel::new(sigma)?, m, n)
}

pub fn normalized_weights_with<K: TemporalKernel>(
    kernel: &K,
    m: f64,
    n: usize,
) -> Result<KernelWeights> {
    if n == 0 {
        return Err(Error::EmptyInput(
            "kernel weights over zero patterns".into(),
        ));
    }
    if !m.is_finite() || m < 0.0 || m > (n - 1) as f64 {
        return Err(Error::param(format!("time {m} outside [0, {}]", n - 1)));
    }
    let logs: Vec<f64> = (0..n).map(|k| kernel.log_weight(m, k as f64)).collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::DegenerateWeights);
    }
    let mut weights: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
    let total = ordered_sum(&weights);
    for w in &mut weights {
        *w /= total;
    }
    Ok(KernelWeights { weights, center: m })
}

/// One-hot weights at integer time `m`: the `σ → 0` limit.
pub fn delta_weights(m: usize, n: usize) -> Result<KernelWeights> {
    if m >= n {
        return Err(Error::Index { index: m, len: n });
    }
    let mut weights = vec![0.0; n];
    weights[m] = 1.0;
    Ok(KernelWeights {
        weights,
        center: m as f64,
    })
}
