//! Energy functionals over a pattern store and their analytic gradients.
//!
//! Every exp/log-sum is evaluated after shifting by
//! `M = max_k (log K_k + β⟨s, s^(k)⟩)`. At frame sizes of practical interest
//! `β⟨s, s^(k)⟩` is in the hundreds of thousands, so unshifted exponentials
//! overflow immediately.
//!
//! The exponential functional has no such rescue for its *value*: the energy
//! itself is `-exp(M)·(...)`. [`exp_log_magnitude`] returns the log of that
//! positive part; [`general_energy`] with [`Functional::Exp`] fails with
//! [`Error::NonFinite`] once it overflows, which in practice limits it to
//! small `β·d`.
//!
//! Patterns are not required to be normalized here; the retrieval driver
//! and ingestion pipeline take care of that.

use crate::error::{Error, Result};
use crate::kernel::{normalized_weights, GaussianKernel, KernelWeights, TemporalKernel};
use crate::optimizer::Objective;
use crate::params::ModelParams;
use crate::store::PatternStore;
use crate::vector::{check_dims, dot_slices, ordered_sum, squared_distance, FrameVector};

/// Interaction functional `F` applied to each similarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// `F(x) = -exp(x)`, summed with kernel weights.
    Exp,
    /// `-(1/β) log Σ_k K_k exp(β⟨s, s^(k)⟩)`.
    Lse,
}

/// Term-by-term decomposition of the movie energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub regularization: f64,
    pub fidelity: f64,
    pub continuity: f64,
    pub lse: f64,
    pub max_term: f64,
    pub total: f64,
}

/// Weighted softmax over stored patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxProbs {
    pub p: Vec<f64>,
    /// Index of the largest probability (smallest index on ties).
    pub argmax_index: usize,
}

/// Shifted logits `log K_k + β·ip_k` and their maximum.
struct Logits {
    shifted: Vec<f64>,
    peak: f64,
}

impl Logits {
    fn new(inner: &[f64], weights: &[f64], beta: f64) -> Result<Self> {
        let raw: Vec<f64> = inner
            .iter()
            .zip(weights)
            .map(|(ip, w)| {
                if *w > 0.0 {
                    w.ln() + beta * ip
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let peak = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return Err(Error::DegenerateWeights);
        }
        if !peak.is_finite() {
            return Err(Error::NonFinite(format!("log-sum-exp shift is {peak}")));
        }
        let shifted = raw.iter().map(|a| (a - peak).exp()).collect();
        Ok(Self { shifted, peak })
    }

    /// `log Σ_k K_k exp(β ip_k)`.
    fn log_sum(&self) -> f64 {
        self.peak + ordered_sum(&self.shifted).ln()
    }

    fn probabilities(&self) -> Vec<f64> {
        let total = ordered_sum(&self.shifted);
        self.shifted.iter().map(|e| e / total).collect()
    }
}

/// Largest inner product and its index (smallest index wins ties).
fn max_with_index(inner: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (k, v) in inner.iter().enumerate() {
        if *v > inner[best] {
            best = k;
        }
    }
    (best, inner[best])
}

fn check_inputs(s: &[f64], store: &PatternStore, weights: &KernelWeights) -> Result<()> {
    check_dims(store.dim(), s.len())?;
    if weights.len() != store.len() {
        return Err(Error::Dimension {
            expected: store.len(),
            actual: weights.len(),
        });
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::param(format!(
            "beta must be finite and > 0, got {beta}"
        )));
    }
    Ok(())
}

/// Kernel-weighted energy `Σ_k K_k F(β⟨s, s^(k)⟩) + (λ/2)‖s‖²` for the chosen functional.
pub fn general_energy(
    s: &FrameVector,
    store: &PatternStore,
    weights: &KernelWeights,
    functional: Functional,
    beta: f64,
    lambda: f64,
) -> Result<f64> {
    check_inputs(s, store, weights)?;
    check_beta(beta)?;
    let inner = store.inner_products(s);
    let logits = Logits::new(&inner, weights.as_slice(), beta)?;
    let reg = 0.5 * lambda * dot_slices(s, s);
    match functional {
        Functional::Lse => Ok(reg - logits.log_sum() / beta),
        Functional::Exp => {
            let value = reg - logits.log_sum().exp();
            if !value.is_finite() {
                return Err(Error::NonFinite(format!(
                    "exponential energy overflows (log magnitude {})",
                    logits.log_sum()
                )));
            }
            Ok(value)
        }
    }
}

/// `log Σ_k K_k exp(β⟨s, s^(k)⟩)`: the log of the exponential functional's
/// negative part, finite even when the energy itself is not.
pub fn exp_log_magnitude(
    s: &FrameVector,
    store: &PatternStore,
    weights: &KernelWeights,
    beta: f64,
) -> Result<f64> {
    check_inputs(s, store, weights)?;
    check_beta(beta)?;
    let inner = store.inner_products(s);
    Ok(Logits::new(&inner, weights.as_slice(), beta)?.log_sum())
}

/// Gradient of the exponential functional:
/// `-β Σ_k K_k exp(β⟨s, s^(k)⟩) s^(k) + λ s`.
pub fn exp_gradient(
    s: &FrameVector,
    store: &PatternStore,
    weights: &KernelWeights,
    beta: f64,
    lambda: f64,
) -> Result<FrameVector> {
    check_inputs(s, store, weights)?;
    check_beta(beta)?;
    let inner = store.inner_products(s);
    let logits = Logits::new(&inner, weights.as_slice(), beta)?;
    let scale = beta * logits.peak.exp();
    if !scale.is_finite() {
        return Err(Error::NonFinite(format!(
            "exponential gradient overflows (log scale {})",
            logits.peak
        )));
    }
    let mut out = vec![0.0; s.len()];
    store.weighted_sum_into(&logits.shifted, &mut out);
    for (o, x) in out.iter_mut().zip(s.iter()) {
        *o = lambda * x - scale * *o;
    }
    finite_vector(out, "exponential gradient")
}

/// Gradient of the log-sum-exp functional:
/// `-Σ_k p_k s^(k) + λ s` with `p` the weighted softmax.
pub fn lse_gradient(
    s: &FrameVector,
    store: &PatternStore,
    weights: &KernelWeights,
    beta: f64,
    lambda: f64,
) -> Result<FrameVector> {
    check_inputs(s, store, weights)?;
    check_beta(beta)?;
    let inner = store.inner_products(s);
    let p = Logits::new(&inner, weights.as_slice(), beta)?.probabilities();
    let mut out = vec![0.0; s.len()];
    store.weighted_sum_into(&p, &mut out);
    for (o, x) in out.iter_mut().zip(s.iter()) {
        *o = lambda * x - *o;
    }
    finite_vector(out, "log-sum-exp gradient")
}

fn finite_vector(values: Vec<f64>, what: &str) -> Result<FrameVector> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("{what} has non-finite entries")));
    }
    Ok(FrameVector::from_vec_unchecked(values))
}

/// `p_k = K_k exp(β⟨s, s^(k)⟩) / Σ_j K_j exp(β⟨s, s^(j)⟩)`.
pub fn softmax_pk(
    s: &FrameVector,
    store: &PatternStore,
    beta: f64,
    weights: &KernelWeights,
) -> Result<SoftmaxProbs> {
    check_inputs(s, store, weights)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::param(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    let inner = store.inner_products(s);
    let p = Logits::new(&inner, weights.as_slice(), beta)?.probabilities();
    let (argmax_index, _) = max_with_index(&p);
    Ok(SoftmaxProbs { p, argmax_index })
}

/// Everything the movie energy at step `m` needs besides the state.
#[derive(Debug, Clone)]
pub struct MovieObjective<'a> {
    store: &'a PatternStore,
    params: ModelParams,
    weights: KernelWeights,
    target: usize,
    prev: &'a [f64],
}

impl<'a> MovieObjective<'a> {
    /// Gaussian-weighted objective at integer step `m`.
    pub fn new(
        store: &'a PatternStore,
        params: ModelParams,
        m: usize,
        prev: &'a FrameVector,
    ) -> Result<Self> {
        params.validate()?;
        let n = store.len();
        if m >= n {
            return Err(Error::Index { index: m, len: n });
        }
        let weights = normalized_weights(m as f64, n, params.sigma)?;
        Self::with_weights(store, params, m, prev, weights)
    }

    /// Objective with caller-supplied kernel weights (e.g. delta weights).
    pub fn with_weights(
        store: &'a PatternStore,
        params: ModelParams,
        m: usize,
        prev: &'a FrameVector,
        weights: KernelWeights,
    ) -> Result<Self> {
        params.validate()?;
        if m >= store.len() {
            return Err(Error::Index {
                index: m,
                len: store.len(),
            });
        }
        check_dims(store.dim(), prev.dim())?;
        if weights.len() != store.len() {
            return Err(Error::Dimension {
                expected: store.len(),
                actual: weights.len(),
            });
        }
        Ok(Self {
            store,
            params,
            weights,
            target: m,
            prev: prev.as_slice(),
        })
    }

    /// Disables the fidelity and continuity terms (the simplified surface).
    fn simplified(store: &'a PatternStore, params: ModelParams, weights: KernelWeights) -> Self {
        Self {
            store,
            params: ModelParams {
                lambda_f: 0.0,
                mu: 0.0,
                ..params
            },
            weights,
            target: 0,
            prev: &[],
        }
    }

    pub fn weights(&self) -> &KernelWeights {
        &self.weights
    }

    pub fn breakdown(&self, s: &[f64]) -> Result<EnergyBreakdown> {
        check_dims(self.store.dim(), s.len())?;
        let p = &self.params;
        let inner = self.store.inner_products(s);
        let logits = Logits::new(&inner, self.weights.as_slice(), p.beta)?;
        let (_, max_ip) = max_with_index(&inner);

        let regularization = 0.5 * p.lambda * dot_slices(s, s);
        let fidelity = if p.lambda_f != 0.0 {
            p.lambda_f * squared_distance(s, self.store.pattern(self.target))
        } else {
            0.0
        };
        let continuity = if p.mu != 0.0 {
            p.mu * squared_distance(s, self.prev)
        } else {
            0.0
        };
        let lse = -logits.log_sum() / p.beta;
        let max_term = -max_ip;
        let total = regularization + fidelity + continuity + lse + max_term;
        Ok(EnergyBreakdown {
            regularization,
            fidelity,
            continuity,
            lse,
            max_term,
            total,
        })
    }

    /// `λs + 2λ_f(s - s^(m)) + 2μ(s - prev) - Σ_k p_k s^(k) - s^(argmax)`.
    pub fn gradient_into(&self, s: &[f64], out: &mut [f64]) -> Result<()> {
        check_dims(self.store.dim(), s.len())?;
        check_dims(self.store.dim(), out.len())?;
        let p = &self.params;
        let inner = self.store.inner_products(s);
        let mut coeffs = Logits::new(&inner, self.weights.as_slice(), p.beta)?.probabilities();
        let (best, _) = max_with_index(&inner);
        coeffs[best] += 1.0;
        self.store.weighted_sum_into(&coeffs, out);

        let target = self.store.pattern(self.target).as_slice();
        for i in 0..s.len() {
            let mut g = p.lambda * s[i] - out[i];
            if p.lambda_f != 0.0 {
                g += 2.0 * p.lambda_f * (s[i] - target[i]);
            }
            if p.mu != 0.0 {
                g += 2.0 * p.mu * (s[i] - self.prev[i]);
            }
            out[i] = g;
        }
        Ok(())
    }
}

impl Objective for MovieObjective<'_> {
    fn energy(&self, x: &[f64]) -> Result<f64> {
        Ok(self.breakdown(x)?.total)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.gradient_into(x, out)
    }
}

/// Full movie energy at step `m` with Gaussian weights.
///
/// `prev` is the frame retrieved at `m - 1`; pass zeros at `m = 0`.
pub fn movie_energy(
    s: &FrameVector,
    m: usize,
    store: &PatternStore,
    params: &ModelParams,
    prev: &FrameVector,
) -> Result<EnergyBreakdown> {
    MovieObjective::new(store, *params, m, prev)?.breakdown(s)
}

/// Movie energy with explicit kernel weights.
pub fn movie_energy_with_weights(
    s: &FrameVector,
    m: usize,
    store: &PatternStore,
    params: &ModelParams,
    prev: &FrameVector,
    weights: &KernelWeights,
) -> Result<EnergyBreakdown> {
    MovieObjective::with_weights(store, *params, m, prev, weights.clone())?.breakdown(s)
}

pub fn movie_gradient(
    s: &FrameVector,
    m: usize,
    store: &PatternStore,
    params: &ModelParams,
    prev: &FrameVector,
) -> Result<FrameVector> {
    let objective = MovieObjective::new(store, *params, m, prev)?;
    let mut out = vec![0.0; s.len()];
    objective.gradient_into(s, &mut out)?;
    finite_vector(out, "movie gradient")
}

pub fn movie_gradient_with_weights(
    s: &FrameVector,
    m: usize,
    store: &PatternStore,
    params: &ModelParams,
    prev: &FrameVector,
    weights: &KernelWeights,
) -> Result<FrameVector> {
    let objective = MovieObjective::with_weights(store, *params, m, prev, weights.clone())?;
    let mut out = vec![0.0; s.len()];
    objective.gradient_into(s, &mut out)?;
    finite_vector(out, "movie gradient")
}

/// Surface at (possibly fractional) time `t` without fidelity or continuity:
/// `(λ/2)‖s‖² - (1/β) log Σ_k w_k(t) e^{β⟨s, s^(k)⟩} - max_k ⟨s, s^(k)⟩`.
pub fn simplified_energy(
    s: &FrameVector,
    t: f64,
    store: &PatternStore,
    beta: f64,
    lambda: f64,
    sigma: f64,
) -> Result<f64> {
    simplified_objective(store, t, beta, lambda, sigma)?.energy(s)
}

pub fn simplified_gradient(
    s: &FrameVector,
    t: f64,
    store: &PatternStore,
    beta: f64,
    lambda: f64,
    sigma: f64,
) -> Result<FrameVector> {
    let objective = simplified_objective(store, t, beta, lambda, sigma)?;
    let mut out = vec![0.0; s.len()];
    objective.gradient(s, &mut out)?;
    finite_vector(out, "simplified gradient")
}

/// Objective for the simplified surface at time `t`.
pub fn simplified_objective(
    store: &PatternStore,
    t: f64,
    beta: f64,
    lambda: f64,
    sigma: f64,
) -> Result<MovieObjective<'_>> {
    let params = surface_params(beta, lambda, sigma)?;
    let weights = normalized_weights(t, store.len(), sigma)?;
    Ok(MovieObjective::simplified(store, params, weights))
}

fn surface_params(beta: f64, lambda: f64, sigma: f64) -> Result<ModelParams> {
    let params = ModelParams {
        beta,
        lambda,
        lambda_f: 0.0,
        mu: 0.0,
        sigma,
    };
    params.validate()?;
    Ok(params)
}

/// Per-frame weights for the continuous-time surface.
///
/// The integral over `τ ∈ [0, N-1]` is discretized with the trapezoid rule
/// on nodes `τ_j = j·h`. Patterns exist only at integer `τ`, so each node
/// contributes to its nearest frame (split evenly at exact half-way nodes).
/// The result is normalized to sum to one. With `h = 1` this is the
/// discrete Gaussian weighting with half-weighted end frames.
pub fn continuous_weights(
    t: f64,
    n: usize,
    sigma: f64,
    quadrature_step: f64,
) -> Result<KernelWeights> {
    let kernel = GaussianKernel::new(sigma)?;
    if n == 0 {
        return Err(Error::EmptyInput(
            "continuous weights over zero patterns".into(),
        ));
    }
    let span = (n - 1) as f64;
    if !t.is_finite() || t < 0.0 || t > span {
        return Err(Error::param(format!("time {t} outside [0, {span}]")));
    }
    let h = quadrature_step;
    let per_unit = 1.0 / h;
    if !(h > 0.0 && h <= 1.0) || (per_unit - per_unit.round()).abs() > 1e-9 {
        return Err(Error::param(format!(
            "quadrature step must divide 1 evenly, got {h}"
        )));
    }
    let per_unit = per_unit.round() as usize;
    let nodes = (n - 1) * per_unit;

    // (frame, log of node weight) contributions
    let mut contributions = Vec::with_capacity(2 * nodes + 2);
    for j in 0..=nodes {
        let tau = j as f64 / per_unit as f64;
        let trapezoid = if nodes == 0 {
            1.0
        } else if j == 0 || j == nodes {
            0.5 * h
        } else {
            h
        };
        let log_w = trapezoid.ln() + kernel.log_weight(t, tau);
        let below = j / per_unit;
        let rem = j % per_unit;
        if rem == 0 {
            contributions.push((below, log_w));
        } else if 2 * rem == per_unit {
            contributions.push((below, log_w + 0.5f64.ln()));
            contributions.push((below + 1, log_w + 0.5f64.ln()));
        } else if 2 * rem < per_unit {
            contributions.push((below, log_w));
        } else {
            contributions.push((below + 1, log_w));
        }
    }
    let peak = contributions
        .iter()
        .map(|(_, l)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut weights = vec![0.0; n];
    for (k, l) in contributions {
        weights[k] += (l - peak).exp();
    }
    let total = ordered_sum(&weights);
    for w in &mut weights {
        *w /= total;
    }
    KernelWeights::from_raw(weights, t)
}

/// Continuous-time surface at real `t`; see [`continuous_weights`].
pub fn continuous_energy(
    s: &FrameVector,
    t: f64,
    store: &PatternStore,
    beta: f64,
    lambda: f64,
    sigma: f64,
    quadrature_step: f64,
) -> Result<f64> {
    continuous_objective(store, t, beta, lambda, sigma, quadrature_step)?.energy(s)
}

pub fn continuous_gradient(
    s: &FrameVector,
    t: f64,
    store: &PatternStore,
    beta: f64,
    lambda: f64,
    sigma: f64,
    quadrature_step: f64,
) -> Result<FrameVector> {
    let objective = continuous_objective(store, t, beta, lambda, sigma, quadrature_step)?;
    let mut out = vec![0.0; s.len()];
    objective.gradient(s, &mut out)?;
    finite_vector(out, "continuous gradient")
}

pub fn continuous_objective(
    store: &PatternStore,
    t: f64,
    beta: f64,
    lambda: f64,
    sigma: f64,
    quadrature_step: f64,
) -> Result<MovieObjective<'_>> {
    let params = surface_params(beta, lambda, sigma)?;
    let weights = continuous_weights(t, store.len(), sigma, quadrature_step)?;
    Ok(MovieObjective::simplified(store, params, weights))
}
