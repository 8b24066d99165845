//! Sufficient condition for the target frame to be the global minimizer of
//! the step-`m` surface in the delta-weight limit:
//!
//! ```text
//! λ_f > G(λ_f) = (2λ_f + 2)² (λ/2 + λ_f) / (λ + 2λ_f)^p
//! ```
//!
//! Two published forms disagree on the exponent `p` (3 or 2); both are
//! available through [`ConditionVariant`].

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Denominator exponent of `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConditionVariant {
    Squared,
    #[default]
    Cubed,
}

impl ConditionVariant {
    pub fn exponent(self) -> i32 {
        match self {
            ConditionVariant::Squared => 2,
            ConditionVariant::Cubed => 3,
        }
    }

    pub fn from_exponent(exponent: u32) -> Result<Self> {
        match exponent {
            2 => Ok(ConditionVariant::Squared),
            3 => Ok(ConditionVariant::Cubed),
            other => Err(Error::param(format!(
                "condition exponent must be 2 or 3, got {other}"
            ))),
        }
    }
}

pub fn g_of_lambda_f(lambda_f: f64, lambda: f64, variant: ConditionVariant) -> Result<f64> {
    let denom_base = lambda + 2.0 * lambda_f;
    if !(denom_base > 0.0) || !lambda_f.is_finite() || !lambda.is_finite() {
        return Err(Error::param(format!(
            "G undefined for lambda = {lambda}, lambda_f = {lambda_f}"
        )));
    }
    let lead = 2.0 * lambda_f + 2.0;
    Ok(lead * lead * (0.5 * lambda + lambda_f) / denom_base.powi(variant.exponent()))
}

/// `λ_f > G(λ_f)`.
pub fn check_condition(lambda_f: f64, lambda: f64, variant: ConditionVariant) -> Result<bool> {
    Ok(lambda_f > g_of_lambda_f(lambda_f, lambda, variant)?)
}

pub const CROSSING_BRACKET: (f64, f64) = (1e-6, 1e6);

/// Smallest `λ_f` in [`CROSSING_BRACKET`] at which `λ_f ≥ G(λ_f)`.
///
/// A log-spaced scan locates the first sign change of `λ_f - G(λ_f)`, which
/// bisection then refines to an absolute width of `1e-9`.
pub fn critical_lambda_f(lambda: f64, variant: ConditionVariant) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!(
            "lambda must be finite and >= 0, got {lambda}"
        )));
    }
    let excess = |x: f64| -> Result<f64> { Ok(x - g_of_lambda_f(x, lambda, variant)?) };
    let (lo_bound, hi_bound) = CROSSING_BRACKET;
    if excess(lo_bound)? >= 0.0 {
        return Ok(lo_bound);
    }

    const SCAN: usize = 4000;
    let ratio = (hi_bound / lo_bound).powf(1.0 / SCAN as f64);
    let mut lo = lo_bound;
    let mut hi = None;
    for i in 1..=SCAN {
        let x = if i == SCAN {
            hi_bound
        } else {
            lo_bound * ratio.powi(i as i32)
        };
        if excess(x)? >= 0.0 {
            hi = Some(x);
            break;
        }
        lo = x;
    }
    let Some(mut hi) = hi else {
        return Err(Error::NoCrossing {
            lambda,
            lo: lo_bound,
            hi: hi_bound,
        });
    };
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One row of the `G(λ_f)` table; `identity` is the reference line `G = λ_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure1Row {
    pub lambda: f64,
    pub lambda_f: f64,
    pub g: f64,
    pub identity: f64,
}

/// `G(λ_f)` over the product of both grids, ordered by λ then λ_f.
pub fn figure1_data(
    lambdas: &[f64],
    lambda_f_grid: &[f64],
    variant: ConditionVariant,
) -> Result<Vec<Figure1Row>> {
    if lambdas.is_empty() || lambda_f_grid.is_empty() {
        return Err(Error::EmptyInput("figure grid".into()));
    }
    let mut rows = Vec::with_capacity(lambdas.len() * lambda_f_grid.len());
    for &lambda in lambdas {
        for &lambda_f in lambda_f_grid {
            if !(lambda_f > 0.0) {
                return Err(Error::param(format!(
                    "lambda_f must be > 0, got {lambda_f}"
                )));
            }
            rows.push(Figure1Row {
                lambda,
                lambda_f,
                g: g_of_lambda_f(lambda_f, lambda, variant)?,
                identity: lambda_f,
            });
        }
    }
    Ok(rows)
}

pub fn figure1_csv(rows: &[Figure1Row]) -> String {
    let mut out = String::from("lambda,lambda_f,G,identity\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.lambda, r.lambda_f, r.g, r.identity
        ));
    }
    out
}

/// Pieces of the lower-bound argument behind the condition.
///
/// For any `s` with `‖s‖ = t`, normalized patterns and delta weights,
/// `E(s, m) ≥ f(t) + λ_f d` with
/// `f(t) = (λ/2 + λ_f) t² - (2λ_f + 2)√d t`. Comparing against
/// `E(s^(m), m) = λd/2 + 2μd - 2d` (orthogonal consecutive frames) gives the
/// energy-gap bound returned here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEBound {
    /// `f(t)`.
    pub quadratic: f64,
    /// Lower bound on `E(s, m)` over `‖s‖ = t`.
    pub energy_lower_bound: f64,
    /// Energy at the target frame.
    pub target_energy: f64,
    /// Lower bound on `E(s, m) - E(s^(m), m)`.
    pub delta_e: f64,
}

pub fn delta_e_lower_bound(t: f64, d: usize, params: &ModelParams) -> DeltaEBound {
    let d = d as f64;
    let ModelParams {
        lambda,
        lambda_f,
        mu,
        ..
    } = *params;
    let quadratic = (0.5 * lambda + lambda_f) * t * t - (2.0 * lambda_f + 2.0) * d.sqrt() * t;
    let energy_lower_bound = quadratic + lambda_f * d;
    let target_energy = 0.5 * lambda * d + 2.0 * mu * d - 2.0 * d;
    DeltaEBound {
        quadratic,
        energy_lower_bound,
        target_energy,
        delta_e: energy_lower_bound - target_energy,
    }
}

/// `t₀ = (2λ_f + 2)√d / (λ + 2λ_f)`, the minimizer of `f(t)`.
pub fn bound_minimizer(d: usize, params: &ModelParams) -> f64 {
    (2.0 * params.lambda_f + 2.0) * (d as f64).sqrt() / (params.lambda + 2.0 * params.lambda_f)
}

/// Right-hand side of the condition before its simplification:
/// `G₂(λ_f) + λ/2 - 2 + 2μ`, where `G₂` is the squared-denominator form.
pub fn intermediate_condition_rhs(params: &ModelParams) -> Result<f64> {
    Ok(
        g_of_lambda_f(params.lambda_f, params.lambda, ConditionVariant::Squared)?
            + 0.5 * params.lambda
            - 2.0
            + 2.0 * params.mu,
    )
}
