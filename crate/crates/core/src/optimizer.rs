//! Gradient-based minimization and gradient-flow integration.
//!
//! [`minimize`] runs steepest descent `s ← s - α∇E(s)`, either with a fixed
//! step or with Armijo backtracking. [`gradient_flow`] integrates
//! `ds/dt = -∇E(s, t)` with explicit Euler steps.

use crate::error::{Error, Result};
use crate::vector::{inf_norm, FrameVector};

/// Anything that can report an energy and its gradient at a point.
pub trait Objective {
    fn energy(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Adapts a pair of closures to [`Objective`].
pub struct FnObjective<E, G> {
    energy: E,
    gradient: G,
}

impl<E, G> FnObjective<E, G>
where
    E: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    pub fn new(energy: E, gradient: G) -> Self {
        Self { energy, gradient }
    }
}

impl<E, G> Objective for FnObjective<E, G>
where
    E: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    fn energy(&self, x: &[f64]) -> Result<f64> {
        Ok((self.energy)(x))
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        (self.gradient)(x, out);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    /// Fixed step in plain descent; first trial step with line search.
    pub step_size: f64,
    /// Stop once `‖∇E‖_∞` or `‖Δs‖_∞` falls to this value.
    pub tol: f64,
    pub max_iters: usize,
    pub line_search: bool,
    pub backtrack_factor: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo_c: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            step_size: 1.0,
            tol: 1e-5,
            max_iters: 500,
            line_search: true,
            backtrack_factor: 0.5,
            armijo_c: 1e-4,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::param("step_size must be finite and > 0"));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::param("tol must be finite and > 0"));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be positive"));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::param("backtrack_factor must lie in (0, 1)"));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::param("armijo_c must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Why [`minimize`] stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GradientTolerance,
    StepTolerance,
    MaxIterations,
    /// No step satisfying the Armijo test was found.
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    pub x_star: FrameVector,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Energy at the start point and after every accepted step.
    pub energy_trace: Vec<f64>,
    /// `‖∇E‖_∞` at `x_star`.
    pub final_grad_norm: f64,
}

/// Halvings tried before a line search gives up.
const MAX_BACKTRACKS: usize = 80;

fn numerics(iteration: usize, reason: impl Into<String>) -> Error {
    Error::Numerics {
        iteration,
        reason: reason.into(),
        frame: None,
    }
}

/// Minimizes `objective` from `x0` by steepest descent.
pub fn minimize<O: Objective + ?Sized>(
    objective: &O,
    x0: &FrameVector,
    settings: &OptimizerSettings,
) -> Result<MinimizeResult> {
    settings.validate()?;
    let d = x0.dim();
    let mut x = x0.as_slice().to_vec();
    let mut grad = vec![0.0; d];
    let mut trial = vec![0.0; d];

    let mut energy = objective.energy(&x)?;
    if !energy.is_finite() {
        return Err(numerics(
            0,
            format!("energy is {energy} at the start point"),
        ));
    }
    objective.gradient(&x, &mut grad)?;
    check_gradient(&grad, 0)?;
    let mut trace = vec![energy];
    let mut iterations = 0;

    let stop_reason = loop {
        let grad_norm = inf_norm(&grad);
        if grad_norm <= settings.tol {
            break StopReason::GradientTolerance;
        }
        if iterations >= settings.max_iters {
            break StopReason::MaxIterations;
        }
        iterations += 1;

        let mut step = settings.step_size;
        let accepted = if settings.line_search {
            let slope = grad.iter().map(|g| g * g).sum::<f64>();
            let mut found = None;
            for _ in 0..MAX_BACKTRACKS {
                for i in 0..d {
                    trial[i] = x[i] - step * grad[i];
                }
                let candidate = objective.energy(&trial)?;
                if candidate.is_finite() && candidate <= energy - settings.armijo_c * step * slope {
                    found = Some(candidate);
                    break;
                }
                step *= settings.backtrack_factor;
            }
            found
        } else {
            for i in 0..d {
                trial[i] = x[i] - step * grad[i];
            }
            let candidate = objective.energy(&trial)?;
            if !candidate.is_finite() {
                return Err(numerics(iterations, format!("energy is {candidate}")));
            }
            Some(candidate)
        };

        let Some(new_energy) = accepted else {
            break StopReason::LineSearchFailed;
        };
        std::mem::swap(&mut x, &mut trial);
        energy = new_energy;
        trace.push(energy);
        objective.gradient(&x, &mut grad)?;
        check_gradient(&grad, iterations)?;

        if step * grad_norm <= settings.tol {
            break StopReason::StepTolerance;
        }
    };

    let converged = matches!(
        stop_reason,
        StopReason::GradientTolerance | StopReason::StepTolerance
    );
    Ok(MinimizeResult {
        x_star: FrameVector::from_vec_unchecked(x),
        iterations,
        converged,
        stop_reason,
        energy_trace: trace,
        final_grad_norm: inf_norm(&grad),
    })
}

fn check_gradient(grad: &[f64], iteration: usize) -> Result<()> {
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(numerics(
            iteration,
            format!("gradient entry {i} is {}", grad[i]),
        ));
    }
    Ok(())
}

/// One sample of a gradient-flow trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPoint {
    pub t: f64,
    pub state: FrameVector,
}

/// Integrates `ds/dt = -∇E(s, t)` from `t0` to `t1` with explicit Euler steps.
///
/// `grad` writes `∇E(s, t)` into its output buffer. The final step is
/// shortened so the trajectory ends exactly at `t1`. Every step is returned,
/// starting with `(t0, x0)`.
pub fn gradient_flow<G>(
    mut grad: G,
    x0: &FrameVector,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Vec<FlowPoint>>
where
    G: FnMut(&[f64], f64, &mut [f64]) -> Result<()>,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param(format!("dt must be finite and > 0, got {dt}")));
    }
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::param(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    let span = t1 - t0;
    let steps = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut x = x0.as_slice().to_vec();
    let mut g = vec![0.0; x.len()];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(FlowPoint {
        t: t0,
        state: x0.clone(),
    });
    for i in 0..steps {
        let t = t0 + i as f64 * dt;
        let t_next = if i + 1 == steps {
            t1
        } else {
            t0 + (i + 1) as f64 * dt
        };
        grad(&x, t, &mut g)?;
        let h = t_next - t;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= h * gi;
        }
        if let Some(j) = x.iter().position(|v| !v.is_finite()) {
            return Err(numerics(i + 1, format!("state entry {j} is {}", x[j])));
        }
        out.push(FlowPoint {
            t: t_next,
            state: FrameVector::from_vec_unchecked(x.clone()),
        });
    }
    Ok(out)
}
