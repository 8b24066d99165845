use crate::error::{Error, Result};

/// Scalar hyperparameters of the movie energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Sharpness of the log-sum-exp term.
    pub beta: f64,
    /// Weight of the `‖s‖²/2` regularizer.
    pub lambda: f64,
    /// Fidelity strength toward the target frame.
    pub lambda_f: f64,
    /// Continuity strength toward the previously retrieved frame.
    pub mu: f64,
    /// Temporal kernel width.
    pub sigma: f64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.beta, self.lambda, self.lambda_f, self.mu, self.sigma];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("model parameters must be finite"));
        }
        if self.beta <= 0.0 {
            return Err(Error::param(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.sigma <= 0.0 {
            return Err(Error::param(format!(
                "sigma must be > 0, got {}",
                self.sigma
            )));
        }
        if self.lambda < 0.0 || self.lambda_f < 0.0 || self.mu < 0.0 {
            return Err(Error::param("lambda, lambda_f and mu must be >= 0"));
        }
        Ok(())
    }
}

impl Default for ModelParams {
    /// The trial configuration used for the movie-clip experiments.
    fn default() -> Self {
        Self {
            beta: 1.0,
            lambda: 0.01,
            lambda_f: 500.0,
            mu: 0.001,
            sigma: 2.0,
        }
    }
}
