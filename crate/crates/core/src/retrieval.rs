//! Sequential playback: minimize the time-`m` surface for `m = 0..N-1`,
//! warm-starting each step from the frame retrieved at the previous one.

use std::time::Instant;

use crate::energy::MovieObjective;
use crate::error::{Error, Result};
use crate::optimizer::{minimize, OptimizerSettings};
use crate::params::ModelParams;
use crate::store::PatternStore;
use crate::vector::{check_dims, squared_distance, FrameVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalConfig {
    pub params: ModelParams,
    pub optimizer: OptimizerSettings,
    /// Frames with `MSE_k` strictly below this count as retrieved.
    pub mse_threshold: f64,
    /// Consecutive stored frames farther apart than this count as a scene change.
    pub scene_mse_threshold: f64,
    pub record_energy_traces: bool,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            optimizer: OptimizerSettings::default(),
            mse_threshold: 0.05,
            scene_mse_threshold: 0.5,
            record_energy_traces: false,
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.optimizer.validate()?;
        if !(self.mse_threshold > 0.0) || !(self.scene_mse_threshold > 0.0) {
            return Err(Error::param("thresholds must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalReport {
    pub mse: Vec<f64>,
    /// Percentage of frames with `MSE_k < mse_threshold`.
    pub eta: f64,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    pub energy_final: Vec<f64>,
    /// Per-frame energy traces, when requested.
    pub energy_traces: Option<Vec<Vec<f64>>>,
    pub scene_changes: usize,
    pub wall_time_s: f64,
}

/// `(1/d) ‖original - retrieved‖²`.
pub fn mse_k(original: &FrameVector, retrieved: &FrameVector) -> Result<f64> {
    check_dims(original.dim(), retrieved.dim())?;
    Ok(squared_distance(original, retrieved) / original.dim() as f64)
}

/// Percentage of entries strictly below `threshold`.
pub fn accuracy_eta(mse: &[f64], threshold: f64) -> Result<f64> {
    if mse.is_empty() {
        return Err(Error::EmptyInput("no frames to score".into()));
    }
    if !(threshold > 0.0) {
        return Err(Error::param(format!(
            "threshold must be > 0, got {threshold}"
        )));
    }
    let hits = mse.iter().filter(|v| **v < threshold).count();
    Ok(100.0 * hits as f64 / mse.len() as f64)
}

/// Number of `k ≥ 1` with `MSE(s^(k-1), s^(k)) > threshold`.
pub fn count_scene_changes(store: &PatternStore, scene_mse_threshold: f64) -> usize {
    let d = store.dim() as f64;
    store
        .patterns()
        .windows(2)
        .filter(|pair| squared_distance(&pair[0], &pair[1]) / d > scene_mse_threshold)
        .count()
}

/// Result of minimizing one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub frame: FrameVector,
    pub iterations: usize,
    pub converged: bool,
    pub energy_trace: Vec<f64>,
}

/// Minimizes the step-`m` surface starting from `prev` (the frame retrieved
/// at `m - 1`, or zeros at `m = 0`), which also anchors the continuity term.
pub fn retrieve_step(
    store: &PatternStore,
    config: &RetrievalConfig,
    m: usize,
    prev: &FrameVector,
) -> Result<StepOutcome> {
    let objective = MovieObjective::new(store, config.params, m, prev)?;
    let result = minimize(&objective, prev, &config.optimizer).map_err(|e| match e {
        Error::Numerics {
            iteration, reason, ..
        } => Error::Numerics {
            iteration,
            reason,
            frame: Some(m),
        },
        other => other,
    })?;
    Ok(StepOutcome {
        frame: result.x_star,
        iterations: result.iterations,
        converged: result.converged,
        energy_trace: result.energy_trace,
    })
}

/// Retrieves every frame in order and scores the result.
pub fn retrieve_sequence(
    store: &PatternStore,
    config: &RetrievalConfig,
) -> Result<(Vec<FrameVector>, RetrievalReport)> {
    config.validate()?;
    let start = Instant::now();
    let n = store.len();
    let mut retrieved: Vec<FrameVector> = Vec::with_capacity(n);
    let mut iterations = Vec::with_capacity(n);
    let mut converged = Vec::with_capacity(n);
    let mut energy_final = Vec::with_capacity(n);
    let mut traces = config.record_energy_traces.then(Vec::new);

    let zero = FrameVector::zeros(store.dim());
    for m in 0..n {
        let prev = retrieved.last().unwrap_or(&zero);
        let step = retrieve_step(store, config, m, prev)?;
        iterations.push(step.iterations);
        converged.push(step.converged);
        energy_final.push(
            *step
                .energy_trace
                .last()
                .expect("trace holds the start energy"),
        );
        if let Some(t) = traces.as_mut() {
            t.push(step.energy_trace);
        }
        retrieved.push(step.frame);
    }

    let mse = store
        .iter()
        .zip(&retrieved)
        .map(|(s, f)| mse_k(s, f))
        .collect::<Result<Vec<_>>>()?;
    let eta = accuracy_eta(&mse, config.mse_threshold)?;
    let report = RetrievalReport {
        eta,
        mse,
        iterations,
        converged,
        energy_final,
        energy_traces: traces,
        scene_changes: count_scene_changes(store, config.scene_mse_threshold),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((retrieved, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::normalize_frame;

    fn fv(values: &[f64]) -> FrameVector {
        FrameVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn mse_examples() {
        let a = fv(&[0.3, 0.7]);
        assert_eq!(mse_k(&a, &a).unwrap(), 0.0);
        assert_eq!(mse_k(&fv(&[1.0, 1.0]), &fv(&[0.0, 0.0])).unwrap(), 1.0);
        for d in [2usize, 6, 50] {
            let mut x = vec![0.0; d];
            let mut y = vec![0.0; d];
            x[0] = 1.0;
            y[d - 1] = 1.0;
            let x = normalize_frame(&fv(&x)).unwrap();
            let y = normalize_frame(&fv(&y)).unwrap();
            assert!((mse_k(&x, &y).unwrap() - 2.0).abs() < 1e-12);
        }
        assert!(matches!(
            mse_k(&a, &fv(&[1.0])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn eta_examples() {
        assert_eq!(accuracy_eta(&[0.0, 0.0, 0.0], 0.05).unwrap(), 100.0);
        assert_eq!(accuracy_eta(&[0.04, 0.06], 0.05).unwrap(), 50.0);
        assert_eq!(accuracy_eta(&[0.05], 0.05).unwrap(), 0.0);
        assert!(matches!(accuracy_eta(&[], 0.05), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn eta_non_increasing_as_threshold_tightens() {
        let mse = [0.001, 0.02, 0.03, 0.2, 0.049, 1.5];
        let mut last = 100.0;
        for th in [10.0, 1.0, 0.1, 0.05, 0.03, 0.01, 1e-4] {
            let eta = accuracy_eta(&mse, th).unwrap();
            assert!(eta <= last);
            last = eta;
        }
    }

    fn cut_store() -> PatternStore {
        let a = fv(&[1.0, 1.0, 0.0, 0.0]);
        let b = fv(&[0.0, 0.0, 1.0, 1.0]);
        PatternStore::normalized(vec![a.clone(), a.clone(), a, b.clone(), b]).unwrap()
    }

    #[test]
    fn scene_change_examples() {
        let a = fv(&[0.2, 0.4, 0.6]);
        let constant = PatternStore::normalized(vec![a.clone(), a.clone(), a]).unwrap();
        assert_eq!(count_scene_changes(&constant, 0.5), 0);
        assert_eq!(count_scene_changes(&cut_store(), 0.5), 1);
        let varying = PatternStore::normalized(vec![
            fv(&[1.0, 0.0, 0.0]),
            fv(&[1.0, 0.01, 0.0]),
            fv(&[1.0, 0.01, 0.0]),
            fv(&[1.0, 0.02, 0.0]),
        ])
        .unwrap();
        assert_eq!(count_scene_changes(&varying, 0.0), 2);
    }

    #[test]
    fn single_frame_retrieval() {
        let store = PatternStore::normalized(vec![fv(&[0.1, 0.5, 0.9, 0.3, 0.7, 0.2])]).unwrap();
        let config = RetrievalConfig {
            params: ModelParams {
                beta: 1.0,
                sigma: 2.0,
                lambda: 0.01,
                lambda_f: 500.0,
                mu: 0.001,
            },
            ..Default::default()
        };
        let (frames, report) = retrieve_sequence(&store, &config).unwrap();
        assert_eq!(frames.len(), 1);
        assert!(report.mse[0] < 1e-4, "{}", report.mse[0]);
        assert_eq!(report.eta, 100.0);
    }

    #[test]
    fn hard_cut_is_still_retrieved() {
        let store = cut_store();
        let (_, report) = retrieve_sequence(&store, &RetrievalConfig::default()).unwrap();
        assert_eq!(report.eta, 100.0);
        assert_eq!(report.scene_changes, 1);
        assert!(report.mse.iter().all(|v| *v < 1e-4));
        assert_eq!(report.eta, accuracy_eta(&report.mse, 0.05).unwrap());
    }

    #[test]
    fn warm_start_chain_is_replayable() {
        let store = cut_store();
        let config = RetrievalConfig {
            record_energy_traces: true,
            ..Default::default()
        };
        let (frames, report) = retrieve_sequence(&store, &config).unwrap();
        let traces = report.energy_traces.as_ref().unwrap();
        for m in 1..store.len() {
            let again = retrieve_step(&store, &config, m, &frames[m - 1]).unwrap();
            assert_eq!(again.frame, frames[m]);
            assert_eq!(&again.energy_trace, &traces[m]);
            assert!(again.energy_trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn numerics_errors_carry_the_frame_index() {
        let store = cut_store();
        let config = RetrievalConfig {
            optimizer: OptimizerSettings {
                step_size: 1e200,
                line_search: false,
                ..Default::default()
            },
            ..Default::default()
        };
        let err = retrieve_sequence(&store, &config).unwrap_err();
        assert!(
            matches!(err, Error::Numerics { frame: Some(0), .. }),
            "{err:?}"
        );
    }
}
