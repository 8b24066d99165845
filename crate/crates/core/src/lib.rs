//! Sequential retrieval of frame sequences with a time-indexed dense
//! associative memory.
//!
//! Frames are stored as patterns `s^(0) .. s^(N-1)` normalized to `‖s‖ = √d`.
//! At step `m` the state minimizes
//!
//! ```text
//! E(s, m) = (λ/2)‖s‖² + λ_f‖s - s^(m)‖² + μ‖s - f^(m-1)‖²
//!           - (1/β) log Σ_k w_k(m) exp(β⟨s, s^(k)⟩) - max_k ⟨s, s^(k)⟩
//! ```
//!
//! where `w(m)` is a normalized Gaussian kernel over pattern indices and
//! `f^(m-1)` the frame retrieved at the previous step.
//!
//! ```
//! use seqhop::{retrieve_sequence, FrameVector, PatternStore, RetrievalConfig};
//!
//! let frames = vec![
//!     FrameVector::new(vec![0.9, 0.1, 0.2, 0.4]).unwrap(),
//!     FrameVector::new(vec![0.1, 0.8, 0.7, 0.0]).unwrap(),
//! ];
//! let store = PatternStore::normalized(frames).unwrap();
//! let (_retrieved, report) = retrieve_sequence(&store, &RetrievalConfig::default()).unwrap();
//! assert_eq!(report.eta, 100.0);
//! ```

pub mod analysis;
pub mod energy;
pub mod error;
pub mod frameio;
pub mod kernel;
pub mod optimizer;
pub mod params;
pub mod retrieval;
pub mod store;
pub mod vector;

pub use energy::{
    movie_energy, movie_gradient, simplified_energy, simplified_gradient, Functional,
    MovieObjective,
};
pub use error::{Error, Result};
pub use kernel::{delta_weights, normalized_weights, KernelWeights};
pub use optimizer::{minimize, MinimizeResult, Objective, OptimizerSettings, StopReason};
pub use params::ModelParams;
pub use retrieval::{retrieve_sequence, RetrievalConfig, RetrievalReport};
pub use store::PatternStore;
pub use vector::{dot, normalize_frame, FrameVector};
