//! Single-channel active noise control: FxLMS and Kalman-filter controllers,
//! the DSP primitives they share, and a closed-loop simulation harness.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csvio;
pub mod delay;
pub mod dsp;
pub mod error;
pub mod export;
pub mod fxlms;
pub mod kalman;
pub mod linalg;
pub mod metrics;
pub mod presets;
pub mod siggen;
pub mod signal;
pub mod sim;

pub use delay::DelayLine;
pub use dsp::{dot, filter_samples, fir_filter, StreamingFir};
pub use error::{AncError, Result};
pub use fxlms::{group_delay_estimate, step_size_bound, Fxlms, StepBound};
pub use kalman::{recover_disturbance, ridge_oracle, KalmanConfig, KalmanState, KalmanStep};
pub use linalg::{autocorr_matrix, max_eigenvalue};
pub use metrics::{convergence_time, noise_reduction_db, Metrics};
pub use siggen::{design_bandpass, linear_chirp, white_noise, BandpassSpec, ChirpSpec};
pub use signal::{FirPath, Signal};
pub use sim::{
    run_simulation, ControllerSpec, DisturbanceMode, PathSpec, RunResult, SimConfig, SourceSpec,
};
