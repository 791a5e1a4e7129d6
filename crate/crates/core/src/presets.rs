//! Built-in experiments reproducing the desk-scale chirp-cancellation run:
//! 16 kHz sampling, 0.25 s, a 20→1600 Hz chirp, an 80-tap control filter,
//! μ = 0.0005 for FxLMS and q = 0.005, P(0) = I for the Kalman controller.

use crate::siggen::BandpassSpec;
use crate::sim::{ControllerSpec, DisturbanceMode, PathSpec, SimConfig, SourceSpec};

pub const PAPER_SAMPLE_RATE_HZ: f64 = 16_000.0;
pub const PAPER_DURATION_S: f64 = 0.25;
pub const PAPER_FILTER_LEN: usize = 80;
pub const PAPER_STEP_SIZE: f64 = 0.0005;
pub const PAPER_Q: f64 = 0.005;

fn paper_base(controller: ControllerSpec) -> SimConfig {
    SimConfig {
        sample_rate_hz: PAPER_SAMPLE_RATE_HZ,
        duration_s: PAPER_DURATION_S,
        source: SourceSpec::Chirp {
            f0_hz: 20.0,
            f1_hz: 1600.0,
        },
        primary_path: PathSpec::from_bandpass(BandpassSpec::PRIMARY_DEFAULT),
        secondary_path: PathSpec::from_bandpass(BandpassSpec::SECONDARY_DEFAULT),
        sec_estimate_mismatch: 1.0,
        controller,
        tracked_weight_indices: vec![4, 59],
        seed: 0,
        final_window_s: 0.05,
        convergence_threshold_db: 20.0,
    }
}

pub fn paper_fxlms() -> SimConfig {
    paper_base(ControllerSpec::Fxlms {
        filter_len: PAPER_FILTER_LEN,
        step_size: PAPER_STEP_SIZE,
    })
}

pub fn paper_kalman() -> SimConfig {
    paper_kalman_with_mode(DisturbanceMode::Ideal)
}

pub fn paper_kalman_with_mode(disturbance_mode: DisturbanceMode) -> SimConfig {
    paper_base(ControllerSpec::Kalman {
        filter_len: PAPER_FILTER_LEN,
        q: PAPER_Q,
        p0_scale: 1.0,
        disturbance_mode,
    })
}
