//! Closed-loop simulation harness.
//!
//! Per sample `n`:
//!
//! 1. the source produces the reference `x(n)`;
//! 2. the disturbance is `d(n) = (p * x)(n)`;
//! 3. the controller runs and the residual is recorded.
//!
//! FxLMS always runs the physical loop: `y(n)` goes through the true
//! secondary path and `e(n) = d(n) - (s * y)(n)` drives the update.
//!
//! The Kalman controller has two disturbance modes:
//! - `ideal` feeds the true `d(n)` and reports the innovation
//!   `d(n) - x'ᵀ(n) ŵ(n)` as the error (the usual offline formulation);
//! - `recovered` drives `y(n)` through the true secondary path, measures
//!   `e(n)` and feeds the reconstructed `d̂(n) = e(n) + (ŝ * y)(n)`. The error
//!   trace is the measured `e(n)`; the innovation is kept separately.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::delay::DelayLine;
use crate::dsp::{dot_unchecked, filter_samples, StreamingFir};
use crate::error::{AncError, Result};
use crate::fxlms::{Fxlms, DIVERGENCE_LIMIT};
use crate::kalman::{recover_disturbance, KalmanConfig, KalmanState};
use crate::metrics::Metrics;
use crate::siggen::{
    design_bandpass, linear_chirp, sample_count, tone, white_noise, BandpassSpec, ChirpSpec,
};
use crate::signal::{FirPath, Signal};

/// Reference signal feeding the primary path and the controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    /// Linear sweep from `f0_hz` to `f1_hz` over the whole run.
    Chirp { f0_hz: f64, f1_hz: f64 },
    Tone {
        freq_hz: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// Gaussian noise drawn from the run's seed.
    WhiteNoise { variance: f64 },
}

/// An acoustic path, either designed or given tap by tap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    Bandpass {
        low_hz: f64,
        high_hz: f64,
        num_taps: usize,
        #[serde(default)]
        bulk_delay_samples: usize,
    },
    Explicit {
        coefficients: Vec<f64>,
    },
}

impl PathSpec {
    pub fn from_bandpass(spec: BandpassSpec) -> Self {
        PathSpec::Bandpass {
            low_hz: spec.low_hz,
            high_hz: spec.high_hz,
            num_taps: spec.num_taps,
            bulk_delay_samples: spec.bulk_delay_samples,
        }
    }

    pub fn build(&self, sample_rate_hz: f64) -> Result<FirPath> {
        match self {
            PathSpec::Bandpass {
                low_hz,
                high_hz,
                num_taps,
                bulk_delay_samples,
            } => design_bandpass(
                &BandpassSpec {
                    low_hz: *low_hz,
                    high_hz: *high_hz,
                    num_taps: *num_taps,
                    bulk_delay_samples: *bulk_delay_samples,
                },
                sample_rate_hz,
            ),
            PathSpec::Explicit { coefficients } => FirPath::new(coefficients.clone()),
        }
    }
}

/// Which disturbance the Kalman controller observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisturbanceMode {
    #[default]
    Ideal,
    Recovered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControllerSpec {
    Fxlms {
        filter_len: usize,
        step_size: f64,
    },
    Kalman {
        filter_len: usize,
        q: f64,
        #[serde(default = "unit")]
        p0_scale: f64,
        #[serde(default)]
        disturbance_mode: DisturbanceMode,
    },
}

impl ControllerSpec {
    pub fn filter_len(&self) -> usize {
        match self {
            ControllerSpec::Fxlms { filter_len, .. }
            | ControllerSpec::Kalman { filter_len, .. } => *filter_len,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ControllerSpec::Fxlms { .. } => "fxlms",
            ControllerSpec::Kalman { .. } => "kalman",
        }
    }
}

fn unit() -> f64 {
    1.0
}

fn default_tracked() -> Vec<usize> {
    vec![4, 59]
}

fn default_final_window() -> f64 {
    0.05
}

fn default_threshold() -> f64 {
    20.0
}

/// Complete description of one experiment.
///
/// Weight indices are 0-based: the default `[4, 59]` are the 5th and 60th
/// taps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub source: SourceSpec,
    pub primary_path: PathSpec,
    pub secondary_path: PathSpec,
    /// Gain applied to the true secondary path to form the estimate Ŝ.
    #[serde(default = "unit")]
    pub sec_estimate_mismatch: f64,
    pub controller: ControllerSpec,
    #[serde(default = "default_tracked")]
    pub tracked_weight_indices: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Trailing window for the final-MSE and noise-reduction metrics.
    #[serde(default = "default_final_window")]
    pub final_window_s: f64,
    #[serde(default = "default_threshold")]
    pub convergence_threshold_db: f64,
}

impl SimConfig {
    pub fn num_samples(&self) -> usize {
        sample_count(self.duration_s, self.sample_rate_hz)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(AncError::InvalidSampleRate(self.sample_rate_hz));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(AncError::invalid("duration_s", "must be positive"));
        }
        let n = self.controller.filter_len();
        if n == 0 {
            return Err(AncError::invalid("filter_len", "must be at least 1"));
        }
        if self.duration_s * self.sample_rate_hz < n as f64 {
            return Err(AncError::invalid(
                "duration_s",
                format!("run must cover at least filter_len = {n} samples"),
            ));
        }
        if let Some(&bad) = self.tracked_weight_indices.iter().find(|&&i| i >= n) {
            return Err(AncError::invalid(
                "tracked_weight_indices",
                format!("index {bad} out of range for filter_len {n}"),
            ));
        }
        if !self.sec_estimate_mismatch.is_finite() {
            return Err(AncError::invalid("sec_estimate_mismatch", "must be finite"));
        }
        if !(self.final_window_s > 0.0) {
            return Err(AncError::invalid("final_window_s", "must be positive"));
        }
        if !self.convergence_threshold_db.is_finite() {
            return Err(AncError::invalid(
                "convergence_threshold_db",
                "must be finite",
            ));
        }
        match self.controller {
            ControllerSpec::Fxlms { step_size, .. } => {
                if !(step_size > 0.0) || !step_size.is_finite() {
                    return Err(AncError::invalid(
                        "step_size",
                        "must be positive and finite",
                    ));
                }
            }
            ControllerSpec::Kalman { q, p0_scale, .. } => {
                KalmanConfig {
                    filter_len: n,
                    q,
                    p0_scale,
                }
                .validate()?;
            }
        }
        Ok(())
    }

    /// Reference signal for this run.
    pub fn reference(&self) -> Result<Signal> {
        let fs = self.sample_rate_hz;
        match self.source {
            SourceSpec::Chirp { f0_hz, f1_hz } => linear_chirp(&ChirpSpec {
                f0_hz,
                f1_hz,
                duration_s: self.duration_s,
                sample_rate_hz: fs,
            }),
            SourceSpec::Tone { freq_hz, amplitude } => {
                tone(freq_hz, amplitude, self.duration_s, fs)
            }
            SourceSpec::WhiteNoise { variance } => {
                white_noise(self.num_samples(), self.seed, variance, fs)
            }
        }
    }

    /// `(primary, secondary, secondary estimate)`.
    pub fn paths(&self) -> Result<(FirPath, FirPath, FirPath)> {
        let primary = self.primary_path.build(self.sample_rate_hz)?;
        let secondary = self.secondary_path.build(self.sample_rate_hz)?;
        let estimate = secondary.scaled(self.sec_estimate_mismatch)?;
        Ok((primary, secondary, estimate))
    }
}

/// Traces and summary of one run. All traces share one length.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub reference_trace: Signal,
    pub disturbance_trace: Signal,
    pub error_trace: Signal,
    /// Kalman innovation `d(n) - x'ᵀ(n) ŵ(n)` as seen by the controller
    /// (equal to the error trace in ideal mode); `None` for FxLMS.
    pub innovation_trace: Option<Signal>,
    /// `d̂(n) = e(n) + (ŝ * y)(n)` in recovered mode; `None` otherwise.
    pub recovered_disturbance: Option<Signal>,
    /// Weight value after each sample's update, keyed by 0-based tap index.
    pub weight_traces: BTreeMap<usize, Signal>,
    pub final_weights: Vec<f64>,
    pub diverged: bool,
    pub metrics: Metrics,
}

fn exceeds_limit(weights: &[f64]) -> bool {
    weights
        .iter()
        .any(|w| !w.is_finite() || w.abs() > DIVERGENCE_LIMIT)
}

/// Runs one experiment. Divergence is reported in the result, not as an error.
pub fn run_simulation(config: &SimConfig) -> Result<RunResult> {
    config.validate()?;
    let fs = config.sample_rate_hz;
    let x = config.reference()?;
    let (primary, secondary, estimate) = config.paths()?;
    let d = filter_samples(primary.coefficients(), x.samples());
    let len = x.len();

    let mut errors = Vec::with_capacity(len);
    let mut innovations = Vec::new();
    let mut recovered = Vec::new();
    let mut tracked: Vec<Vec<f64>> =
        vec![Vec::with_capacity(len); config.tracked_weight_indices.len()];
    let record = |weights: &[f64], tracked: &mut Vec<Vec<f64>>| {
        for (trace, &i) in tracked.iter_mut().zip(&config.tracked_weight_indices) {
            trace.push(weights[i]);
        }
    };

    let mut acoustic = StreamingFir::new(secondary);
    let final_weights;
    let diverged;
    match config.controller {
        ControllerSpec::Fxlms {
            filter_len,
            step_size,
        } => {
            let mut ctl = Fxlms::new(filter_len, estimate, step_size)?;
            for (&xn, &dn) in x.samples().iter().zip(&d) {
                let y = ctl.control(xn);
                let e = dn - acoustic.process(y);
                ctl.adapt(e)?;
                errors.push(e);
                record(ctl.weights(), &mut tracked);
            }
            diverged = ctl.is_diverged();
            final_weights = ctl.weights().to_vec();
        }
        ControllerSpec::Kalman {
            filter_len,
            q,
            p0_scale,
            disturbance_mode,
        } => {
            let mut ctl = KalmanState::new(KalmanConfig {
                filter_len,
                q,
                p0_scale,
            })?;
            let mut sec_filter = StreamingFir::new(estimate.clone());
            let mut ref_line = DelayLine::new(filter_len);
            let mut frozen = false;
            innovations.reserve(len);
            for (&xn, &dn) in x.samples().iter().zip(&d) {
                let xprime = sec_filter.process(xn);
                let (e, observed) = match disturbance_mode {
                    DisturbanceMode::Ideal => (None, dn),
                    DisturbanceMode::Recovered => {
                        ref_line.push(xn);
                        let y = dot_unchecked(ctl.weights(), ref_line.as_slice());
                        let e = dn - acoustic.process(y);
                        let d_hat = recover_disturbance(e, acoustic.history(), &estimate)?;
                        recovered.push(d_hat);
                        (Some(e), d_hat)
                    }
                };
                let innovation = if frozen {
                    ctl.observe(xprime, observed)?.error
                } else {
                    let step = ctl.step(xprime, observed)?;
                    frozen = exceeds_limit(ctl.weights());
                    step.error
                };
                innovations.push(innovation);
                errors.push(e.unwrap_or(innovation));
                record(ctl.weights(), &mut tracked);
            }
            diverged = frozen;
            final_weights = ctl.weights().to_vec();
        }
    }

    let metrics = Metrics::compute(
        &d,
        &errors,
        fs,
        config.final_window_s,
        config.convergence_threshold_db,
    )?;
    let weight_traces = config
        .tracked_weight_indices
        .iter()
        .zip(tracked)
        .map(|(&i, v)| Ok((i, Signal::new(v, fs)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(RunResult {
        disturbance_trace: Signal::new(d, fs)?,
        error_trace: Signal::new(errors, fs)?,
        innovation_trace: if innovations.is_empty() {
            None
        } else {
            Some(Signal::new(innovations, fs)?)
        },
        recovered_disturbance: if recovered.is_empty() {
            None
        } else {
            Some(Signal::new(recovered, fs)?)
        },
        reference_trace: x,
        weight_traces,
        final_weights,
        diverged,
        metrics,
    })
}
