//! Filtered-x LMS controller and its step-size bound.
//!
//! ```text
//! y(n)   = wᵀ(n) x(n)
//! x'(n)  = ŝ(n) * x(n)
//! e(n)   = d(n) - s(n) * y(n)            (measured at the error sensor)
//! w(n+1) = w(n) + μ e(n) x'(n)
//! ```
//!
//! Stability requires `0 < μ < 1 / (λ_max D_s)` where `λ_max` is the largest
//! eigenvalue of the filtered-reference autocorrelation matrix and `D_s` the
//! secondary-path group delay in samples.

use crate::delay::DelayLine;
use crate::dsp::{dot_unchecked, StreamingFir};
use crate::error::{AncError, Result};
use crate::linalg::{autocorr_matrix, max_eigenvalue};
use crate::signal::FirPath;

/// Weight magnitude above which a run is declared diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Single-channel FxLMS controller.
///
/// Call [`Fxlms::control`] once per sample to get the anti-noise output, then
/// [`Fxlms::adapt`] with the error measured for the same sample.
#[derive(Debug, Clone)]
pub struct Fxlms {
    weights: Vec<f64>,
    ref_line: DelayLine,
    filtref_line: DelayLine,
    sec_filter: StreamingFir,
    step_size: f64,
    diverged: bool,
}

impl Fxlms {
    pub fn new(filter_len: usize, sec_estimate: FirPath, step_size: f64) -> Result<Self> {
        if filter_len == 0 {
            return Err(AncError::invalid("filter_len", "must be at least 1"));
        }
        if !(step_size > 0.0) || !step_size.is_finite() {
            return Err(AncError::invalid(
                "step_size",
                "must be positive and finite",
            ));
        }
        Ok(Fxlms {
            weights: vec![0.0; filter_len],
            ref_line: DelayLine::new(filter_len),
            filtref_line: DelayLine::new(filter_len),
            sec_filter: StreamingFir::new(sec_estimate),
            step_size,
            diverged: false,
        })
    }

    pub fn filter_len(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.weights.len() {
            return Err(AncError::LengthMismatch {
                left: weights.len(),
                right: self.weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(AncError::NonFinite { index });
        }
        self.weights.copy_from_slice(weights);
        Ok(())
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    /// Changes μ mid-run. Zero is accepted and freezes adaptation.
    pub fn set_step_size(&mut self, step_size: f64) -> Result<()> {
        if !(step_size >= 0.0) || !step_size.is_finite() {
            return Err(AncError::invalid(
                "step_size",
                "must be non-negative and finite",
            ));
        }
        self.step_size = step_size;
        Ok(())
    }

    pub fn sec_estimate(&self) -> &FirPath {
        self.sec_filter.path()
    }

    /// Reference vector `x(n)`, newest first.
    pub fn reference(&self) -> &[f64] {
        self.ref_line.as_slice()
    }

    /// Filtered-reference vector `x'(n)`, newest first.
    pub fn filtered_reference(&self) -> &[f64] {
        self.filtref_line.as_slice()
    }

    pub fn is_diverged(&self) -> bool {
        self.diverged
    }

    /// Consumes reference sample `x(n)` and returns the control output `y(n)`.
    pub fn control(&mut self, x: f64) -> f64 {
        self.ref_line.push(x);
        let filtered = self.sec_filter.process(x);
        self.filtref_line.push(filtered);
        dot_unchecked(&self.weights, self.ref_line.as_slice())
    }

    /// Gradient step with the error `e(n) = d(n) - (s*y)(n)` for the sample
    /// last passed to [`Fxlms::control`].
    ///
    /// Once a weight exceeds [`DIVERGENCE_LIMIT`] (or turns non-finite) the
    /// controller is flagged diverged and further calls leave the weights
    /// untouched.
    pub fn adapt(&mut self, error: f64) -> Result<()> {
        if !error.is_finite() {
            return Err(AncError::invalid("error", "must be finite"));
        }
        if self.diverged {
            return Ok(());
        }
        let gain = self.step_size * error;
        for (w, xf) in self.weights.iter_mut().zip(self.filtref_line.as_slice()) {
            *w += gain * xf;
        }
        if self
            .weights
            .iter()
            .any(|w| !w.is_finite() || w.abs() > DIVERGENCE_LIMIT)
        {
            self.diverged = true;
        }
        Ok(())
    }
}

/// Upper bound on the FxLMS step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBound {
    pub lambda_max: f64,
    pub group_delay_samples: usize,
    pub mu_max: f64,
}

impl StepBound {
    pub fn new(lambda_max: f64, group_delay_samples: usize) -> Result<Self> {
        if !(lambda_max > 0.0) || !lambda_max.is_finite() {
            return Err(AncError::invalid(
                "lambda_max",
                "must be positive and finite",
            ));
        }
        if group_delay_samples == 0 {
            return Err(AncError::invalid(
                "group_delay",
                "must be at least 1 sample",
            ));
        }
        Ok(StepBound {
            lambda_max,
            group_delay_samples,
            mu_max: 1.0 / (lambda_max * group_delay_samples as f64),
        })
    }
}

/// Estimates `μ_max = 1 / (λ_max D_s)` from a filtered-reference record.
pub fn step_size_bound(
    filtered_ref: &[f64],
    order: usize,
    group_delay: usize,
) -> Result<StepBound> {
    if group_delay == 0 {
        return Err(AncError::invalid(
            "group_delay",
            "must be at least 1 sample",
        ));
    }
    let r = autocorr_matrix(filtered_ref, order)?;
    let lambda_max = max_eigenvalue(&r, 1e-10)?;
    StepBound::new(lambda_max, group_delay)
}

/// Group delay of a path in samples: the index of its largest-magnitude tap.
///
/// When several taps share the peak magnitude (a symmetric even-length
/// design, say) the rounded energy centroid is used instead.
pub fn group_delay_estimate(path: &FirPath) -> Result<usize> {
    if path.is_zero() {
        return Err(AncError::ZeroPath);
    }
    let coeffs = path.coefficients();
    let peak = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let tie = peak * 1e-12;
    let mut at_peak = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| (c.abs() - peak).abs() <= tie)
        .map(|(i, _)| i);
    let first = at_peak.next().expect("non-zero path has a peak");
    if at_peak.next().is_none() {
        return Ok(first);
    }
    let energy = path.energy();
    let centroid: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| i as f64 * c * c)
        .sum::<f64>()
        / energy;
    Ok((centroid.round() as usize).min(coeffs.len() - 1))
}
