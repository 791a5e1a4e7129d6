//! FIR filtering and vector primitives.

use crate::delay::DelayLine;
use crate::error::{AncError, Result};
use crate::signal::{FirPath, Signal};

/// Causal FIR filtering truncated to the input length, the same convention as
/// MATLAB's `filter(b, 1, x)`:
///
/// ```text
/// y[n] = sum_{i=0}^{min(n, L-1)} b[i] * x[n-i]
/// ```
pub fn fir_filter(path: &FirPath, input: &Signal) -> Result<Signal> {
    if input.is_empty() {
        return Err(AncError::EmptySignal);
    }
    let out = filter_samples(path.coefficients(), input.samples());
    Signal::new(out, input.sample_rate_hz())
}

/// Slice form of [`fir_filter`]; an empty input yields an empty output.
pub fn filter_samples(coefficients: &[f64], input: &[f64]) -> Vec<f64> {
    (0..input.len())
        .map(|n| {
            let taps = coefficients.len().min(n + 1);
            coefficients[..taps]
                .iter()
                .zip(input[..=n].iter().rev())
                .map(|(c, x)| c * x)
                .sum()
        })
        .collect()
}

/// Inner product of two equal-length vectors.
pub fn dot(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(AncError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(dot_unchecked(a, b))
}

#[inline]
pub(crate) fn dot_unchecked(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sample-by-sample FIR filter with its own input history.
///
/// Produces exactly the same sequence as [`filter_samples`] over the same
/// input stream.
#[derive(Debug, Clone)]
pub struct StreamingFir {
    path: FirPath,
    history: DelayLine,
}

impl StreamingFir {
    pub fn new(path: FirPath) -> Self {
        let history = DelayLine::new(path.len());
        StreamingFir { path, history }
    }

    pub fn process(&mut self, sample: f64) -> f64 {
        self.history.push(sample);
        dot_unchecked(self.path.coefficients(), self.history.as_slice())
    }

    pub fn path(&self) -> &FirPath {
        &self.path
    }

    /// Input history, newest first.
    pub fn history(&self) -> &DelayLine {
        &self.history
    }
}
