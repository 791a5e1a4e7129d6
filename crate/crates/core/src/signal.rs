//! Sampled signals and FIR impulse responses.

use crate::error::{AncError, Result};

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(AncError::NonFinite { index }),
        None => Ok(()),
    }
}

/// A uniformly sampled real-valued sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate_hz: f64,
}

impl Signal {
    /// Wraps `samples` taken at `sample_rate_hz`. Rejects non-positive rates
    /// and non-finite samples. An empty signal is allowed.
    pub fn new(samples: Vec<f64>, sample_rate_hz: f64) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(AncError::InvalidSampleRate(sample_rate_hz));
        }
        check_finite(&samples)?;
        Ok(Signal {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time in seconds of sample `n`.
    pub fn time_of(&self, n: usize) -> f64 {
        n as f64 / self.sample_rate_hz
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

/// Finite impulse response of an acoustic or electrical path (P, S, Ŝ, W).
#[derive(Debug, Clone, PartialEq)]
pub struct FirPath {
    coefficients: Vec<f64>,
}

impl FirPath {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(AncError::EmptyPath);
        }
        check_finite(&coefficients)?;
        Ok(FirPath { coefficients })
    }

    /// Unit impulse delayed by `delay` samples.
    pub fn impulse(delay: usize) -> Self {
        let mut coefficients = vec![0.0; delay + 1];
        coefficients[delay] = 1.0;
        FirPath { coefficients }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    /// Always false; a path holds at least one tap.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0.0)
    }

    /// Every coefficient multiplied by `gain`.
    pub fn scaled(&self, gain: f64) -> Result<Self> {
        FirPath::new(self.coefficients.iter().map(|c| c * gain).collect())
    }

    /// The same response preceded by `delay` zero taps.
    pub fn delayed(&self, delay: usize) -> Self {
        let mut coefficients = vec![0.0; delay];
        coefficients.extend_from_slice(&self.coefficients);
        FirPath { coefficients }
    }

    /// Complex frequency response magnitude at `freq_hz`.
    pub fn magnitude_at(&self, freq_hz: f64, sample_rate_hz: f64) -> f64 {
        let omega = 2.0 * std::f64::consts::PI * freq_hz / sample_rate_hz;
        let (re, im) =
            self.coefficients
                .iter()
                .enumerate()
                .fold((0.0, 0.0), |(re, im), (k, &c)| {
                    let phase = omega * k as f64;
                    (re + c * phase.cos(), im - c * phase.sin())
                });
        re.hypot(im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rate_and_nan() {
        assert_eq!(
            Signal::new(vec![1.0], 0.0),
            Err(AncError::InvalidSampleRate(0.0))
        );
        assert_eq!(
            Signal::new(vec![1.0, f64::NAN], 8000.0),
            Err(AncError::NonFinite { index: 1 })
        );
        assert!(Signal::new(Vec::new(), 8000.0).unwrap().is_empty());
    }

    #[test]
    fn path_requires_a_tap() {
        assert_eq!(FirPath::new(vec![]), Err(AncError::EmptyPath));
        assert_eq!(
            FirPath::new(vec![0.0, f64::INFINITY]),
            Err(AncError::NonFinite { index: 1 })
        );
    }

    #[test]
    fn impulse_and_delay() {
        assert_eq!(FirPath::impulse(2).coefficients(), &[0.0, 0.0, 1.0]);
        let p = FirPath::new(vec![1.0, -1.0]).unwrap().delayed(1);
        assert_eq!(p.coefficients(), &[0.0, 1.0, -1.0]);
        assert!((FirPath::impulse(3).magnitude_at(1234.0, 8000.0) - 1.0).abs() < 1e-12);
    }
}
