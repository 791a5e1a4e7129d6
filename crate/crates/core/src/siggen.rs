//! Excitation signals and synthesized acoustic paths.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{AncError, Result};
use crate::signal::{FirPath, Signal};

/// Number of samples covering `[0, duration]` inclusive at `sample_rate_hz`,
/// matching MATLAB's `t = 0:1/fs:T`.
pub fn sample_count(duration_s: f64, sample_rate_hz: f64) -> usize {
    (duration_s * sample_rate_hz).round() as usize + 1
}

fn check_rate(sample_rate_hz: f64) -> Result<()> {
    if sample_rate_hz.is_finite() && sample_rate_hz > 0.0 {
        Ok(())
    } else {
        Err(AncError::InvalidSampleRate(sample_rate_hz))
    }
}

fn check_nyquist(freq_hz: f64, sample_rate_hz: f64) -> Result<()> {
    let nyquist_hz = sample_rate_hz / 2.0;
    if freq_hz < nyquist_hz {
        Ok(())
    } else {
        Err(AncError::Nyquist {
            freq_hz,
            nyquist_hz,
        })
    }
}

/// Linear frequency sweep parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpSpec {
    pub f0_hz: f64,
    pub f1_hz: f64,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
}

impl ChirpSpec {
    pub fn validate(&self) -> Result<()> {
        check_rate(self.sample_rate_hz)?;
        if !(self.f0_hz >= 0.0) {
            return Err(AncError::invalid("f0_hz", "must be non-negative"));
        }
        if !(self.f1_hz > 0.0) {
            return Err(AncError::invalid("f1_hz", "must be positive"));
        }
        if !(self.duration_s > 0.0) || self.duration_s * self.sample_rate_hz < 1.0 {
            return Err(AncError::invalid(
                "duration_s",
                "must cover at least one sampling interval",
            ));
        }
        check_nyquist(self.f0_hz, self.sample_rate_hz)?;
        check_nyquist(self.f1_hz, self.sample_rate_hz)
    }
}

/// Unit-amplitude linear chirp `cos(2π(f0 t + (f1 - f0) t² / 2T))`, sampled on
/// `t = 0, 1/fs, ..., T` (MATLAB `chirp(t, f0, T, f1)` with default options).
pub fn linear_chirp(spec: &ChirpSpec) -> Result<Signal> {
    spec.validate()?;
    let n = sample_count(spec.duration_s, spec.sample_rate_hz);
    let sweep = (spec.f1_hz - spec.f0_hz) / (2.0 * spec.duration_s);
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 / spec.sample_rate_hz;
            (2.0 * PI * (spec.f0_hz * t + sweep * t * t)).cos()
        })
        .collect();
    Signal::new(samples, spec.sample_rate_hz)
}

/// `amplitude * cos(2π f t)` over `[0, duration]` inclusive.
pub fn tone(freq_hz: f64, amplitude: f64, duration_s: f64, sample_rate_hz: f64) -> Result<Signal> {
    check_rate(sample_rate_hz)?;
    if !(freq_hz >= 0.0) {
        return Err(AncError::invalid("freq_hz", "must be non-negative"));
    }
    check_nyquist(freq_hz, sample_rate_hz)?;
    if !amplitude.is_finite() {
        return Err(AncError::invalid("amplitude", "must be finite"));
    }
    if !(duration_s >= 0.0) {
        return Err(AncError::invalid("duration_s", "must be non-negative"));
    }
    let n = sample_count(duration_s, sample_rate_hz);
    let samples = (0..n)
        .map(|k| amplitude * (2.0 * PI * freq_hz * k as f64 / sample_rate_hz).cos())
        .collect();
    Signal::new(samples, sample_rate_hz)
}

/// Zero-mean Gaussian noise of the given variance.
///
/// The generator is ChaCha8 seeded with `seed` through
/// `SeedableRng::seed_from_u64`, so a seed always yields the same sequence.
pub fn white_noise(length: usize, seed: u64, variance: f64, sample_rate_hz: f64) -> Result<Signal> {
    if length == 0 {
        return Err(AncError::invalid("length", "must be at least 1"));
    }
    if !(variance >= 0.0) || !variance.is_finite() {
        return Err(AncError::invalid(
            "variance",
            "must be finite and non-negative",
        ));
    }
    let normal = Normal::new(0.0, variance.sqrt())
        .map_err(|e| AncError::invalid("variance", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..length).map(|_| normal.sample(&mut rng)).collect();
    Signal::new(samples, sample_rate_hz)
}

/// Windowed-sinc band-pass design parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandpassSpec {
    pub low_hz: f64,
    pub high_hz: f64,
    pub num_taps: usize,
    #[serde(default)]
    pub bulk_delay_samples: usize,
}

impl BandpassSpec {
    /// Stand-in for the 20–3200 Hz primary path.
    pub const PRIMARY_DEFAULT: BandpassSpec = BandpassSpec {
        low_hz: 20.0,
        high_hz: 3200.0,
        num_taps: 256,
        bulk_delay_samples: 16,
    };

    /// Stand-in for the 200–6000 Hz secondary path.
    pub const SECONDARY_DEFAULT: BandpassSpec = BandpassSpec {
        low_hz: 200.0,
        high_hz: 6000.0,
        num_taps: 128,
        bulk_delay_samples: 8,
    };

    /// Main-lobe transition width of a Hamming-windowed design, in Hz.
    pub fn transition_width_hz(&self, sample_rate_hz: f64) -> f64 {
        3.3 * sample_rate_hz / self.num_taps as f64
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        check_rate(sample_rate_hz)?;
        if !(self.low_hz >= 0.0) {
            return Err(AncError::invalid("low_hz", "must be non-negative"));
        }
        if !(self.high_hz > self.low_hz) {
            return Err(AncError::invalid("high_hz", "must exceed low_hz"));
        }
        check_nyquist(self.high_hz, sample_rate_hz)?;
        let min_taps = if self.low_hz > 0.0 { 8 } else { 1 };
        if self.num_taps < min_taps {
            return Err(AncError::invalid(
                "num_taps",
                format!("must be at least {min_taps}"),
            ));
        }
        Ok(())
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

fn hamming(num_taps: usize) -> Vec<f64> {
    if num_taps == 1 {
        return vec![1.0];
    }
    let m = (num_taps - 1) as f64;
    (0..num_taps)
        .map(|k| 0.54 - 0.46 * (2.0 * PI * k as f64 / m).cos())
        .collect()
}

/// Hamming-windowed sinc band-pass (low-pass when `low_hz == 0`) preceded by
/// `bulk_delay_samples` zeros.
///
/// Band-pass designs have the window-shaped DC residue removed so the DC gain
/// is exactly zero. The response is normalized to unit gain at the band
/// center (at DC for low-pass designs).
pub fn design_bandpass(spec: &BandpassSpec, sample_rate_hz: f64) -> Result<FirPath> {
    spec.validate(sample_rate_hz)?;
    let n = spec.num_taps;
    let center = (n - 1) as f64 / 2.0;
    let lowpass = |cutoff_hz: f64, k: usize| {
        let fc = cutoff_hz / sample_rate_hz;
        2.0 * fc * sinc(2.0 * fc * (k as f64 - center))
    };
    let window = hamming(n);
    let mut taps: Vec<f64> = (0..n)
        .map(|k| {
            let ideal = if spec.low_hz > 0.0 {
                lowpass(spec.high_hz, k) - lowpass(spec.low_hz, k)
            } else {
                lowpass(spec.high_hz, k)
            };
            ideal * window[k]
        })
        .collect();

    let reference_hz = if spec.low_hz > 0.0 {
        let dc: f64 = taps.iter().sum();
        let window_sum: f64 = window.iter().sum();
        for (t, w) in taps.iter_mut().zip(&window) {
            *t -= w * dc / window_sum;
        }
        (spec.low_hz + spec.high_hz) / 2.0
    } else {
        0.0
    };
    let gain = FirPath::new(taps.clone())?.magnitude_at(reference_hz, sample_rate_hz);
    if !(gain > 0.0) {
        return Err(AncError::ZeroPath);
    }
    taps.iter_mut().for_each(|t| *t /= gain);
    Ok(FirPath::new(taps)?.delayed(spec.bulk_delay_samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::filter_samples;

    const FS: f64 = 16_000.0;

    fn paper_chirp() -> ChirpSpec {
        ChirpSpec {
            f0_hz: 20.0,
            f1_hz: 1600.0,
            duration_s: 0.25,
            sample_rate_hz: FS,
        }
    }

    #[test]
    fn chirp_starts_at_one() {
        let x = linear_chirp(&paper_chirp()).unwrap();
        assert_eq!(x.samples()[0], 1.0);
        assert!(x.samples().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn paper_chirp_length_and_final_frequency() {
        let x = linear_chirp(&paper_chirp()).unwrap();
        assert_eq!(x.len(), 4001);
        // Zero-crossing spacing over the last 5 ms gives the instantaneous frequency.
        let tail = &x.samples()[x.len() - 80..];
        let crossings: Vec<f64> = tail
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0].signum() != w[1].signum())
            .map(|(i, w)| i as f64 + w[0] / (w[0] - w[1]))
            .collect();
        let spans = crossings.len() - 1;
        let half_period = (crossings[spans] - crossings[0]) / spans as f64;
        let freq = FS / (2.0 * half_period);
        // The instantaneous frequency over the last 5 ms runs from 1568 to 1600 Hz.
        assert!((freq - 1600.0).abs() / 1600.0 < 0.05, "freq {freq}");
    }

    #[test]
    fn constant_frequency_chirp_is_a_cosine() {
        let spec = ChirpSpec {
            f0_hz: 100.0,
            f1_hz: 100.0,
            duration_s: 0.1,
            sample_rate_hz: FS,
        };
        let x = linear_chirp(&spec).unwrap();
        for (k, v) in x.samples().iter().enumerate() {
            let t = k as f64 / FS;
            assert!((v - (2.0 * PI * 100.0 * t).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn chirp_rejects_nyquist_violation() {
        let spec = ChirpSpec {
            f1_hz: 9000.0,
            ..paper_chirp()
        };
        assert!(matches!(linear_chirp(&spec), Err(AncError::Nyquist { .. })));
    }

    #[test]
    fn bandpass_has_zero_dc() {
        for spec in [
            BandpassSpec::PRIMARY_DEFAULT,
            BandpassSpec::SECONDARY_DEFAULT,
        ] {
            let path = design_bandpass(&spec, FS).unwrap();
            let sum: f64 = path.coefficients().iter().sum();
            assert!(sum.abs() < 1e-3, "dc gain {sum}");
            assert!(path.magnitude_at(0.0, FS) < 1e-3);
        }
    }

    #[test]
    fn secondary_default_response() {
        let spec = BandpassSpec {
            bulk_delay_samples: 0,
            ..BandpassSpec::SECONDARY_DEFAULT
        };
        let path = design_bandpass(&spec, FS).unwrap();
        assert_eq!(path.len(), 128);
        let h3000 = path.magnitude_at(3000.0, FS);
        assert!((0.5..=1.5).contains(&h3000), "{h3000}");
        assert!(path.magnitude_at(20.0, FS) < 0.1);
    }

    #[test]
    fn passband_and_stopband_levels() {
        for spec in [
            BandpassSpec::PRIMARY_DEFAULT,
            BandpassSpec::SECONDARY_DEFAULT,
        ] {
            let path = design_bandpass(&spec, FS).unwrap();
            let delta = spec.transition_width_hz(FS);
            let half_gain = 10f64.powf(-6.0 / 20.0);
            let mut f = spec.low_hz + delta;
            while f <= spec.high_hz - delta {
                assert!(path.magnitude_at(f, FS) >= half_gain, "{f} Hz");
                f += 25.0;
            }
            let stop = 10f64.powf(-20.0 / 20.0);
            let above = spec.high_hz + 2.0 * delta;
            if above < FS / 2.0 {
                assert!(path.magnitude_at(above, FS) <= stop, "{above} Hz");
            }
        }
    }

    #[test]
    fn degenerate_lowpass_is_a_pure_delay() {
        let spec = BandpassSpec {
            low_hz: 0.0,
            high_hz: 4000.0,
            num_taps: 1,
            bulk_delay_samples: 5,
        };
        assert_eq!(design_bandpass(&spec, FS).unwrap(), FirPath::impulse(5));
    }

    #[test]
    fn bandpass_rejects_bad_edges() {
        let spec = BandpassSpec {
            high_hz: 8000.0,
            ..BandpassSpec::SECONDARY_DEFAULT
        };
        assert!(matches!(
            design_bandpass(&spec, FS),
            Err(AncError::Nyquist { .. })
        ));
        let spec = BandpassSpec {
            low_hz: 500.0,
            high_hz: 400.0,
            ..BandpassSpec::SECONDARY_DEFAULT
        };
        assert!(design_bandpass(&spec, FS).is_err());
        let spec = BandpassSpec {
            num_taps: 4,
            ..BandpassSpec::SECONDARY_DEFAULT
        };
        assert!(design_bandpass(&spec, FS).is_err());
    }

    fn tone_gain(path: &FirPath, freq: f64) -> f64 {
        let x = tone(freq, 1.0, 0.5, FS).unwrap();
        let y = filter_samples(path.coefficients(), x.samples());
        // Skip the start-up transient.
        let skip = path.len() * 2;
        let rms = |v: &[f64]| (v.iter().map(|s| s * s).sum::<f64>() / v.len() as f64).sqrt();
        rms(&y[skip..]) / rms(&x.samples()[skip..])
    }

    #[test]
    fn tones_inside_and_an_octave_outside() {
        for (low, high, taps) in [
            (1000.0, 2000.0, 128),
            (400.0, 1200.0, 256),
            (2000.0, 3000.0, 128),
        ] {
            let spec = BandpassSpec {
                low_hz: low,
                high_hz: high,
                num_taps: taps,
                bulk_delay_samples: 3,
            };
            let path = design_bandpass(&spec, FS).unwrap();
            assert!(path.energy() > 0.0);
            let center = tone_gain(&path, (low + high) / 2.0);
            assert!((0.7..=1.3).contains(&center), "center gain {center}");
            let above = tone_gain(&path, 2.0 * high);
            assert!(20.0 * above.log10() <= -20.0, "octave above gain {above}");
            let below = tone_gain(&path, low / 2.0);
            assert!(20.0 * below.log10() <= -20.0, "octave below gain {below}");
        }
    }

    #[test]
    fn white_noise_properties() {
        let z = white_noise(64, 3, 0.0, FS).unwrap();
        assert!(z.samples().iter().all(|&v| v == 0.0));
        assert_eq!(white_noise(64, 9, 1.0, FS), white_noise(64, 9, 1.0, FS));
        assert_ne!(white_noise(64, 9, 1.0, FS), white_noise(64, 10, 1.0, FS));
        let x = white_noise(100_000, 1, 1.0, FS).unwrap();
        let n = x.len() as f64;
        let mean = x.samples().iter().sum::<f64>() / n;
        let var = x.samples().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.03, "{var}");
    }
}
