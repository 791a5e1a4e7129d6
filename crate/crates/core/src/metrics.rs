//! Summary metrics computed from disturbance and residual-error traces.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{AncError, Result};

/// Reported when the residual in a window is exactly zero.
pub const MAX_REDUCTION_DB: f64 = 120.0;

/// Allowed dip below the threshold once convergence is declared.
pub const HYSTERESIS_DB: f64 = 3.0;

/// Default length of the sliding window used by [`convergence_time`].
pub const DEFAULT_WINDOW_S: f64 = 0.010;

fn check_lengths(d: &[f64], e: &[f64]) -> Result<()> {
    if d.len() == e.len() {
        Ok(())
    } else {
        Err(AncError::LengthMismatch {
            left: d.len(),
            right: e.len(),
        })
    }
}

fn energy(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn reduction(d_energy: f64, e_energy: f64) -> f64 {
    if e_energy == 0.0 {
        MAX_REDUCTION_DB
    } else {
        10.0 * (d_energy / e_energy).log10()
    }
}

/// `10 log10(Σ d² / Σ e²)` over `window`.
pub fn noise_reduction_db(d: &[f64], e: &[f64], window: Range<usize>) -> Result<f64> {
    check_lengths(d, e)?;
    if window.is_empty() || window.end > d.len() {
        return Err(AncError::invalid(
            "window",
            format!("{window:?} for length {}", d.len()),
        ));
    }
    let d_energy = energy(&d[window.clone()]);
    if d_energy == 0.0 {
        return Err(AncError::SilentDisturbance);
    }
    Ok(reduction(d_energy, energy(&e[window])))
}

/// Earliest time at which the trailing window reaches `threshold_db` of
/// reduction and never falls more than [`HYSTERESIS_DB`] below it afterwards.
///
/// Returns `None` ("never") when no such time exists. The reported time is
/// that of the last sample in the qualifying window.
pub fn convergence_time(
    e: &[f64],
    d: &[f64],
    sample_rate_hz: f64,
    threshold_db: f64,
    window_len: usize,
) -> Result<Option<f64>> {
    check_lengths(d, e)?;
    if window_len == 0 {
        return Err(AncError::invalid("window_len", "must be at least 1"));
    }
    if d.len() < window_len {
        return Ok(None);
    }
    let per_window: Vec<f64> = (window_len - 1..d.len())
        .map(|end| {
            let range = end + 1 - window_len..end + 1;
            let d_energy = energy(&d[range.clone()]);
            let e_energy = energy(&e[range]);
            if d_energy == 0.0 && e_energy > 0.0 {
                f64::NEG_INFINITY
            } else {
                reduction(d_energy, e_energy)
            }
        })
        .collect();

    let floor = threshold_db - HYSTERESIS_DB;
    let mut earliest = None;
    for (k, &nr) in per_window.iter().enumerate().rev() {
        if nr < floor {
            break;
        }
        if nr >= threshold_db {
            earliest = Some(k);
        }
    }
    Ok(earliest.map(|k| (k + window_len - 1) as f64 / sample_rate_hz))
}

/// Time by which `fraction` of the total error energy has accumulated.
pub fn energy_decay_time(e: &[f64], fraction: f64, sample_rate_hz: f64) -> Option<f64> {
    let total = energy(e);
    if total == 0.0 {
        return None;
    }
    let target = fraction * total;
    let mut acc = 0.0;
    for (n, v) in e.iter().enumerate() {
        acc += v * v;
        if acc >= target {
            return Some(n as f64 / sample_rate_hz);
        }
    }
    Some((e.len() - 1) as f64 / sample_rate_hz)
}

/// Summary block attached to every run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub final_window_s: f64,
    /// Mean squared residual over the final window.
    pub final_mse: f64,
    /// Noise reduction over the final window; `None` when the disturbance
    /// is silent there.
    pub noise_reduction_db: Option<f64>,
    pub convergence_threshold_db: f64,
    /// `None` means the run never converged.
    pub convergence_time_s: Option<f64>,
    pub energy_decay_90_s: Option<f64>,
}

impl Metrics {
    pub fn compute(
        d: &[f64],
        e: &[f64],
        sample_rate_hz: f64,
        final_window_s: f64,
        convergence_threshold_db: f64,
    ) -> Result<Metrics> {
        check_lengths(d, e)?;
        if d.is_empty() {
            return Err(AncError::EmptySignal);
        }
        let final_len = final_window_len(final_window_s, sample_rate_hz, d.len());
        let window = d.len() - final_len..d.len();
        let final_mse = energy(&e[window.clone()]) / final_len as f64;
        let noise_reduction_db = match noise_reduction_db(d, e, window) {
            Ok(v) => Some(v),
            Err(AncError::SilentDisturbance) => None,
            Err(other) => return Err(other),
        };
        let conv_window = ((DEFAULT_WINDOW_S * sample_rate_hz).round() as usize).max(1);
        Ok(Metrics {
            final_window_s,
            final_mse,
            noise_reduction_db,
            convergence_threshold_db,
            convergence_time_s: convergence_time(
                e,
                d,
                sample_rate_hz,
                convergence_threshold_db,
                conv_window,
            )?,
            energy_decay_90_s: energy_decay_time(e, 0.9, sample_rate_hz),
        })
    }
}

/// Number of samples in a trailing window of `window_s` seconds, clamped to
/// `[1, len]`.
pub fn final_window_len(window_s: f64, sample_rate_hz: f64, len: usize) -> usize {
    ((window_s * sample_rate_hz).round() as usize).clamp(1, len.max(1))
}
