//! Kalman-filter ANC controller.
//!
//! The control filter is modeled as a constant state observed through the
//! filtered reference:
//!
//! ```text
//! state:        w(n+1) = w(n) = w_o
//! observation:  d(n)   = x'ᵀ(n) w_o + e_o(n),   E[e_o²] = q
//! ```
//!
//! With an identity transition and no process noise the recursion is
//!
//! ```text
//! ŵ(n)      = w(n-1)
//! P(n,n-1)  = P(n-1)
//! K(n)      = P(n,n-1) x'(n) / (x'ᵀ(n) P(n,n-1) x'(n) + q)
//! w(n)      = ŵ(n) + K(n) [d(n) - x'ᵀ(n) ŵ(n)]
//! P(n)      = [I - K(n) x'ᵀ(n)] P(n,n-1)
//! ```
//!
//! which makes `w(n)` the ridge-regression solution over all observations so
//! far with penalty `q / p0` (see [`ridge_oracle`]).

use nalgebra::{DMatrix, DVector};

use crate::delay::DelayLine;
use crate::dsp::dot_unchecked;
use crate::error::{AncError, Result};
use crate::signal::FirPath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanConfig {
    pub filter_len: usize,
    /// Observation-noise variance.
    pub q: f64,
    /// Initial covariance is `p0_scale * I`.
    pub p0_scale: f64,
}

impl KalmanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.filter_len == 0 {
            return Err(AncError::invalid("filter_len", "must be at least 1"));
        }
        if !(self.q > 0.0) || !self.q.is_finite() {
            return Err(AncError::invalid("q", "must be positive and finite"));
        }
        if !(self.p0_scale > 0.0) || !self.p0_scale.is_finite() {
            return Err(AncError::invalid("p0_scale", "must be positive and finite"));
        }
        Ok(())
    }
}

/// Output of one Kalman step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanStep {
    /// `x'ᵀ(n) ŵ(n)`, the predicted observation.
    pub output: f64,
    /// Innovation `d(n) - output`.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct KalmanState {
    weights: Vec<f64>,
    covariance: DMatrix<f64>,
    q: f64,
    filtref_line: DelayLine,
    gain: Vec<f64>,
    p_x: Vec<f64>,
}

impl KalmanState {
    pub fn new(config: KalmanConfig) -> Result<Self> {
        config.validate()?;
        let n = config.filter_len;
        Ok(KalmanState {
            weights: vec![0.0; n],
            covariance: DMatrix::identity(n, n) * config.p0_scale,
            q: config.q,
            filtref_line: DelayLine::new(n),
            gain: vec![0.0; n],
            p_x: vec![0.0; n],
        })
    }

    pub fn filter_len(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Kalman gain from the most recent step.
    pub fn gain(&self) -> &[f64] {
        &self.gain
    }

    pub fn obs_noise_var(&self) -> f64 {
        self.q
    }

    /// Replaces the observation-noise variance used by [`KalmanState::step`].
    pub fn set_obs_noise_var(&mut self, q: f64) -> Result<()> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(AncError::invalid("q", "must be positive and finite"));
        }
        self.q = q;
        Ok(())
    }

    /// Filtered-reference vector `x'(n)`, newest first.
    pub fn filtered_reference(&self) -> &[f64] {
        self.filtref_line.as_slice()
    }

    /// Pushes `x'(n)` into the regressor line and runs one recursion against
    /// observation `d(n)`.
    pub fn step(&mut self, xprime: f64, d: f64) -> Result<KalmanStep> {
        self.step_with_obs_noise(xprime, d, self.q)
    }

    /// [`KalmanState::step`] with a per-sample observation-noise variance,
    /// for callers supplying their own `q(n)` schedule.
    pub fn step_with_obs_noise(&mut self, xprime: f64, d: f64, q: f64) -> Result<KalmanStep> {
        if !xprime.is_finite() {
            return Err(AncError::invalid("xprime", "must be finite"));
        }
        if !(q > 0.0) || !q.is_finite() {
            return Err(AncError::invalid("q", "must be positive and finite"));
        }
        check_observation(d)?;
        self.filtref_line.push(xprime);
        let regressor = self.filtref_line.as_slice().to_vec();
        Ok(self.update_unchecked(&regressor, d, q))
    }

    /// Pushes `x'(n)` and evaluates the innovation without touching the
    /// weights or covariance.
    pub fn observe(&mut self, xprime: f64, d: f64) -> Result<KalmanStep> {
        if !xprime.is_finite() {
            return Err(AncError::invalid("xprime", "must be finite"));
        }
        check_observation(d)?;
        self.filtref_line.push(xprime);
        let output = dot_unchecked(self.filtref_line.as_slice(), &self.weights);
        Ok(KalmanStep {
            output,
            error: d - output,
        })
    }

    /// One recursion against an explicit regressor vector, bypassing the
    /// internal delay line.
    pub fn update(&mut self, regressor: &[f64], d: f64) -> Result<KalmanStep> {
        if regressor.len() != self.weights.len() {
            return Err(AncError::LengthMismatch {
                left: regressor.len(),
                right: self.weights.len(),
            });
        }
        if let Some(index) = regressor.iter().position(|v| !v.is_finite()) {
            return Err(AncError::NonFinite { index });
        }
        check_observation(d)?;
        Ok(self.update_unchecked(regressor, d, self.q))
    }

    fn update_unchecked(&mut self, x: &[f64], d: f64, q: f64) -> KalmanStep {
        let n = self.weights.len();
        let output = dot_unchecked(x, &self.weights);
        let error = d - output;

        // P is kept exactly symmetric, so Pᵀx' = Px' and the update
        // (I - K x'ᵀ) P reduces to P - K (P x')ᵀ.
        let p = &self.covariance;
        for i in 0..n {
            self.p_x[i] = dot_unchecked(p.column(i).as_slice(), x);
        }
        let denom = dot_unchecked(x, &self.p_x) + q;
        assert!(denom > 0.0, "innovation variance must be positive");
        for i in 0..n {
            self.gain[i] = self.p_x[i] / denom;
            self.weights[i] += self.gain[i] * error;
        }

        let (k, px) = (&self.gain, &self.p_x);
        let p = &mut self.covariance;
        for j in 0..n {
            for i in 0..j {
                let upper = p[(i, j)] - k[i] * px[j];
                let lower = p[(j, i)] - k[j] * px[i];
                let v = 0.5 * (upper + lower);
                p[(i, j)] = v;
                p[(j, i)] = v;
            }
            p[(j, j)] -= k[j] * px[j];
        }

        KalmanStep { output, error }
    }
}

fn check_observation(d: f64) -> Result<()> {
    if d.is_finite() {
        Ok(())
    } else {
        Err(AncError::invalid("d", "must be finite"))
    }
}

/// Ridge-regression solution `argmin Σ (dᵢ - xᵢᵀw)² + (q/p0)‖w‖²`, solved
/// directly from the normal equations `(XᵀX + (q/p0) I) w = Xᵀd`.
///
/// After `M` steps from `w = 0`, `P = p0 I` the Kalman recursion lands on
/// this same vector, so it serves as an independent check.
pub fn ridge_oracle(
    regressors: &DMatrix<f64>,
    observations: &DVector<f64>,
    q: f64,
    p0_scale: f64,
) -> Result<DVector<f64>> {
    let (m, n) = regressors.shape();
    if m == 0 || n == 0 {
        return Err(AncError::BadMatrixShape { rows: m, cols: n });
    }
    if observations.len() != m {
        return Err(AncError::LengthMismatch {
            left: observations.len(),
            right: m,
        });
    }
    if !(q >= 0.0) || !(p0_scale > 0.0) {
        return Err(AncError::invalid("q", "q must be >= 0 and p0_scale > 0"));
    }
    let mut normal = regressors.transpose() * regressors;
    for i in 0..n {
        normal[(i, i)] += q / p0_scale;
    }
    let rhs = regressors.transpose() * observations;
    let chol = normal.cholesky().ok_or(AncError::Singular)?;
    Ok(chol.solve(&rhs))
}

/// Reconstructs the disturbance from the measured error:
/// `d̂(n) = e(n) + (ŝ * y)(n)`, with `y_history` holding the control outputs
/// newest first.
pub fn recover_disturbance(
    error: f64,
    y_history: &DelayLine,
    sec_estimate: &FirPath,
) -> Result<f64> {
    let taps = sec_estimate.coefficients();
    let history = y_history.as_slice();
    if history.len() < taps.len() {
        return Err(AncError::LengthMismatch {
            left: history.len(),
            right: taps.len(),
        });
    }
    Ok(error + dot_unchecked(taps, &history[..taps.len()]))
}
