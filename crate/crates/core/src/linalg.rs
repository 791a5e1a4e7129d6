//! Autocorrelation estimates and the dominant-eigenvalue solver used by the
//! FxLMS step-size bound.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{AncError, Result};

const MAX_POWER_ITERATIONS: usize = 20_000;

/// Biased Toeplitz autocorrelation matrix of `signal`.
///
/// Entry `(i, j)` is `r[|i-j|]` with `r[k] = (1/M) * sum_{n=k}^{M-1} x[n] x[n-k]`.
/// Dividing by `M` for every lag keeps the estimate positive semidefinite.
pub fn autocorr_matrix(signal: &[f64], order: usize) -> Result<DMatrix<f64>> {
    if order == 0 {
        return Err(AncError::invalid("order", "must be at least 1"));
    }
    if signal.len() < order {
        return Err(AncError::SignalTooShort {
            len: signal.len(),
            order,
        });
    }
    let m = signal.len() as f64;
    let lags: Vec<f64> = (0..order)
        .map(|k| {
            signal[k..]
                .iter()
                .zip(signal)
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / m
        })
        .collect();
    Ok(DMatrix::from_fn(order, order, |i, j| lags[i.abs_diff(j)]))
}

/// Largest (algebraic) eigenvalue of a symmetric matrix by power iteration.
///
/// The matrix is shifted by its Gershgorin lower bound when that bound is
/// negative, so the dominant eigenvalue of the shifted matrix is the largest
/// eigenvalue of the original. Iteration stops once the Rayleigh-quotient
/// residual falls below `tol` relative to the estimate.
pub fn max_eigenvalue(matrix: &DMatrix<f64>, tol: f64) -> Result<f64> {
    let (rows, cols) = matrix.shape();
    if rows != cols || rows == 0 {
        return Err(AncError::BadMatrixShape { rows, cols });
    }
    if !(tol > 0.0) {
        return Err(AncError::invalid("tol", "must be positive"));
    }
    if let Some(index) = matrix.iter().position(|v| !v.is_finite()) {
        return Err(AncError::NonFinite { index });
    }
    let scale = matrix.amax();
    let asymmetry = (0..rows)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (matrix[(i, j)] - matrix[(j, i)]).abs())
        .fold(0.0, f64::max);
    if asymmetry > tol * scale.max(1.0) {
        return Err(AncError::NotSymmetric { tol, asymmetry });
    }
    if scale == 0.0 {
        return Ok(0.0);
    }

    let sym = (matrix + matrix.transpose()) * 0.5;
    let gershgorin_low = (0..rows)
        .map(|i| {
            let off: f64 = (0..rows)
                .filter(|&j| j != i)
                .map(|j| sym[(i, j)].abs())
                .sum();
            sym[(i, i)] - off
        })
        .fold(f64::INFINITY, f64::min);
    let shift = if gershgorin_low < 0.0 {
        -gershgorin_low
    } else {
        0.0
    };
    let mut shifted = sym;
    for i in 0..rows {
        shifted[(i, i)] += shift;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = DVector::from_fn(rows, |_, _| rng.random_range(0.5..1.5));
    v.normalize_mut();
    let mut w = DVector::zeros(rows);
    let mut rayleigh = 0.0;
    for _ in 0..MAX_POWER_ITERATIONS {
        w.gemv(1.0, &shifted, &v, 0.0);
        rayleigh = v.dot(&w);
        let residual = (&w - &v * rayleigh).norm();
        let norm = w.norm();
        if norm == 0.0 || residual <= tol * rayleigh.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        v.copy_from(&w);
        v /= norm;
    }
    Ok(rayleigh - shift)
}
