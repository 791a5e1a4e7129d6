//! Shared inputs for the criterion benchmarks.

use anc_core::{white_noise, Signal};

/// Unit-variance Gaussian input of `len` samples at 16 kHz.
pub fn noise_input(len: usize) -> Signal {
    white_noise(len, 42, 1.0, 16_000.0).expect("valid noise parameters")
}
