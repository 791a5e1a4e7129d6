//! Tapped delay line holding the most recent samples, newest first.

/// Fixed-capacity tapped delay line.
///
/// Samples are written twice into a buffer of length `2 * capacity` so that
/// [`DelayLine::as_slice`] can always hand out the taps as one contiguous
/// slice in reverse-chronological order, without rotating memory on push.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayLine {
    buffer: Vec<f64>,
    head: usize,
    capacity: usize,
}

impl DelayLine {
    /// A zero-filled line of `capacity` taps.
    ///
    /// Panics if `capacity` is zero.
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "delay line capacity must be positive");
        DelayLine {
            buffer: vec![0.0; 2 * capacity],
            head: 0,
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Shifts every tap one place older and stores `sample` as the newest.
    pub fn push(&mut self, sample: f64) {
        self.head = if self.head == 0 {
            self.capacity - 1
        } else {
            self.head - 1
        };
        self.buffer[self.head] = sample;
        self.buffer[self.head + self.capacity] = sample;
    }

    /// Taps in reverse-chronological order: `[x(n), x(n-1), ..., x(n-N+1)]`.
    pub fn as_slice(&self) -> &[f64] {
        &self.buffer[self.head..self.head + self.capacity]
    }

    /// The most recently pushed sample.
    pub fn newest(&self) -> f64 {
        self.buffer[self.head]
    }

    pub fn reset(&mut self) {
        self.buffer.fill(0.0);
        self.head = 0;
    }
}
