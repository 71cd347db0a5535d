use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Angular gaps at or above `PI - DEGENERATE_MARGIN` have no well-defined principal increment.
pub const DEGENERATE_MARGIN: f64 = 1e-6;

/// Representative of `x` modulo `2 pi` in `(-pi, pi]`.
pub fn principal(x: f64) -> f64 {
    x - TAU * ((x - PI) / TAU).ceil()
}

/// The phase `theta` of `z` with `theta` in `(prev - pi, prev + pi]`; a tie at distance
/// exactly `pi` goes upward.
pub fn nearest_phase(z: Complex64, prev: f64) -> f64 {
    let base = z.arg();
    let d = base - prev;
    base - TAU * ((d - PI) / TAU).ceil()
}

/// Principal-value phase increment `Arg(b * conj(a))` in `(-pi, pi]`.
pub fn increment(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

/// Increment from cell `from` to cell `to`, rejecting gaps too close to `pi`.
pub fn checked_increment(values: &[Complex64], from: usize, to: usize) -> Result<f64> {
    let d = increment(values[from], values[to]);
    if d.abs() >= PI - DEGENERATE_MARGIN {
        return Err(Error::DegenerateEdge { from, to, gap: d.abs() });
    }
    Ok(d)
}

/// Rounds an accumulated phase to a winding number.
pub(crate) fn winding_of(total: f64) -> i64 {
    (total / TAU).round() as i64
}
