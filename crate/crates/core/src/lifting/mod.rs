//! Lifting circle-valued grid maps `u = e^{i phi}`.
//!
//! Three constructions are provided: dyadic averaging with nearest-phase refinement,
//! phase tracking along a mollifier ladder, and breadth-first continuous unwrapping
//! that reports a winding loop when no continuous phase exists.

mod continuous;
mod dyadic;
mod mollifier;
mod phase;
mod windings;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{CircleMap, GridFunction};

pub use continuous::lift_continuous;
pub use dyadic::{dyadic_trace, lift_dyadic, DyadicTrace};
pub use mollifier::{default_ladder, lift_mollifier, LadderStep};
pub use phase::{checked_increment, increment, nearest_phase, principal, DEGENERATE_MARGIN};
pub use windings::axis_windings;

pub(crate) use phase::winding_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftMethod {
    Dyadic,
    Mollifier,
    Continuous,
}

impl std::fmt::Display for LiftMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LiftMethod::Dyadic => "dyadic",
            LiftMethod::Mollifier => "mollifier",
            LiftMethod::Continuous => "continuous",
        })
    }
}

/// A closed loop of cells together with the winding of `u` along it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionWitness {
    /// Consecutive entries are grid neighbours and the last cell neighbours the first.
    pub loop_cells: Vec<usize>,
    pub winding: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    pub method: LiftMethod,
    pub phase: GridFunction,
    /// Degree along each coordinate loop through cell 0 (torus), zeros on the cube.
    pub axis_windings: Vec<i64>,
    /// `max |e^{i phi} conj(u) - 1|`.
    pub residual: f64,
    /// Per refinement step, `max |phi_j - phi_{j-1}|` (dyadic levels or ladder steps).
    pub level_increments: Vec<f64>,
    pub norm_ratio: Option<f64>,
    /// Mollifier ladder diagnostics; empty for the other methods.
    pub ladder: Vec<LadderStep>,
}

impl LiftResult {
    pub fn phase_values(&self) -> Vec<f64> {
        self.phase.real_parts()
    }
}

/// `max |e^{i phi} conj(u) - 1|` over all cells.
pub fn residual(phase: &[f64], u: &CircleMap) -> f64 {
    let values = u.values();
    crate::par::max(phase.len(), |i| {
        (Complex64::from_polar(1.0, phase[i]) * values[i].conj() - 1.0).norm()
    })
    .max(0.0)
}
