//! Generators for the explicit constructions: the vortex, the non-restriction
//! function built on a greedy dyadic covering, and integer-valued step functions.

mod nonrestriction;
mod steps;
mod tempseq;
mod vortex;

pub use nonrestriction::{instance_rows, scan_to_csv, 
    nonrestriction, nonrestriction_row, restriction_scan, InstanceKind, NonrestrictionSpec, RowStatistic,
};
pub use steps::{second_diff_domination_check, step_function, DominationCheck};
pub use tempseq::{default_u, default_v, tempseq, DyadicInterval};
pub use vortex::{radial_bump, vortex};

/// `C^inf` transition: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    let e = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let (a, b) = (e(t), e(1.0 - t));
    a / (a + b)
}
