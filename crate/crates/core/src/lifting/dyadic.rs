use num_complex::Complex64;

use super::{axis_windings, nearest_phase, residual, LiftMethod, LiftResult};
use crate::besov::haar_average_norm;
use crate::grid::{mean_pyramid, BesovParams, CircleMap, Domain, GridFunction};
use crate::par;

/// Per-level data of the dyadic lifting: normalized averages `U_j` and phases `phi_j`,
/// both stored at their own level (`2^(dim*j)` entries).
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicTrace {
    pub normalized: Vec<Vec<Complex64>>,
    pub phases: Vec<Vec<f64>>,
}

impl DyadicTrace {
    pub fn levels(&self) -> usize {
        self.phases.len()
    }
}

fn normalize(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// Builds `U_j = E_j(u)/|E_j(u)|` (1 where the average vanishes) and the phases
/// `phi_0 = Arg U_0`, `phi_j = nearest_phase(U_j, phi_{j-1})` for `j = 0..=J`.
pub fn dyadic_trace(u: &CircleMap) -> DyadicTrace {
    let grid = *u.grid();
    let dim = grid.dim();
    let pyramid = mean_pyramid(u.as_function());
    let normalized: Vec<Vec<Complex64>> =
        pyramid.iter().map(|lvl| par::map_range(lvl.len(), |i| normalize(lvl[i]))).collect();
    let mut phases: Vec<Vec<f64>> = Vec::with_capacity(normalized.len());
    phases.push(normalized[0].iter().map(|z| z.arg()).collect());
    for j in 1..normalized.len() {
        let prev = &phases[j - 1];
        let cur = &normalized[j];
        let mask = (1usize << j) - 1;
        let next = par::map_range(cur.len(), |i| {
            // parent index at level j-1
            let parent = (0..dim).fold(0usize, |acc, axis| {
                let c = (i >> (j * (dim - 1 - axis))) & mask;
                (acc << (j - 1)) | (c >> 1)
            });
            nearest_phase(cur[i], prev[parent])
        });
        phases.push(next);
    }
    DyadicTrace { normalized, phases }
}

/// Dyadic lifting. Always succeeds; `norm_ratio` is reported when `s p < 1`.
pub fn lift_dyadic(u: &CircleMap, params: &BesovParams) -> LiftResult {
    let grid = *u.grid();
    let trace = dyadic_trace(u);
    let top = trace.phases.last().expect("at least level 0").clone();
    let level_increments = (1..trace.levels())
        .map(|j| {
            let (cur, prev) = (&trace.phases[j], &trace.phases[j - 1]);
            let fine_grid = grid.with_level(j).expect("coarser level is valid");
            par::max(cur.len(), |i| {
                (cur[i] - prev[crate::grid::ancestor(&fine_grid, i, j - 1)]).abs()
            })
        })
        .collect();
    let phase = GridFunction::from_real_parts(grid, top);
    let phase_values = phase.real_parts();
    let norm_ratio = (params.sp() < 1.0).then(|| {
        let p = params.with_dim(grid.dim());
        let num = haar_average_norm(&phase, &p).map(|r| r.total).unwrap_or(f64::NAN);
        let den = haar_average_norm(u.as_function(), &p).map(|r| r.total).unwrap_or(f64::NAN);
        num / den
    });
    let axis = match grid.domain() {
        Domain::Torus => axis_windings(u).unwrap_or_default(),
        Domain::Cube => vec![0; grid.dim()],
    };
    LiftResult {
        method: LiftMethod::Dyadic,
        residual: residual(&phase_values, u),
        phase,
        axis_windings: axis,
        level_increments,
        norm_ratio,
        ladder: Vec::new(),
    }
}
