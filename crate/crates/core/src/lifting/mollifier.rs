use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{axis_windings, dyadic_trace, nearest_phase, residual, LiftMethod, LiftResult};
use crate::error::{Error, Result};
use crate::grid::{mollify, CircleMap, Domain, DyadicGrid, GridFunction};
use crate::par;

/// Diagnostics for one rung of the mollifier ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub eps: f64,
    /// `min |F(x, eps)|` over all cells.
    pub min_modulus: f64,
    /// Whether this rung lies in the tracked range where `|F| > 1/2` holds from here down.
    pub tracked: bool,
}

/// `2^-2, 2^-3, ..., 2^-(J-1)`, or just `2^-2` on grids of level 2 or 3.
pub fn default_ladder(grid: &DyadicGrid) -> Vec<f64> {
    let last = grid.level().saturating_sub(1).max(2);
    if grid.level() < 2 {
        return Vec::new();
    }
    (2..=last).map(|j| (0.5f64).powi(j as i32)).collect()
}

fn check_ladder(grid: &DyadicGrid, ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::InvalidParams("mollifier ladder is empty".into()));
    }
    for &eps in ladder {
        if !(eps >= grid.mesh() && eps <= 0.25) {
            return Err(Error::EpsOutOfRange(eps));
        }
    }
    if ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams("mollifier ladder must be strictly decreasing".into()));
    }
    Ok(())
}

/// `2 pi w . x` at cell centers.
fn linear_phase(grid: &DyadicGrid, w: &[i64]) -> Vec<f64> {
    par::map_range(grid.len(), |i| {
        let c = grid.center(i);
        TAU * w.iter().enumerate().map(|(a, &k)| k as f64 * c[a]).sum::<f64>()
    })
}

/// Lifting by phase tracking along a ladder of mollifications (torus grids only).
///
/// The exact linear phase `2 pi w . x` of the axis windings `w` is removed first and added
/// back at the end. `ladder = None` uses [`default_ladder`].
pub fn lift_mollifier(u: &CircleMap, ladder: Option<&[f64]>) -> Result<LiftResult> {
    let grid = *u.grid();
    if grid.domain() != Domain::Torus {
        return Err(Error::DomainMismatch("mollifier lifting needs a torus grid".into()));
    }
    let default;
    let ladder = match ladder {
        Some(l) => l,
        None => {
            default = default_ladder(&grid);
            &default
        }
    };
    check_ladder(&grid, ladder)?;

    let w = axis_windings(u)?;
    let lin = linear_phase(&grid, &w);
    let values = u.values();
    let remainder: Vec<Complex64> =
        par::map_range(grid.len(), |i| values[i] * Complex64::from_polar(1.0, -lin[i]));
    let remainder = GridFunction::from_parts(grid, remainder);

    let mut fields = Vec::with_capacity(ladder.len());
    let mut steps = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let f = mollify(&remainder, eps)?;
        let (cell, min_modulus) = f
            .values()
            .iter()
            .map(|z| z.norm())
            .enumerate()
            .fold((0, f64::INFINITY), |best, (i, m)| if m < best.1 { (i, m) } else { best });
        steps.push((LadderStep { eps, min_modulus, tracked: false }, cell));
        fields.push(f);
    }
    let (last, cell) = steps[steps.len() - 1];
    if last.min_modulus <= 0.5 {
        return Err(Error::ModulusCollapse { eps: last.eps, cell });
    }
    let start = steps.iter().rposition(|(s, _)| s.min_modulus <= 0.5).map_or(0, |k| k + 1);
    for (s, _) in &mut steps[start..] {
        s.tracked = true;
    }

    let unit = |f: &GridFunction| -> Result<CircleMap> {
        CircleMap::new(f.map(|z| z / z.norm()))
    };
    let seed = unit(&fields[start])?;
    let mut psi = dyadic_trace(&seed).phases.pop().expect("finest level");
    let mut level_increments = Vec::new();
    for f in &fields[start + 1..] {
        let vals = f.values();
        let next = par::map_range(grid.len(), |i| nearest_phase(vals[i] / vals[i].norm(), psi[i]));
        level_increments.push(par::max(grid.len(), |i| (next[i] - psi[i]).abs()));
        psi = next;
    }
    let rem = remainder.values();
    let phase = par::map_range(grid.len(), |i| nearest_phase(rem[i], psi[i]) + lin[i]);

    Ok(LiftResult {
        method: LiftMethod::Mollifier,
        residual: residual(&phase, u),
        phase: GridFunction::from_real_parts(grid, phase),
        axis_windings: w,
        level_increments,
        norm_ratio: None,
        ladder: steps.into_iter().map(|(s, _)| s).collect(),
    })
}
