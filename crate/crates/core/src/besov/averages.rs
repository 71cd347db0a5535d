use num_complex::Complex64;

use super::{lq_aggregate, validity, LevelTerm, NormMethod, NormReport};
use crate::error::{Error, Result};
use crate::grid::{ancestor, broadcast, lp_norm, mean_pyramid, BesovParams, GridFunction};
use crate::par;

/// `2^(sj) ||E_j f - E_(j-1) f||_p` for `j = 0..=J`, with `E_(-1) = 0`.
fn average_terms(f: &GridFunction, s: f64, p: f64) -> Vec<f64> {
    let grid = *f.grid();
    let pyramid = mean_pyramid(f);
    (0..=grid.level())
        .map(|j| {
            let cur = &pyramid[j];
            let weight = 2f64.powf(s * j as f64);
            let vol = 0.5f64.powi((grid.dim() * j) as i32);
            if j == 0 {
                return weight * lp_norm(cur, p, vol);
            }
            let lvl = grid.with_level(j).expect("coarser level is valid");
            let prev = &pyramid[j - 1];
            let d = par::map_range(cur.len(), |i| cur[i] - prev[ancestor(&lvl, i, j - 1)]);
            weight * lp_norm(&d, p, vol)
        })
        .collect()
}

/// `(sum_(j=0..J) 2^(sjq) ||E_j f - E_(j-1) f||_p^q)^(1/q)` with `E_(-1) = 0`.
///
/// Equivalent to the Besov norm only for `s p < 1`; outside that range the report is
/// still produced with `equivalent = false`.
pub fn haar_average_norm(f: &GridFunction, params: &BesovParams) -> Result<NormReport> {
    let terms = average_terms(f, params.s, params.p);
    Ok(NormReport {
        params: params.with_dim(f.grid().dim()),
        method: NormMethod::HaarAvg,
        total: lq_aggregate(&terms, params.q),
        levels: terms.into_iter().enumerate().map(|(j, term)| LevelTerm { j, term }).collect(),
        equivalent: validity(params),
    })
}

/// `(||E_0 f||_p^q + sum_(j=0..J) 2^(sjq) ||f - E_j f||_p^q)^(1/q)`.
pub fn telescoping_norm(f: &GridFunction, params: &BesovParams) -> Result<f64> {
    let grid = *f.grid();
    let pyramid = mean_pyramid(f);
    let values = f.values();
    let mut terms = vec![pyramid[0][0].norm()];
    for (j, means) in pyramid.iter().enumerate() {
        let spread = broadcast(&grid, means, j);
        let d: Vec<Complex64> = par::map_range(grid.len(), |i| values[i] - spread[i]);
        terms.push(2f64.powf(params.s * j as f64) * lp_norm(&d, params.p, grid.cell_volume()));
    }
    Ok(lq_aggregate(&terms, params.q))
}

/// Largest mean oscillation `|Q|^-1 int_Q |f - f_Q|` over dyadic cubes of side `<= eps`.
pub fn vmo_modulus(f: &GridFunction, eps: f64) -> Result<f64> {
    let grid = *f.grid();
    if !(eps >= grid.mesh()) {
        return Err(Error::EpsOutOfRange(eps));
    }
    let pyramid = mean_pyramid(f);
    let values = f.values();
    let mut best = 0.0f64;
    for j in 0..grid.level() {
        if 0.5f64.powi(j as i32) > eps {
            continue;
        }
        let spread = broadcast(&grid, &pyramid[j], j);
        let dev = par::map_range(grid.len(), |i| Complex64::new((values[i] - spread[i]).norm(), 0.0));
        let osc = GridFunction::from_parts(grid, dev);
        let local = crate::grid::level_means(&osc, j)?;
        best = best.max(local.iter().map(|z| z.re).fold(0.0, f64::max));
    }
    Ok(best)
}
