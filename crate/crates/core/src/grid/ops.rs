use num_complex::Complex64;

use super::{Domain, DyadicGrid, GridFunction};
use crate::error::{Error, Result};
use crate::par;

pub const MAX_DIFF_ORDER: usize = 8;

fn binomial(m: usize, l: usize) -> f64 {
    (0..l).fold(1u64, |acc, i| acc * (m - i) as u64 / (i as u64 + 1)) as f64
}

/// `M`-th order finite difference with step `h` (in cells):
/// `sum_l (-1)^(M-l) C(M,l) f(x + l h)`. On the cube the result is zero wherever
/// some `x + l h` falls outside.
pub fn diff(f: &GridFunction, order: usize, h: &[isize]) -> Result<GridFunction> {
    let grid = *f.grid();
    if order == 0 || order > MAX_DIFF_ORDER {
        return Err(Error::InvalidParams(format!("difference order {order} not in 1..=8")));
    }
    if h.len() != grid.dim() || h.iter().all(|&c| c == 0) {
        return Err(Error::InvalidParams("offset must be a nonzero vector of length dim".into()));
    }
    let weights: Vec<f64> = (0..=order)
        .map(|l| {
            let sign = if (order - l).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(order, l)
        })
        .collect();
    let side = grid.side() as isize;
    let values = f.values();
    let out = par::map_range(grid.len(), |i| {
        let c = grid.coords(i);
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, w) in weights.iter().enumerate() {
            let mut idx = 0usize;
            for axis in 0..grid.dim() {
                let t = c[axis] as isize + l as isize * h[axis];
                let t = match grid.domain() {
                    Domain::Torus => t.rem_euclid(side),
                    Domain::Cube if (0..side).contains(&t) => t,
                    Domain::Cube => return Complex64::new(0.0, 0.0),
                };
                idx = (idx << grid.level()) | t as usize;
            }
            acc += values[idx] * *w;
        }
        acc
    });
    Ok(GridFunction::from_parts(grid, out))
}

fn tree_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        1 => v[0],
        n => tree_sum(&v[..n / 2]) + tree_sum(&v[n / 2..]),
    }
}

/// One pyramid step: means of the `2^dim` children of each cell at `level - 1`.
fn coarsen(fine: &[Complex64], dim: usize, level: usize) -> Vec<Complex64> {
    let coarse_level = level - 1;
    let children = 1usize << dim;
    let scale = 1.0 / children as f64;
    par::map_range(1usize << (dim * coarse_level), |parent| {
        let mut kids = [Complex64::new(0.0, 0.0); 8];
        let pmask = (1usize << coarse_level) - 1;
        for (b, kid) in kids.iter_mut().enumerate().take(children) {
            let mut idx = 0usize;
            for axis in 0..dim {
                let pc = (parent >> (coarse_level * (dim - 1 - axis))) & pmask;
                let bit = (b >> (dim - 1 - axis)) & 1;
                idx = (idx << level) | (2 * pc + bit);
            }
            *kid = fine[idx];
        }
        tree_sum(&kids[..children]) * scale
    })
}

/// Cell means at every level `0..=J`; entry `j` holds `2^(dim*j)` values.
///
/// Children are combined by pairwise summation, so averaging a block of equal values
/// returns that value bit for bit and `E_j E_k = E_min(j,k)` holds exactly.
pub fn mean_pyramid(f: &GridFunction) -> Vec<Vec<Complex64>> {
    let grid = f.grid();
    let mut levels = vec![f.values().to_vec()];
    for level in (1..=grid.level()).rev() {
        let next = coarsen(levels.last().unwrap(), grid.dim(), level);
        levels.push(next);
    }
    levels.reverse();
    levels
}

/// Means over the dyadic cells of side `2^-j`.
pub fn level_means(f: &GridFunction, j: usize) -> Result<Vec<Complex64>> {
    let grid = f.grid();
    if j > grid.level() {
        return Err(Error::LevelOutOfRange { level: j, max: grid.level() });
    }
    let mut cur = f.values().to_vec();
    for level in ((j + 1)..=grid.level()).rev() {
        cur = coarsen(&cur, grid.dim(), level);
    }
    Ok(cur)
}

/// Index at level `j` of the dyadic ancestor of fine cell `index`.
pub(crate) fn ancestor(grid: &DyadicGrid, index: usize, j: usize) -> usize {
    let shift = grid.level() - j;
    let c = grid.coords(index);
    (0..grid.dim()).fold(0usize, |acc, axis| (acc << j) | (c[axis] >> shift))
}

/// Spreads coarse values (level `j`) back onto the fine grid.
pub(crate) fn broadcast(grid: &DyadicGrid, coarse: &[Complex64], j: usize) -> Vec<Complex64> {
    par::map_range(grid.len(), |i| coarse[ancestor(grid, i, j)])
}

/// `E_j f`: piecewise-constant average on dyadic cells of side `2^-j`, returned at the
/// level of `f`.
pub fn dyadic_average(f: &GridFunction, j: usize) -> Result<GridFunction> {
    let means = level_means(f, j)?;
    Ok(GridFunction::from_parts(*f.grid(), broadcast(f.grid(), &means, j)))
}

/// Partial map with the axes in `fixed_axes` (0-based) pinned to `cell_index`.
pub fn slice(f: &GridFunction, fixed_axes: &[usize], cell_index: &[usize]) -> Result<GridFunction> {
    let grid = *f.grid();
    let dim = grid.dim();
    if fixed_axes.is_empty() || fixed_axes.len() >= dim {
        return Err(Error::BadAxisSet(format!(
            "need a proper nonempty subset of {dim} axes, got {fixed_axes:?}"
        )));
    }
    let mut seen = [false; 3];
    for &a in fixed_axes {
        if a >= dim || seen[a] {
            return Err(Error::BadAxisSet(format!("axis set {fixed_axes:?} invalid")));
        }
        seen[a] = true;
    }
    if cell_index.len() != fixed_axes.len() || cell_index.iter().any(|&c| c >= grid.side()) {
        return Err(Error::BadAxisSet(format!("cell index {cell_index:?} out of range")));
    }
    let free: Vec<usize> = (0..dim).filter(|a| !seen[*a]).collect();
    let sub = DyadicGrid::new(free.len(), grid.level(), grid.domain())?;
    let values = f.values();
    let out = par::map_range(sub.len(), |i| {
        let sc = sub.coords(i);
        let mut full = [0usize; 3];
        for (k, &a) in free.iter().enumerate() {
            full[a] = sc[k];
        }
        for (k, &a) in fixed_axes.iter().enumerate() {
            full[a] = cell_index[k];
        }
        values[grid.index(&full)]
    });
    Ok(GridFunction::from_parts(sub, out))
}

/// Copies the block of `2^level` cells per axis starting at fine cell `origin` into a
/// cube-domain grid at `level`.
pub fn restrict_block(f: &GridFunction, origin: &[usize], level: usize) -> Result<GridFunction> {
    let grid = *f.grid();
    if origin.len() != grid.dim() {
        return Err(Error::InvalidParams("origin must have one entry per axis".into()));
    }
    let sub = DyadicGrid::new(grid.dim(), level, Domain::Cube)?;
    if origin.iter().any(|&o| o + sub.side() > grid.side()) {
        return Err(Error::InvalidParams(format!("block at {origin:?} leaves the grid")));
    }
    let values = f.values();
    let out = par::map_range(sub.len(), |i| {
        let sc = sub.coords(i);
        let mut full = [0usize; 3];
        for axis in 0..grid.dim() {
            full[axis] = origin[axis] + sc[axis];
        }
        values[grid.index(&full)]
    });
    Ok(GridFunction::from_parts(sub, out))
}
