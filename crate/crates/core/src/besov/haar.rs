use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{lq_aggregate, validity, LevelTerm, NormMethod, NormReport};
use crate::error::{Error, Result};
use crate::grid::{ancestor, mean_pyramid, BesovParams, DyadicGrid, Exponent, GridFunction};
use crate::par;

/// Coefficients of one Haar level.
///
/// A label is a bit mask over the axes: bit `r` set means `psi_M` along axis `r`, clear
/// means `psi_F`. Level 0 carries every label (the scaling label `0` included), finer
/// levels omit label `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarLevel {
    pub j: usize,
    pub labels: Vec<u8>,
    /// `coeffs[g][m]` for `labels[g]` and position `m` (lexicographic at level `j`).
    pub coeffs: Vec<Vec<Complex64>>,
}

/// The family `mu^{j,G}_m = 2^(j(s - n/p + n/2)) int f Psi^{j,G}_m`, `0 <= j <= J-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarCoefficients {
    pub grid: DyadicGrid,
    pub params: BesovParams,
    pub levels: Vec<HaarLevel>,
}

impl HaarCoefficients {
    pub fn level_max(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn count(&self) -> usize {
        self.levels.iter().flat_map(|l| &l.coeffs).map(Vec::len).sum()
    }

    /// The coefficient at `(j, label, m)`; `None` for labels absent at level `j`.
    pub fn get(&self, j: usize, label: u8, m: usize) -> Option<Complex64> {
        let lvl = self.levels.get(j)?;
        let g = lvl.labels.iter().position(|&l| l == label)?;
        lvl.coeffs[g].get(m).copied()
    }

    fn scale(&self, j: usize) -> f64 {
        coefficient_scale(&self.params, self.grid.dim(), j)
    }
}

/// `2^(j(s - n/p + n/2))`.
fn coefficient_scale(params: &BesovParams, dim: usize, j: usize) -> f64 {
    let n = dim as f64;
    2f64.powf(j as f64 * (params.s - n / params.p + n / 2.0))
}

fn labels_at(dim: usize, j: usize, level: usize) -> Vec<u8> {
    if level == 0 {
        return vec![0];
    }
    let first = if j == 0 { 0 } else { 1 };
    (first..(1u8 << dim)).collect()
}

/// Child index of parent `m` (level `j`) for the child bit mask `b` (bit `r` = upper half
/// along axis `r`).
fn child_index(dim: usize, j: usize, m: usize, b: usize) -> usize {
    let mask = (1usize << j) - 1;
    (0..dim).fold(0usize, |acc, axis| {
        let pc = (m >> (j * (dim - 1 - axis))) & mask;
        let bit = (b >> axis) & 1;
        (acc << (j + 1)) | (2 * pc + bit)
    })
}

fn sign(label: u8, b: usize) -> f64 {
    if (label as usize & b).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Exact Haar analysis from cell averages.
pub fn haar_coeff_decompose(f: &GridFunction, params: &BesovParams) -> HaarCoefficients {
    let grid = *f.grid();
    let dim = grid.dim();
    let level = grid.level();
    let pyramid = mean_pyramid(f);
    let children = 1usize << dim;
    let params = params.with_dim(dim);
    let levels = if level == 0 {
        vec![HaarLevel { j: 0, labels: vec![0], coeffs: vec![vec![pyramid[0][0]]] }]
    } else {
        (0..level)
            .map(|j| {
                let labels = labels_at(dim, j, level);
                let fine = &pyramid[j + 1];
                // 2^(j(s-n/p)) 2^(-n) sum_c sign * mean_{j+1}
                let factor = 2f64.powf(j as f64 * (params.s - dim as f64 / params.p)) / children as f64;
                let coeffs = labels
                    .iter()
                    .map(|&g| {
                        par::map_range(1usize << (dim * j), |m| {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for b in 0..children {
                                acc += fine[child_index(dim, j, m, b)] * sign(g, b);
                            }
                            acc * factor
                        })
                    })
                    .collect();
                HaarLevel { j, labels, coeffs }
            })
            .collect()
    };
    HaarCoefficients { grid, params, levels }
}

/// Inverse of [`haar_coeff_decompose`].
pub fn haar_synthesize(c: &HaarCoefficients) -> GridFunction {
    let grid = c.grid;
    let dim = grid.dim();
    let first = &c.levels[0];
    let mut means = vec![first.coeffs[first.labels.iter().position(|&l| l == 0).expect("scaling label")][0]];
    for lvl in c.levels.iter().take(grid.level()) {
        let j = lvl.j;
        // <f, Psi> = mu 2^(-j(s - n/p + n/2)); Psi is 2^(nj/2) sign on each child
        let unscale = 2f64.powf(dim as f64 * j as f64 / 2.0) / c.scale(j);
        let fine_grid = grid.with_level(j + 1).expect("level within grid");
        let next = par::map_range(fine_grid.len(), |i| {
            let m = ancestor(&fine_grid, i, j);
            let fc = fine_grid.coords(i);
            let b = (0..dim).fold(0usize, |acc, axis| acc | ((fc[axis] & 1) << axis));
            let mut v = means[m];
            for (g, &label) in lvl.labels.iter().enumerate() {
                if label != 0 {
                    v += lvl.coeffs[g][m] * (sign(label, b) * unscale);
                }
            }
            v
        });
        means = next;
    }
    GridFunction::from_parts(grid, means)
}

/// `Psi^{j,G}_m` as cell averages on `grid` (requires `j < J`).
pub fn haar_basis_function(grid: &DyadicGrid, j: usize, label: u8, m: usize) -> Result<GridFunction> {
    let dim = grid.dim();
    if j >= grid.level().max(1) {
        return Err(Error::LevelOutOfRange { level: j, max: grid.level().saturating_sub(1) });
    }
    if label as usize >= (1 << dim) || (j > 0 && label == 0) || (grid.level() == 0 && label != 0) || m >= 1 << (dim * j) {
        return Err(Error::InvalidParams(format!("no Haar function with label {label} at ({j}, {m})")));
    }
    let amp = 2f64.powf(dim as f64 * j as f64 / 2.0);
    let level = grid.level();
    let values = par::map_range(grid.len(), |i| {
        if level == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if ancestor(grid, i, j) != m {
            return Complex64::new(0.0, 0.0);
        }
        let c = grid.coords(i);
        let b = (0..dim).fold(0usize, |acc, axis| acc | (((c[axis] >> (level - j - 1)) & 1) << axis));
        Complex64::new(amp * sign(label, b), 0.0)
    });
    Ok(GridFunction::from_parts(*grid, values))
}

/// `(sum_j sum_G (sum_m |mu|^p)^(q/p))^(1/q)`, sup over `(j, G)` for `q = inf`.
///
/// The level terms are `(sum_G (sum_m |mu|^p)^(q/p))^(1/q)`; the total is aggregated
/// directly over all `(j, G)` blocks.
pub fn haar_coeff_norm(c: &HaarCoefficients, params: &BesovParams) -> NormReport {
    let p = params.p;
    let dim = c.grid.dim();
    let block_norm = |v: &[Complex64]| {
        let abs: Vec<f64> = v.iter().map(|z| z.norm()).collect();
        lq_aggregate(&abs, Exponent::Finite(p))
    };
    let blocks: Vec<Vec<f64>> = c
        .levels
        .iter()
        .map(|lvl| {
            let rescale = coefficient_scale(params, dim, lvl.j) / c.scale(lvl.j);
            lvl.coeffs.iter().map(|v| block_norm(v) * rescale).collect()
        })
        .collect();
    let levels = blocks
        .iter()
        .zip(&c.levels)
        .map(|(b, lvl)| LevelTerm { j: lvl.j, term: lq_aggregate(b, params.q) })
        .collect();
    let all: Vec<f64> = blocks.into_iter().flatten().collect();
    NormReport {
        params: params.with_dim(dim),
        method: NormMethod::HaarCoeff,
        levels,
        total: lq_aggregate(&all, params.q),
        equivalent: validity(params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Domain};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(dim: usize) -> BesovParams {
        BesovParams::finite(0.3, 2.0, 2.0, dim).unwrap()
    }

    fn random(grid: DyadicGrid, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..grid.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        GridFunction::new(grid, v).unwrap()
    }

    #[test]
    fn count_is_full() {
        for (dim, level) in [(1, 0), (1, 5), (2, 3), (3, 2)] {
            let g = make_grid(dim, level, Domain::Cube).unwrap();
            let c = haar_coeff_decompose(&GridFunction::zeros(g), &params(dim));
            assert_eq!(c.count(), g.len());
        }
    }

    #[test]
    fn constant_has_single_scaling_coefficient() {
        let g = make_grid(2, 4, Domain::Cube).unwrap();
        let c = haar_coeff_decompose(&GridFunction::constant(g, Complex64::new(1.5, 0.0)), &params(2));
        assert_eq!(c.get(0, 0, 0), Some(Complex64::new(1.5, 0.0)));
        let nonzero = c.levels.iter().flat_map(|l| l.coeffs.iter().flatten()).filter(|z| z.norm() != 0.0).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn basis_function_has_single_coefficient() {
        for dim in 1..=3 {
            let g = make_grid(dim, 4.min(8 / dim), Domain::Cube).unwrap();
            let p = params(dim);
            for label in 1..(1u8 << dim) {
                let m = (1usize << dim) - 1;
                let psi = haar_basis_function(&g, 1, label, m).unwrap();
                let c = haar_coeff_decompose(&psi, &p);
                let want = 2f64.powf(p.s - dim as f64 / p.p + dim as f64 / 2.0);
                for lvl in &c.levels {
                    for (gi, &l) in lvl.labels.iter().enumerate() {
                        for (mi, z) in lvl.coeffs[gi].iter().enumerate() {
                            let expected = if (lvl.j, l, mi) == (1, label, m) { want } else { 0.0 };
                            assert!((z - expected).norm() < 1e-12, "dim {dim} ({}, {l}, {mi})", lvl.j);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn orthonormal() {
        let g = make_grid(2, 3, Domain::Cube).unwrap();
        let mut all = Vec::new();
        for j in 0..3 {
            for label in labels_at(2, j, 3) {
                for m in 0..(1usize << (2 * j)) {
                    all.push(haar_basis_function(&g, j, label, m).unwrap());
                }
            }
        }
        assert_eq!(all.len(), g.len());
        for (a, fa) in all.iter().enumerate() {
            for (b, fb) in all.iter().enumerate() {
                let ip: f64 = fa.values().iter().zip(fb.values()).map(|(x, y)| x.re * y.re).sum::<f64>() * g.cell_volume();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reconstruction() {
        for (dim, level) in [(1, 3), (2, 3), (3, 3), (1, 0)] {
            let g = make_grid(dim, level, Domain::Torus).unwrap();
            let f = random(g, 7 + dim as u64);
            let back = haar_synthesize(&haar_coeff_decompose(&f, &params(dim)));
            let err = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < 1e-12, "dim {dim}: {err}");
        }
    }

    #[test]
    fn norm_examples() {
        let g = make_grid(1, 4, Domain::Cube).unwrap();
        let p = params(1);
        let zero = haar_coeff_decompose(&GridFunction::zeros(g), &p);
        assert_eq!(haar_coeff_norm(&zero, &p).total, 0.0);
        let psi = haar_basis_function(&g, 2, 1, 3).unwrap();
        let c = haar_coeff_decompose(&psi, &p);
        let mu = c.get(2, 1, 3).unwrap().norm();
        for q in [Exponent::Finite(1.0), Exponent::Finite(3.0), Exponent::Infinite] {
            assert_eq!(haar_coeff_norm(&c, &p.with_q(q)).total, mu);
        }
    }

    #[test]
    fn q_monotone() {
        let g = make_grid(2, 5, Domain::Cube).unwrap();
        let f = random(g, 3);
        let c = haar_coeff_decompose(&f, &params(2));
        let qs = [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinite];
        let totals: Vec<f64> = qs.iter().map(|&q| haar_coeff_norm(&c, &params(2).with_q(q)).total).collect();
        assert!(totals.windows(2).all(|w| w[1] <= w[0]), "{totals:?}");
    }
}
