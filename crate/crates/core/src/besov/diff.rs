use num_complex::Complex64;

use super::{lq_aggregate, LevelTerm, NormMethod, NormReport};
use crate::error::{Error, Result};
use crate::grid::{BesovParams, Domain, Exponent, GridFunction};
use crate::par;

const MAX_ORDER: usize = 8;

fn binomial_weights(m: usize) -> Vec<f64> {
    let mut c = 1.0f64;
    (0..=m)
        .map(|l| {
            let w = if (m - l).is_multiple_of(2) { c } else { -c };
            c = c * (m - l) as f64 / (l + 1) as f64;
            w
        })
        .collect()
}

/// `||Delta^M_{k e_axis} f||_p` with the same boundary rules as [`crate::grid::diff`].
pub(crate) fn axis_diff_norm(f: &GridFunction, weights: &[f64], axis: usize, k: usize, p: f64) -> f64 {
    let grid = f.grid();
    let values = f.values();
    let stride = grid.stride(axis);
    let side = grid.side();
    let torus = grid.domain() == Domain::Torus;
    let s = par::sum(grid.len(), |i| {
        let c = (i / stride) % side;
        let base = i - c * stride;
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, w) in weights.iter().enumerate() {
            let mut t = c + l * k;
            if t >= side {
                if !torus {
                    return 0.0;
                }
                t %= side;
            }
            acc += values[base + t * stride] * *w;
        }
        acc.norm().powf(p)
    });
    (s * grid.cell_volume()).powf(1.0 / p)
}

fn check(f: &GridFunction, params: &BesovParams, m: usize, delta: f64) -> Result<()> {
    if !(m as f64 > params.s) {
        return Err(Error::MTooSmall { m, s: params.s });
    }
    if m > MAX_ORDER {
        return Err(Error::InvalidParams(format!("difference order {m} exceeds {MAX_ORDER}")));
    }
    if !(delta > 0.0 && delta <= 1.0 && delta >= f.grid().mesh()) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    Ok(())
}

/// Axis-aligned difference seminorm restricted to `|h| <= delta`.
///
/// Offsets are `h = +-k 2^-J` for `1 <= k <= delta 2^J`, each weighted by `1/k` for the
/// `dh/|h|` measure; all axes and both signs enter one `l^q` sum. Level `j` collects the
/// offsets with `2^(J-j) <= k < 2^(J-j+1)`.
pub fn diff_seminorm(f: &GridFunction, params: &BesovParams, m: usize, delta: f64) -> Result<NormReport> {
    check(f, params, m, delta)?;
    let grid = *f.grid();
    let level = grid.level();
    let kmax = (delta * grid.side() as f64).floor() as usize;
    let weights = binomial_weights(m);
    let h = grid.mesh();

    // terms per band, in band order b = floor(log2 k)
    let bands = usize::BITS as usize - kmax.leading_zeros() as usize;
    let mut band_terms: Vec<Vec<f64>> = vec![Vec::new(); bands];
    for k in 1..=kmax {
        let b = usize::BITS as usize - 1 - k.leading_zeros() as usize;
        let step = (k as f64 * h).powf(-params.s);
        for axis in 0..grid.dim() {
            let norm = axis_diff_norm(f, &weights, axis, k, params.p);
            let scaled = step * norm;
            // both signs of h give the same norm
            match params.q {
                Exponent::Finite(q) => {
                    let t = scaled * (1.0 / k as f64).powf(1.0 / q);
                    band_terms[b].push(t);
                    band_terms[b].push(t);
                }
                Exponent::Infinite => band_terms[b].push(scaled),
            }
        }
    }
    let mut levels: Vec<LevelTerm> = band_terms
        .iter()
        .enumerate()
        .map(|(b, terms)| LevelTerm { j: level - b, term: lq_aggregate(terms, params.q) })
        .collect();
    levels.reverse();
    let all: Vec<f64> = band_terms.into_iter().flatten().collect();
    Ok(NormReport {
        params: params.with_dim(grid.dim()),
        method: NormMethod::Diff,
        levels,
        total: lq_aggregate(&all, params.q),
        equivalent: true,
    })
}

/// `||f||_p + |f|_{B^s_{p,q,delta}}`.
pub fn diff_full_norm(f: &GridFunction, params: &BesovParams, m: usize, delta: f64) -> Result<f64> {
    Ok(f.lp_norm(params.p) + diff_seminorm(f, params, m, delta)?.total)
}

/// `||f - mean f||_p / |f|_{B^s_{p,q,delta}}`.
pub fn poincare_ratio(f: &GridFunction, params: &BesovParams, m: usize, delta: f64) -> Result<f64> {
    let semi = diff_seminorm(f, params, m, delta)?.total;
    if semi == 0.0 {
        return Err(Error::DivisionByZeroSeminorm);
    }
    let mean = f.mean();
    Ok(f.map(|z| z - mean).lp_norm(params.p) / semi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{diff, make_grid, sample};

    fn indicator(level: usize) -> GridFunction {
        let g = make_grid(1, level, Domain::Torus).unwrap();
        let half = g.side() / 2;
        GridFunction::from_real(g, (0..g.side()).map(|i| if i < half { 1.0 } else { 0.0 }).collect()).unwrap()
    }

    #[test]
    fn weights_match_binomials() {
        assert_eq!(binomial_weights(1), vec![-1.0, 1.0]);
        assert_eq!(binomial_weights(3), vec![-1.0, 3.0, -3.0, 1.0]);
    }

    #[test]
    fn axis_norm_matches_materialized_difference() {
        for domain in [Domain::Torus, Domain::Cube] {
            let g = make_grid(2, 4, domain).unwrap();
            let f = sample(|x| (7.0 * x[0]).sin() + x[1] * x[1] * x[0], &g, 2).unwrap();
            for (axis, k, m) in [(0, 1, 1), (1, 3, 2), (0, 5, 3)] {
                let mut h = vec![0isize; 2];
                h[axis] = k as isize;
                let d = diff(&f, m, &h).unwrap();
                let a = axis_diff_norm(&f, &binomial_weights(m), axis, k, 1.5);
                assert!((a - d.lp_norm(1.5)).abs() < 1e-12 * (1.0 + a));
            }
        }
    }

    #[test]
    fn constant_has_zero_seminorm() {
        let g = make_grid(2, 5, Domain::Cube).unwrap();
        let f = GridFunction::constant(g, Complex64::new(2.0, -1.0));
        let p = BesovParams::finite(0.5, 2.0, 2.0, 2).unwrap();
        assert_eq!(diff_seminorm(&f, &p, 1, 0.5).unwrap().total, 0.0);
        assert_eq!(poincare_ratio(&f, &p, 1, 0.5), Err(Error::DivisionByZeroSeminorm));
    }

    #[test]
    fn indicator_matches_harmonic_sum() {
        // ||Delta_h g||_2^2 = 2h on the torus, so every offset contributes 2/k
        let p = BesovParams::finite(0.5, 2.0, 2.0, 1).unwrap();
        for level in [4, 7] {
            let r = diff_seminorm(&indicator(level), &p, 1, 0.5).unwrap();
            let kmax = 1usize << (level - 1);
            let oracle: f64 = (1..=kmax).map(|k| 4.0 / k as f64).sum::<f64>().sqrt();
            assert!((r.total - oracle).abs() < 1e-12 * oracle);
            let agg = lq_aggregate(&r.levels.iter().map(|l| l.term).collect::<Vec<_>>(), p.q);
            assert!((agg - r.total).abs() < 1e-12 * r.total);
        }
    }

    #[test]
    fn sup_variant() {
        let p = BesovParams::new(0.5, 2.0, Exponent::Infinite, 1).unwrap();
        let r = diff_seminorm(&indicator(6), &p, 1, 0.5).unwrap();
        // |h|^{-1/2} sqrt(2h) = sqrt(2) for every offset
        assert!((r.total - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        let f = indicator(4);
        let p = BesovParams::finite(1.5, 2.0, 2.0, 1).unwrap();
        assert!(matches!(diff_seminorm(&f, &p, 1, 0.5), Err(Error::MTooSmall { .. })));
        assert!(matches!(diff_seminorm(&f, &p, 2, 0.01), Err(Error::DeltaOutOfRange(_))));
        assert!(matches!(diff_seminorm(&f, &p, 2, 1.5), Err(Error::DeltaOutOfRange(_))));
    }

    #[test]
    fn rotation_invariant() {
        let g = make_grid(2, 4, Domain::Torus).unwrap();
        let f = crate::grid::sample_complex(|x| Complex64::new(x[0], x[1] * x[1]), &g, 2).unwrap();
        let c = Complex64::from_polar(1.0, 0.7);
        let p = BesovParams::finite(0.4, 3.0, 1.5, 2).unwrap();
        let a = diff_seminorm(&f, &p, 2, 0.25).unwrap().total;
        let b = diff_seminorm(&f.map(|z| z * c), &p, 2, 0.25).unwrap().total;
        assert!((a - b).abs() < 1e-12 * a);
    }
}
