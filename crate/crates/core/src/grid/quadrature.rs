use num_complex::Complex64;

use super::{DyadicGrid, GridFunction};
use crate::error::{Error, Result};

pub const DEFAULT_QUADRATURE_ORDER: usize = 4;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order.max(1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton iteration on P_n from the Chebyshev guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Approximates the cell averages of a real closure with a tensor Gauss–Legendre rule
/// of `order` nodes per axis per cell.
pub fn sample<F>(f: F, grid: &DyadicGrid, order: usize) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    sample_complex(|x| Complex64::new(f(x), 0.0), grid, order)
}

pub fn sample_complex<F>(f: F, grid: &DyadicGrid, order: usize) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    if order == 0 {
        return Err(Error::InvalidParams("quadrature order must be >= 1".into()));
    }
    let (nodes, weights) = gauss_legendre(order);
    let dim = grid.dim();
    let h = grid.mesh();
    let per_cell = order.pow(dim as u32);
    let values = crate::par::map_range(grid.len(), |cell| {
        let c = grid.coords(cell);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut x = [0.0f64; 3];
        for q in 0..per_cell {
            let mut w = 1.0;
            let mut rest = q;
            for axis in (0..dim).rev() {
                let k = rest % order;
                rest /= order;
                x[axis] = (c[axis] as f64 + nodes[k]) * h;
                w *= weights[k];
            }
            acc += f(&x[..dim]) * w;
        }
        acc
    });
    if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFiniteSample(i));
    }
    Ok(GridFunction::from_parts(*grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Domain};
    use std::f64::consts::PI;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for order in 1..=8 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((approx - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "order {order} deg {deg}");
            }
        }
    }

    #[test]
    fn constant_and_identity() {
        let g = make_grid(2, 3, Domain::Torus).unwrap();
        let f = sample(|_| 1.0, &g, 1).unwrap();
        assert!(f.values().iter().all(|v| v.re == 1.0));
        let g = make_grid(1, 1, Domain::Cube).unwrap();
        let f = sample(|x| x[0], &g, 6).unwrap();
        assert!((f.values()[0].re - 0.25).abs() < 1e-15);
        assert!((f.values()[1].re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn sine_cell_means_match_antiderivative() {
        let g = make_grid(1, 2, Domain::Torus).unwrap();
        let f = sample(|x| (2.0 * PI * x[0]).sin(), &g, 8).unwrap();
        for m in 0..4 {
            let (a, b) = (m as f64 / 4.0, (m + 1) as f64 / 4.0);
            let exact = ((2.0 * PI * a).cos() - (2.0 * PI * b).cos()) / (2.0 * PI) * 4.0;
            assert!((f.values()[m].re - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn non_finite_closure_is_rejected() {
        let g = make_grid(1, 2, Domain::Cube).unwrap();
        let err = sample(|x| if x[0] > 0.5 { f64::INFINITY } else { 0.0 }, &g, 2).unwrap_err();
        assert_eq!(err, Error::NonFiniteSample(2));
    }
}
