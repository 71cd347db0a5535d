use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{Domain, DyadicGrid, GridFunction};
use crate::error::{Error, Result};
use crate::par;

/// Sup-norm bump `exp(-1/(1-|x|^2))` on `|x|_inf < 1`.
fn bump(r: f64) -> f64 {
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// Discrete kernel of `rho_eps` on integer cell offsets `[-R, R]^dim`, normalized to unit
/// sum. Returns the radius `R` and the weights in lexicographic offset order.
pub fn bump_kernel(grid: &DyadicGrid, eps: f64) -> Result<(usize, Vec<f64>)> {
    check_eps(grid, eps)?;
    let h = grid.mesh();
    let radius = ((eps / h).ceil() as usize).saturating_sub(1);
    let width = 2 * radius + 1;
    let dim = grid.dim();
    let count = width.pow(dim as u32);
    let mut weights: Vec<f64> = (0..count)
        .map(|k| {
            let mut rest = k;
            let mut sup = 0usize;
            for _ in 0..dim {
                let off = (rest % width) as isize - radius as isize;
                rest /= width;
                sup = sup.max(off.unsigned_abs());
            }
            bump(sup as f64 * h / eps)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok((radius, weights))
}

fn check_eps(grid: &DyadicGrid, eps: f64) -> Result<()> {
    if !(eps >= grid.mesh() && eps <= 0.25) {
        return Err(Error::EpsOutOfRange(eps));
    }
    Ok(())
}

fn check_torus(f: &GridFunction) -> Result<()> {
    if f.grid().domain() != Domain::Torus {
        return Err(Error::DomainMismatch("mollification needs a torus grid".into()));
    }
    Ok(())
}

fn fft_axes(data: &mut [Complex64], grid: &DyadicGrid, inverse: bool, planner: &mut FftPlanner<f64>) {
    let side = grid.side();
    let fft = if inverse { planner.plan_fft_inverse(side) } else { planner.plan_fft_forward(side) };
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        let lines = grid.len() / side;
        let starts: Vec<usize> = (0..grid.len()).filter(|&i| grid.coords(i)[axis] == 0).collect();
        debug_assert_eq!(starts.len(), lines);
        let mut buf = vec![Complex64::new(0.0, 0.0); side];
        for &s in &starts {
            for (k, b) in buf.iter_mut().enumerate() {
                *b = data[s + k * stride];
            }
            fft.process(&mut buf);
            for (k, b) in buf.iter().enumerate() {
                data[s + k * stride] = *b;
            }
        }
    }
}

/// Periodic convolution with the normalized sup-norm bump of radius `eps`.
pub fn mollify(f: &GridFunction, eps: f64) -> Result<GridFunction> {
    check_torus(f)?;
    let grid = *f.grid();
    let (radius, weights) = bump_kernel(&grid, eps)?;
    let width = 2 * radius + 1;
    let side = grid.side() as isize;
    let mut kernel = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (k, w) in weights.iter().enumerate() {
        let mut rest = k;
        let mut coords = [0usize; 3];
        for axis in (0..grid.dim()).rev() {
            let off = (rest % width) as isize - radius as isize;
            rest /= width;
            coords[axis] = off.rem_euclid(side) as usize;
        }
        kernel[grid.index(&coords)] += Complex64::new(*w, 0.0);
    }
    let mut planner = FftPlanner::new();
    let mut data = f.values().to_vec();
    fft_axes(&mut data, &grid, false, &mut planner);
    fft_axes(&mut kernel, &grid, false, &mut planner);
    let n = grid.len() as f64;
    par::fill(&mut data, |i, v| *v = *v * kernel[i] / n);
    fft_axes(&mut data, &grid, true, &mut planner);
    Ok(GridFunction::from_parts(grid, data))
}

/// Same convolution as [`mollify`] by direct summation over the kernel support.
pub fn mollify_direct(f: &GridFunction, eps: f64) -> Result<GridFunction> {
    check_torus(f)?;
    let grid = *f.grid();
    let (radius, weights) = bump_kernel(&grid, eps)?;
    let width = 2 * radius + 1;
    let values = f.values();
    let out = par::map_range(grid.len(), |i| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, w) in weights.iter().enumerate() {
            let mut rest = k;
            let mut j = i;
            for axis in (0..grid.dim()).rev() {
                let off = (rest % width) as isize - radius as isize;
                rest /= width;
                j = grid.shift(j, axis, off).expect("torus shift");
            }
            acc += values[j] * *w;
        }
        acc
    });
    Ok(GridFunction::from_parts(grid, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample};

    #[test]
    fn kernel_has_unit_mass() {
        let g = make_grid(2, 6, Domain::Torus).unwrap();
        let (r, w) = bump_kernel(&g, 0.125).unwrap();
        assert_eq!(r, 7);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(bump_kernel(&g, 0.5).is_err());
        assert!(bump_kernel(&g, 1.0 / 128.0).is_err());
    }

    #[test]
    fn constant_is_fixed_and_mean_preserved() {
        let g = make_grid(2, 5, Domain::Torus).unwrap();
        let c = GridFunction::constant(g, Complex64::new(0.3, -1.2));
        let m = mollify(&c, 0.125).unwrap();
        assert!(m.values().iter().all(|v| (v - Complex64::new(0.3, -1.2)).norm() < 1e-13));
        let f = sample(|x| (x[0] * 7.0).sin() + (x[1] * 3.0).cos() * x[0], &g, 3).unwrap();
        let m = mollify(&f, 0.0625).unwrap();
        assert!((m.mean() - f.mean()).norm() < 1e-12);
    }

    #[test]
    fn fft_matches_direct_sum() {
        let g = make_grid(2, 5, Domain::Torus).unwrap();
        let f = sample(|x| (x[0] * 11.0).sin() * (x[1] * 5.0).cos(), &g, 2).unwrap();
        let a = mollify(&f, 0.125).unwrap();
        let b = mollify_direct(&f, 0.125).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-13);
        }
        let g1 = make_grid(1, 7, Domain::Torus).unwrap();
        let f1 = sample(|x| if x[0] < 0.3 { 1.0 } else { -0.5 }, &g1, 2).unwrap();
        let a = mollify(&f1, 0.25).unwrap();
        let b = mollify_direct(&f1, 0.25).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn requires_torus() {
        let g = make_grid(1, 4, Domain::Cube).unwrap();
        let f = GridFunction::zeros(g);
        assert!(matches!(mollify(&f, 0.125), Err(Error::DomainMismatch(_))));
    }
}
