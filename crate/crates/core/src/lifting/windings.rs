use super::{checked_increment, winding_of};
use crate::error::{Error, Result};
use crate::grid::{CircleMap, Domain};

/// Degree of `u` along each coordinate loop through cell 0 of a torus grid.
pub fn axis_windings(u: &CircleMap) -> Result<Vec<i64>> {
    let grid = *u.grid();
    if grid.domain() != Domain::Torus {
        return Err(Error::DomainMismatch("axis windings need a torus grid".into()));
    }
    let values = u.values();
    (0..grid.dim())
        .map(|axis| {
            let stride = grid.stride(axis);
            let side = grid.side();
            let mut total = 0.0;
            for k in 0..side {
                let from = k * stride;
                let to = ((k + 1) % side) * stride;
                total += checked_increment(values, from, to)?;
            }
            Ok(winding_of(total))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GridFunction};
    use num_complex::Complex64;
    use std::f64::consts::TAU;

    fn linear(level: usize, w: [f64; 2]) -> CircleMap {
        let g = make_grid(2, level, Domain::Torus).unwrap();
        let phase: Vec<f64> = (0..g.len())
            .map(|i| {
                let c = g.center(i);
                TAU * (w[0] * c[0] + w[1] * c[1])
            })
            .collect();
        CircleMap::from_phase(g, &phase).unwrap()
    }

    #[test]
    fn examples() {
        let g = make_grid(2, 3, Domain::Torus).unwrap();
        let c = CircleMap::new(GridFunction::constant(g, Complex64::new(0.6, 0.8))).unwrap();
        assert_eq!(axis_windings(&c).unwrap(), vec![0, 0]);
        assert_eq!(axis_windings(&linear(4, [1.0, 0.0])).unwrap(), vec![1, 0]);
        assert_eq!(axis_windings(&linear(5, [3.0, -2.0])).unwrap(), vec![3, -2]);
    }

    #[test]
    fn coarse_grid_is_degenerate() {
        assert!(matches!(
            axis_windings(&linear(1, [1.0, 0.0])),
            Err(Error::DegenerateEdge { .. })
        ));
    }
}
