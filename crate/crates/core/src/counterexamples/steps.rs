use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{broadcast, diff, DyadicGrid, GridFunction};
use num_complex::Complex64;

/// Integer-valued function that is constant on the dyadic cells of `level`, given one
/// value per such cell (lexicographic order), returned on `grid`.
pub fn step_function(grid: &DyadicGrid, level: usize, values: &[i64]) -> Result<GridFunction> {
    if grid.dim() > 2 {
        return Err(Error::DimensionUnsupported(grid.dim()));
    }
    if level > grid.level() {
        return Err(Error::LevelOutOfRange { level, max: grid.level() });
    }
    if values.len() != 1 << (grid.dim() * level) {
        return Err(Error::InvalidParams(format!(
            "expected {} cell values at level {level}, got {}",
            1usize << (grid.dim() * level),
            values.len()
        )));
    }
    let coarse: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
    GridFunction::new(*grid, broadcast(grid, &coarse, level))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominationCheck {
    pub pass: bool,
    /// First cell where `|Delta^2_h g| < |Delta_2h gbar|`.
    pub first_violation: Option<usize>,
}

/// Checks `|Delta^2_h g(x)| >= |Delta_2h gbar(x)|` at every cell, where `gbar` is the
/// indicator of `g` being even.
pub fn second_diff_domination_check(g: &GridFunction, h: isize) -> Result<DominationCheck> {
    if g.grid().dim() != 1 {
        return Err(Error::DimensionUnsupported(g.grid().dim()));
    }
    for (i, v) in g.values().iter().enumerate() {
        if v.im != 0.0 || v.re.fract() != 0.0 || v.re.abs() > 2f64.powi(52) {
            return Err(Error::InvalidParams(format!("value at cell {i} is not an integer")));
        }
    }
    let even = g.map(|v| Complex64::new(if v.re.rem_euclid(2.0) == 0.0 { 1.0 } else { 0.0 }, 0.0));
    let lhs = diff(g, 2, &[h])?;
    let rhs = diff(&even, 1, &[2 * h])?;
    let first_violation = lhs.values().iter().zip(rhs.values()).position(|(a, b)| a.norm() < b.norm());
    Ok(DominationCheck { pass: first_violation.is_none(), first_violation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Domain};
    use proptest::prelude::*;

    #[test]
    fn half_indicator() {
        let g = make_grid(1, 3, Domain::Cube).unwrap();
        let f = step_function(&g, 1, &[1, 0]).unwrap();
        assert_eq!(f.real_parts(), vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let r = second_diff_domination_check(&f, 2).unwrap();
        assert!(r.pass);
        let c = step_function(&g, 0, &[5]).unwrap();
        assert!(second_diff_domination_check(&c, 1).unwrap().pass);
    }

    #[test]
    fn rejects_non_integers() {
        let g = make_grid(1, 2, Domain::Torus).unwrap();
        let f = GridFunction::from_real(g, vec![0.5, 1.0, 2.0, 3.0]).unwrap();
        assert!(second_diff_domination_check(&f, 1).is_err());
    }

    proptest! {
        #[test]
        fn holds_for_integer_steps(
            vals in proptest::collection::vec(-5i64..6, 16),
            h in 1isize..8,
            torus in any::<bool>(),
        ) {
            let domain = if torus { Domain::Torus } else { Domain::Cube };
            let g = make_grid(1, 6, domain).unwrap();
            let f = step_function(&g, 4, &vals).unwrap();
            prop_assert!(second_diff_domination_check(&f, h).unwrap().pass);
            prop_assert!(second_diff_domination_check(&f, -h).unwrap().pass);
        }
    }
}
