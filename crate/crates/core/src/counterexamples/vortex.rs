use num_complex::Complex64;

use super::smooth_step;
use crate::error::{Error, Result};
use crate::grid::{CircleMap, DyadicGrid, GridFunction};
use crate::par;

/// Point samples of `(x - c)/|x - c|` in the first two coordinates at cell centers.
///
/// On a 3D grid the map is extruded along `x_3`. Each coordinate of `center` must lie in
/// `(0, 1)` and at least `2^(-J-2)` away from every cell-center coordinate.
pub fn vortex(grid: &DyadicGrid, center: [f64; 2]) -> Result<CircleMap> {
    if grid.dim() < 2 {
        return Err(Error::DimensionUnsupported(grid.dim()));
    }
    if center.iter().any(|&c| !(c > 0.0 && c < 1.0)) {
        return Err(Error::InvalidParams(format!("vortex center {center:?} outside the unit square")));
    }
    let h = grid.mesh();
    for &c in &center {
        let k = (c / h - 0.5).round();
        if (c - (k + 0.5) * h).abs() < h / 4.0 {
            return Err(Error::CenterOnNode);
        }
    }
    let values = par::map_range(grid.len(), |i| {
        let x = grid.center(i);
        let z = Complex64::new(x[0] - center[0], x[1] - center[1]);
        z / z.norm()
    });
    CircleMap::new(GridFunction::new(*grid, values)?)
}

/// Real bump at cell centers: 1 for `r <= inner`, 0 for `r >= outer`, `C^inf` between,
/// with `r` the distance to `center` in the first two coordinates.
pub fn radial_bump(grid: &DyadicGrid, center: [f64; 2], inner: f64, outer: f64) -> Result<GridFunction> {
    if !(0.0 <= inner && inner < outer) {
        return Err(Error::InvalidParams(format!("bump radii {inner} < {outer} required")));
    }
    let values = par::map_range(grid.len(), |i| {
        let x = grid.center(i);
        let r = (x[0] - center[0]).hypot(x[1] - center[1]);
        smooth_step((outer - r) / (outer - inner))
    });
    GridFunction::from_real(*grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Domain};

    #[test]
    fn unit_values_and_node_check() {
        let g = make_grid(2, 6, Domain::Cube).unwrap();
        let u = vortex(&g, [0.5, 0.5]).unwrap();
        assert!(u.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        let node = (10.0 + 0.5) / 64.0;
        assert_eq!(vortex(&g, [node, 0.5]).unwrap_err(), Error::CenterOnNode);
        assert_eq!(vortex(&g, [0.5, node + 1.0 / 512.0]).unwrap_err(), Error::CenterOnNode);
        assert!(vortex(&g, [0.5, node + 1.0 / 128.0]).is_ok());
        assert!(vortex(&g, [1.2, 0.5]).is_err());
    }

    #[test]
    fn bump_profile() {
        let g = make_grid(2, 5, Domain::Cube).unwrap();
        let b = radial_bump(&g, [0.5, 0.5], 0.1, 0.4).unwrap();
        for (i, v) in b.values().iter().enumerate() {
            let x = g.center(i);
            let r = (x[0] - 0.5).hypot(x[1] - 0.5);
            if r <= 0.1 {
                assert_eq!(v.re, 1.0);
            }
            if r >= 0.4 {
                assert_eq!(v.re, 0.0);
            }
        }
    }
}
