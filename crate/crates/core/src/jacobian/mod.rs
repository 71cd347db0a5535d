//! Discrete distributional Jacobian of circle-valued maps.
//!
//! Phase increments across grid edges are taken as principal values, so the
//! circulation around every plaquette is `2 pi` times an integer. `Ju` is then
//! `pi` times the plaquette windings, paired with test forms at plaquette centers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{slice, CircleMap, Domain, DyadicGrid, GridFunction};
use crate::lifting::{checked_increment, winding_of};
use crate::par;

/// Axis pairs `(a, b)`, `a < b`, in lexicographic order.
pub fn axis_pairs(dim: usize) -> Vec<(usize, usize)> {
    (0..dim).flat_map(|a| ((a + 1)..dim).map(move |b| (a, b))).collect()
}

/// Edge field `F_a(x) = Arg(u(x + e_a) conj u(x)) 2^J`, zero on edges leaving the cube.
pub fn uwedge_grad(u: &CircleMap) -> Result<Vec<GridFunction>> {
    let grid = *u.grid();
    let values = u.values();
    let scale = grid.side() as f64;
    (0..grid.dim())
        .map(|axis| {
            let out: Vec<Result<f64>> = par::map_range(grid.len(), |i| match grid.shift(i, axis, 1) {
                Some(j) if j != i => Ok(checked_increment(values, i, j)? * scale),
                _ => Ok(0.0),
            });
            let out: Vec<f64> = out.into_iter().collect::<Result<_>>()?;
            Ok(GridFunction::from_real_parts(grid, out))
        })
        .collect()
}

/// Integer winding of every 2-plaquette, one full-size lattice per axis pair.
///
/// The plaquette anchored at cell `x` for the pair `(a, b)` has corners `x`, `x + e_a`,
/// `x + e_a + e_b`, `x + e_b`, visited in that (counterclockwise) order. On the cube,
/// anchors in the last layer along `a` or `b` have no plaquette and hold 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindingField {
    pub grid: DyadicGrid,
    pub pairs: Vec<(usize, usize)>,
    pub windings: Vec<Vec<i64>>,
}

fn corners(grid: &DyadicGrid, i: usize, a: usize, b: usize) -> Option<[usize; 4]> {
    let ia = grid.shift(i, a, 1)?;
    let iab = grid.shift(ia, b, 1)?;
    let ib = grid.shift(i, b, 1)?;
    Some([i, ia, iab, ib])
}

/// Discrete Jacobian: per plaquette, `(1/2 pi)` times the sum of the four principal
/// increments.
pub fn plaquette_winding(u: &CircleMap) -> Result<WindingField> {
    let grid = *u.grid();
    let values = u.values();
    let pairs = axis_pairs(grid.dim());
    let windings = pairs
        .iter()
        .map(|&(a, b)| {
            let w: Vec<Result<i64>> = par::map_range(grid.len(), |i| {
                let Some(c) = corners(&grid, i, a, b) else { return Ok(0) };
                let mut total = 0.0;
                for k in 0..4 {
                    total += checked_increment(values, c[k], c[(k + 1) % 4])?;
                }
                Ok(winding_of(total))
            });
            w.into_iter().collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(WindingField { grid, pairs, windings })
}

impl WindingField {
    /// Winding lattice of the pair `(a, b)`, `a < b`.
    pub fn pair(&self, a: usize, b: usize) -> Option<&[i64]> {
        let k = self.pairs.iter().position(|&p| p == (a, b))?;
        Some(&self.windings[k])
    }

    pub fn total(&self, a: usize, b: usize) -> Option<i64> {
        self.pair(a, b).map(|w| w.iter().sum())
    }

    pub fn is_zero(&self) -> bool {
        self.windings.iter().flatten().all(|&w| w == 0)
    }

    /// Rows `pair,index...,winding` with 1-based pair labels such as `1-2` and 0-based
    /// anchor coordinates. With `nonzero_only` the zero plaquettes are skipped.
    pub fn to_csv(&self, nonzero_only: bool) -> String {
        let dim = self.grid.dim();
        let mut out = String::from("pair");
        for axis in 0..dim {
            out.push_str(&format!(",i{}", axis + 1));
        }
        out.push_str(",winding\n");
        for (&(a, b), w) in self.pairs.iter().zip(&self.windings) {
            for (i, &wi) in w.iter().enumerate() {
                if (nonzero_only && wi == 0) || corners(&self.grid, i, a, b).is_none() {
                    continue;
                }
                out.push_str(&format!("{}-{}", a + 1, b + 1));
                for c in &self.grid.coords(i)[..dim] {
                    out.push_str(&format!(",{c}"));
                }
                out.push_str(&format!(",{wi}\n"));
            }
        }
        out
    }
}

/// A test form of degree `n - 2`: a scalar for `n = 2`, coefficients `zeta^c dx^c` for
/// `n = 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestForm {
    dim: usize,
    /// `(c, zeta^c)`; `c` is unused for `n = 2`.
    components: Vec<(usize, GridFunction)>,
}

impl TestForm {
    pub fn scalar(zeta: GridFunction) -> Result<Self> {
        if zeta.grid().dim() != 2 {
            return Err(Error::InvalidParams("a scalar test form needs a 2D grid".into()));
        }
        Self::check_real(&zeta)?;
        Ok(Self { dim: 2, components: vec![(0, zeta)] })
    }

    /// `zeta dx^axis` on a 3D grid (`axis` 0-based).
    pub fn pure(axis: usize, zeta: GridFunction) -> Result<Self> {
        Self::one_form(vec![(axis, zeta)])
    }

    pub fn one_form(components: Vec<(usize, GridFunction)>) -> Result<Self> {
        for (axis, z) in &components {
            if z.grid().dim() != 3 || *axis >= 3 {
                return Err(Error::InvalidParams("one-form components need axis < 3 on a 3D grid".into()));
            }
            Self::check_real(z)?;
        }
        Ok(Self { dim: 3, components })
    }

    fn check_real(z: &GridFunction) -> Result<()> {
        if !z.is_real() {
            return Err(Error::InvalidParams("test form coefficients must be real".into()));
        }
        Ok(())
    }

    pub fn components(&self) -> &[(usize, GridFunction)] {
        &self.components
    }

    /// `a self + b other`, componentwise on matching axes.
    pub fn lin_comb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        let mut out = Vec::new();
        for (axis, z) in &self.components {
            out.push((*axis, z.map(|v| v * a)));
        }
        for (axis, z) in &other.components {
            match out.iter_mut().find(|(c, _)| c == axis) {
                Some((_, acc)) => *acc = acc.lin_comb(1.0.into(), z, b.into())?,
                None => out.push((*axis, z.map(|v| v * b))),
            }
        }
        Ok(Self { dim: self.dim, components: out })
    }

    fn check_support(&self, grid: &DyadicGrid) -> Result<()> {
        for (_, z) in &self.components {
            if z.grid() != grid {
                return Err(Error::InvalidParams("test form lives on a different grid".into()));
            }
            if grid.domain() == Domain::Cube {
                let side = grid.side();
                for (i, v) in z.values().iter().enumerate() {
                    let c = grid.coords(i);
                    let boundary = c[..grid.dim()].iter().any(|&k| k == 0 || k + 1 == side);
                    if boundary && v.re != 0.0 {
                        return Err(Error::SupportViolation(i));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Both evaluations of `<Ju, zeta>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianPairing {
    /// `(1/2) int (F_a d_b zeta - F_b d_a zeta)` with edge-based `F` and centered
    /// differences of `zeta` at the edge midpoints.
    pub direct: f64,
    /// `pi sum winding * zeta(plaquette center)` (times the slab width `2^-J` in 3D).
    pub singular: f64,
}

/// Mean of `zeta` over the four cells around the plaquette anchored at `i`.
fn center_value(grid: &DyadicGrid, zeta: &[f64], i: usize, a: usize, b: usize) -> f64 {
    match corners(grid, i, a, b) {
        Some(c) => (zeta[c[0]] + zeta[c[1]] + zeta[c[2]] + zeta[c[3]]) / 4.0,
        None => 0.0,
    }
}

/// `pi sum_x w(x) zeta(center)` over the plaquettes of pair `(a, b)`, with the sum taken
/// slice by slice along the remaining axis (if any) so that the 3D and the sliced 2D
/// evaluations add in the same order.
fn singular_sum(grid: &DyadicGrid, w: &[i64], zeta: &[f64], a: usize, b: usize) -> f64 {
    let per_cell = |i: usize| if w[i] == 0 { 0.0 } else { w[i] as f64 * center_value(grid, zeta, i, a, b) };
    if grid.dim() == 2 {
        return PI * ordered_sum(grid.len(), per_cell);
    }
    let c = 3 - a - b;
    let plane = DyadicGrid::new(2, grid.level(), grid.domain()).expect("plane grid");
    let slices: Vec<f64> = (0..grid.side())
        .map(|k| {
            let total = ordered_sum(plane.len(), |i2| {
                let pc = plane.coords(i2);
                let mut full = [0usize; 3];
                full[a] = pc[0];
                full[b] = pc[1];
                full[c] = k;
                per_cell(grid.index(&full))
            });
            PI * total
        })
        .collect();
    slices.iter().sum::<f64>() * grid.mesh()
}

/// Sequential left-to-right sum, identical for every caller.
fn ordered_sum(n: usize, f: impl Fn(usize) -> f64) -> f64 {
    (0..n).map(f).sum()
}

/// `(1/2) sum_x [F_a(x) D_b zeta - F_b(x) D_a zeta] h^n` with `D` evaluated at the edge
/// midpoints.
fn direct_sum(grid: &DyadicGrid, field: &[GridFunction], zeta: &[f64], a: usize, b: usize) -> f64 {
    let h = grid.mesh();
    let at = |i: Option<usize>| i.map_or(0.0, |k| zeta[k]);
    // centered difference along `d` at cell `i`
    let centered = |i: usize, d: usize| (at(grid.shift(i, d, 1)) - at(grid.shift(i, d, -1))) / (2.0 * h);
    let edge = |i: usize, along: usize, d: usize| match grid.shift(i, along, 1) {
        Some(j) if j != i => (centered(i, d) + centered(j, d)) / 2.0,
        _ => 0.0,
    };
    let (fa, fb) = (field[a].values(), field[b].values());
    let s = par::sum(grid.len(), |i| fa[i].re * edge(i, a, b) - fb[i].re * edge(i, b, a));
    0.5 * s * grid.cell_volume()
}

/// `<Ju, zeta>` by the direct formula and by the singular plaquette sum.
pub fn pair_jacobian(u: &CircleMap, zeta: &TestForm) -> Result<JacobianPairing> {
    let grid = *u.grid();
    if zeta.dim != grid.dim() {
        return Err(Error::InvalidParams(format!(
            "test form for dimension {} paired with a {}D map",
            zeta.dim,
            grid.dim()
        )));
    }
    zeta.check_support(&grid)?;
    let field = uwedge_grad(u)?;
    let windings = plaquette_winding(u)?;
    let mut out = JacobianPairing { direct: 0.0, singular: 0.0 };
    for (axis, z) in &zeta.components {
        let (a, b) = match grid.dim() {
            2 => (0, 1),
            _ => complement_pair(*axis),
        };
        let zv = z.real_parts();
        let w = windings.pair(a, b).expect("pair exists");
        out.singular += singular_sum(&grid, w, &zv, a, b);
        out.direct += direct_sum(&grid, &field, &zv, a, b);
    }
    Ok(out)
}

/// The increasing pair of axes complementary to `axis` in 3D.
pub fn complement_pair(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Two sides of the disintegration identity for a pure form `zeta dx^axis` in 3D.
///
/// `lhs` is the singular evaluator in 3D; `rhs` is `2^-J` times the sum over the slices
/// `x_axis = k` of the 2D singular evaluator on the sliced map and form.
pub fn disintegrate_check(u: &CircleMap, zeta: &GridFunction, axis: usize) -> Result<(f64, f64)> {
    let grid = *u.grid();
    if grid.dim() != 3 {
        return Err(Error::DimensionUnsupported(grid.dim()));
    }
    if axis >= 3 {
        return Err(Error::BadAxisSet(format!("axis {axis} out of range")));
    }
    let form = TestForm::pure(axis, zeta.clone())?;
    form.check_support(&grid)?;
    let windings = plaquette_winding(u)?;
    let (a, b) = complement_pair(axis);
    let lhs = singular_sum(&grid, windings.pair(a, b).expect("pair exists"), &zeta.real_parts(), a, b);

    let mut parts = Vec::with_capacity(grid.side());
    for k in 0..grid.side() {
        let uk = CircleMap::new(slice(u.as_function(), &[axis], &[k])?)?;
        let zk = slice(zeta, &[axis], &[k])?;
        let wk = plaquette_winding(&uk)?;
        let plane = *uk.grid();
        parts.push(singular_sum(&plane, wk.pair(0, 1).expect("pair exists"), &zk.real_parts(), 0, 1));
    }
    let rhs = parts.iter().sum::<f64>() * grid.mesh();
    Ok((lhs, rhs))
}
