use std::collections::VecDeque;
use std::f64::consts::PI;

use super::{
    checked_increment, increment, nearest_phase, residual, winding_of, LiftMethod, LiftResult,
    ObstructionWitness, DEGENERATE_MARGIN,
};
use crate::error::{Error, Result};
use crate::grid::{CircleMap, DyadicGrid, GridFunction};

const NO_PARENT: usize = usize::MAX;

/// Every grid edge `(cell, cell + e_axis)` once, in cell-major order.
fn edges(grid: &DyadicGrid) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..grid.len()).flat_map(move |i| {
        (0..grid.dim()).filter_map(move |axis| {
            let j = grid.shift(i, axis, 1)?;
            (j != i).then_some((i, j))
        })
    })
}

/// Breadth-first continuous unwrapping from cell 0.
///
/// Fails with [`Error::ObstructionDetected`] on the first non-tree edge whose closing
/// loop carries a nonzero winding, and with [`Error::DegenerateEdge`] if some pair of
/// neighbouring samples is (nearly) antipodal.
pub fn lift_continuous(u: &CircleMap) -> Result<LiftResult> {
    let grid = *u.grid();
    let values = u.values();
    for (a, b) in edges(&grid) {
        checked_increment(values, a, b)?;
    }

    let n = grid.len();
    let mut phase = vec![0.0f64; n];
    let mut parent = vec![NO_PARENT; n];
    let mut visited = vec![false; n];
    let mut queue = VecDeque::new();
    phase[0] = values[0].arg();
    visited[0] = true;
    queue.push_back(0usize);
    while let Some(cur) = queue.pop_front() {
        for axis in 0..grid.dim() {
            for step in [-1isize, 1] {
                let Some(nb) = grid.shift(cur, axis, step) else { continue };
                if !visited[nb] {
                    visited[nb] = true;
                    parent[nb] = cur;
                    phase[nb] = nearest_phase(values[nb], phase[cur]);
                    queue.push_back(nb);
                }
            }
        }
    }

    for (a, b) in edges(&grid) {
        let gap = phase[b] - phase[a];
        if gap.abs() >= PI - DEGENERATE_MARGIN {
            let witness = witness_loop(&grid, u, &parent, a, b);
            return Err(Error::ObstructionDetected(Box::new(witness)));
        }
    }

    Ok(LiftResult {
        method: LiftMethod::Continuous,
        residual: residual(&phase, u),
        phase: GridFunction::from_real_parts(grid, phase),
        axis_windings: vec![0; grid.dim()],
        level_increments: Vec::new(),
        norm_ratio: None,
        ladder: Vec::new(),
    })
}

fn ancestors(parent: &[usize], mut v: usize) -> Vec<usize> {
    let mut out = vec![v];
    while parent[v] != NO_PARENT {
        v = parent[v];
        out.push(v);
    }
    out
}

/// Closes the tree paths to `a` and `b` with the edge `a -> b`.
fn witness_loop(grid: &DyadicGrid, u: &CircleMap, parent: &[usize], a: usize, b: usize) -> ObstructionWitness {
    let up_a = ancestors(parent, a);
    let up_b = ancestors(parent, b);
    // strip the common tail above the lowest common ancestor
    let (mut ia, mut ib) = (up_a.len(), up_b.len());
    while ia > 0 && ib > 0 && up_a[ia - 1] == up_b[ib - 1] {
        ia -= 1;
        ib -= 1;
    }
    let lca = up_a[ia];
    let mut cells: Vec<usize> = vec![lca];
    cells.extend(up_a[..ia].iter().rev());
    cells.extend(up_b[..ib].iter());

    let values = u.values();
    let total: f64 = (0..cells.len())
        .map(|k| increment(values[cells[k]], values[cells[(k + 1) % cells.len()]]))
        .sum();
    let mut winding = winding_of(total);

    if grid.dim() == 2 && signed_area(grid, &cells) < 0.0 {
        cells.reverse();
        winding = -winding;
    }
    ObstructionWitness { loop_cells: cells, winding }
}

/// Shoelace area of the loop in unwrapped cell coordinates (axis 0 horizontal); zero
/// for loops that wrap around the torus.
fn signed_area(grid: &DyadicGrid, cells: &[usize]) -> f64 {
    let side = grid.side() as i64;
    let step = |from: usize, to: usize| -> [i64; 2] {
        let (p, q) = (grid.coords(from), grid.coords(to));
        let mut d = [0i64; 2];
        for axis in 0..2 {
            let mut s = q[axis] as i64 - p[axis] as i64;
            if s > 1 {
                s -= side;
            } else if s < -1 {
                s += side;
            }
            d[axis] = s;
        }
        d
    };
    let mut pos = [0i64; 2];
    let mut area2 = 0i64;
    for k in 0..cells.len() {
        let d = step(cells[k], cells[(k + 1) % cells.len()]);
        let next = [pos[0] + d[0], pos[1] + d[1]];
        area2 += pos[0] * next[1] - next[0] * pos[1];
        pos = next;
    }
    if pos != [0, 0] {
        return 0.0;
    }
    area2 as f64 / 2.0
}
