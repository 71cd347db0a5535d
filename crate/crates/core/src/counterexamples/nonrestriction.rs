use serde::{Deserialize, Serialize};

use super::tempseq::{default_u, default_v, tempseq, DyadicInterval};
use crate::besov::haar_average_norm;
use crate::error::{Error, Result};
use crate::grid::{slice, BesovParams, Domain, DyadicGrid, Exponent, GridFunction};
use crate::par;

/// Dilation exponent of the placement into the unit square: lengths shrink by `2^-3`.
const PLACEMENT_SHIFT: usize = 3;
/// Translations applied before the dilation, in original coordinates.
const X_OFFSET: f64 = 0.25;
const Y_OFFSET: f64 = 2.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceKind {
    /// Greedy covering and `mu_j = (#I_j j^(1/t) ln j)^(-1/p)`, `t = q/p > 1`.
    Divergent,
    /// Full index sets `I_j = {0..2^j}` and `mu_j = (#I_j j^2)^(-1/p)`, for `q <= p`.
    Contrast,
}

/// Parameters of a generated non-restriction instance, with the Haar instantiation
/// `psi_M` = Haar mother wavelet, `a = 1`, `[alpha, beta] = [0, 1]`, `gamma = 1`,
/// `delta = 1`, `N = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonrestrictionSpec {
    pub kind: InstanceKind,
    pub params: BesovParams,
    pub j0: usize,
    #[serde(rename = "J")]
    pub last: usize,
    pub a: u32,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n_shift: u32,
    /// `I_j = [s_j, t_j]` for `j = j0..=J`.
    pub intervals: Vec<DyadicInterval>,
    pub mu: Vec<f64>,
}

impl NonrestrictionSpec {
    /// Divergent instance (`p < q`, `s p < 1`) on the default covering sequences.
    pub fn new(params: BesovParams, j0: usize, last: usize) -> Result<Self> {
        Self::build(InstanceKind::Divergent, params, j0, last)
    }

    /// Contrast instance (`q <= p`, `s p < 1`) with bounded row statistics.
    pub fn contrast(params: BesovParams, j0: usize, last: usize) -> Result<Self> {
        Self::build(InstanceKind::Contrast, params, j0, last)
    }

    fn build(kind: InstanceKind, params: BesovParams, j0: usize, last: usize) -> Result<Self> {
        check_params(kind, &params, j0, last)?;
        let p = params.p;
        let (intervals, mu) = match kind {
            InstanceKind::Divergent => {
                let t = params.q.finite().expect("checked finite") / p;
                let iv = tempseq(default_u(t), default_v(), j0, last);
                let mu = iv
                    .iter()
                    .map(|l| {
                        let j = l.j as f64;
                        (l.count() as f64 * j.powf(1.0 / t) * j.ln()).powf(-1.0 / p)
                    })
                    .collect();
                (iv, mu)
            }
            InstanceKind::Contrast => {
                let iv: Vec<DyadicInterval> = (j0..=last)
                    .map(|j| DyadicInterval { j, s: 0, t: 1 << j, degenerate: false })
                    .collect();
                let mu = iv.iter().map(|l| (l.count() as f64 * (l.j * l.j) as f64).powf(-1.0 / p)).collect();
                (iv, mu)
            }
        };
        Ok(Self {
            kind,
            params: params.with_dim(2),
            j0,
            last,
            a: 1,
            alpha: 0.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 1.0,
            n_shift: 1,
            intervals,
            mu,
        })
    }

    /// Re-checks the parameters and recomputes the derived sequences; used after loading.
    pub fn validate(&self) -> Result<()> {
        let fresh = Self::build(self.kind, self.params, self.j0, self.last)?;
        if fresh != *self {
            return Err(Error::SpecInvalid("derived sequences do not match the parameters".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::SpecInvalid(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Finest level at which the placed construction is piecewise constant.
    pub fn grid_level(&self) -> usize {
        self.last + PLACEMENT_SHIFT + 1
    }

    fn amplitude(&self, idx: usize) -> f64 {
        let j = self.intervals[idx].j as f64;
        self.mu[idx] * 2f64.powf(-j * (self.params.s - 2.0 / self.params.p))
    }

    /// Per level `(#I_j mu_j^p)^(q/p)`.
    pub fn series_terms(&self) -> Vec<f64> {
        let (p, q) = (self.params.p, self.q());
        self.intervals
            .iter()
            .zip(&self.mu)
            .map(|(l, m)| (l.count() as f64 * m.powf(p)).powf(q / p))
            .collect()
    }

    fn q(&self) -> f64 {
        self.params.q.finite().expect("finite q")
    }

    /// Haar coefficient norm of the placed instance in closed form:
    /// `2^(3(s - 2/p)) (sum_j ((2N+1) #I_j mu_j^p)^(q/p))^(1/q)`.
    pub fn closed_form_coeff_norm(&self, params: &BesovParams) -> f64 {
        let (s, p) = (params.s, params.p);
        let scale = 2f64.powf(PLACEMENT_SHIFT as f64 * (s - 2.0 / p));
        let copies = (2 * self.n_shift + 1) as f64;
        let blocks: Vec<f64> = self
            .intervals
            .iter()
            .zip(&self.mu)
            .map(|(l, m)| {
                // block l^p norm after the change of (s, p) from the generating parameters
                let j = l.j as f64;
                let mu = m * 2f64.powf(j * ((s - 2.0 / p) - (self.params.s - 2.0 / self.params.p)));
                (copies * l.count() as f64).powf(1.0 / p) * mu * scale
            })
            .collect();
        crate::besov::lq_aggregate(&blocks, params.q)
    }

    /// Haar-average terms `2^(js) ||E_j - E_(j-1)||_p` of the row through the level-`level`
    /// cell `row`, from the wavelet expansion of the restriction (no grid needed).
    pub fn row_terms(&self, level: usize, row: usize) -> Vec<f64> {
        let (s, p) = (self.params.s, self.params.p);
        let x = original_coordinate(level, row, X_OFFSET);
        let mut terms = vec![0.0; level + 1];
        for (idx, l) in self.intervals.iter().enumerate() {
            let k = l.j;
            let c = ((1u64 << k) as f64 * x).floor();
            let hits = (-1i64..=1)
                .filter(|&ell| {
                    let m = c - ell as f64;
                    m >= l.s as f64 && m <= l.t as f64
                })
                .count();
            let jy = k + PLACEMENT_SHIFT + 1;
            if hits > 0 && jy <= level {
                let support = hits as f64 * 0.5f64.powi((k + PLACEMENT_SHIFT) as i32);
                terms[jy] = 2f64.powf(jy as f64 * s) * self.amplitude(idx) * support.powf(1.0 / p);
            }
        }
        terms
    }
}

fn check_params(kind: InstanceKind, params: &BesovParams, j0: usize, last: usize) -> Result<()> {
    let Exponent::Finite(q) = params.q else {
        return Err(Error::SpecInvalid("q must be finite".into()));
    };
    let p = params.p;
    match kind {
        InstanceKind::Divergent if p >= q => return Err(Error::SpecInvalid(format!("need p < q, got p = {p}, q = {q}"))),
        InstanceKind::Contrast if q > p => return Err(Error::SpecInvalid(format!("need q <= p, got p = {p}, q = {q}"))),
        _ => {}
    }
    if params.sp() >= 1.0 {
        return Err(Error::SpecInvalid(format!("need s p < 1, got {}", params.sp())));
    }
    if j0 < 2 || last < j0 {
        return Err(Error::SpecInvalid(format!("need 2 <= j0 <= J, got j0 = {j0}, J = {last}")));
    }
    if last > 40 {
        return Err(Error::SpecInvalid(format!("J = {last} is too large")));
    }
    Ok(())
}

/// Original coordinate of the center of cell `index` at `level` (undoing the placement).
fn original_coordinate(level: usize, index: usize, offset: f64) -> f64 {
    let placed = (index as f64 + 0.5) / (1u64 << level) as f64;
    placed * (1 << PLACEMENT_SHIFT) as f64 - offset
}

fn psi_m(t: f64) -> f64 {
    if (0.0..0.5).contains(&t) {
        1.0
    } else if (0.5..=1.0).contains(&t) {
        -1.0
    } else {
        0.0
    }
}

/// The restriction `f(x, .)` of the placed instance to the row through cell `row` of a
/// level-`level` grid, as a 1D cube function. Requires `level >= spec.grid_level()`.
pub fn nonrestriction_row(spec: &NonrestrictionSpec, level: usize, row: usize) -> Result<GridFunction> {
    if level < spec.grid_level() {
        return Err(Error::LevelOutOfRange { level, max: spec.grid_level() });
    }
    let grid = DyadicGrid::new(1, level, Domain::Cube)?;
    if row >= grid.side() {
        return Err(Error::InvalidParams(format!("row {row} outside the grid")));
    }
    let x = original_coordinate(level, row, X_OFFSET);
    let a = spec.a as f64;
    // active (amplitude, m1, ell, k) for this row
    let mut pieces = Vec::new();
    for (idx, l) in spec.intervals.iter().enumerate() {
        let k = l.j;
        let scale = (1u64 << k) as f64;
        for ell in -(spec.n_shift as i64)..=spec.n_shift as i64 {
            let m1 = (scale * x - ell as f64 * spec.delta).floor();
            if m1 < l.s as f64 || m1 > l.t as f64 {
                continue;
            }
            let xf = psi_m(scale * x - m1 - ell as f64 * spec.delta);
            if xf != 0.0 {
                pieces.push((spec.amplitude(idx) * xf, m1, ell as f64, scale));
            }
        }
    }
    let values = par::map_range(grid.len(), |i| {
        let y = original_coordinate(level, i, Y_OFFSET);
        pieces
            .iter()
            .map(|&(amp, m1, ell, scale)| amp * psi_m(scale * y - m1 - 2.0 * scale * ell * a - ell * spec.delta))
            .sum::<f64>()
    });
    GridFunction::from_real(grid, values)
}

/// The placed instance on a 2D cube grid of level at least `spec.grid_level()`.
pub fn nonrestriction(spec: &NonrestrictionSpec, grid: &DyadicGrid) -> Result<GridFunction> {
    if grid.dim() != 2 {
        return Err(Error::DimensionUnsupported(grid.dim()));
    }
    if grid.domain() != Domain::Cube {
        return Err(Error::DomainMismatch("the non-restriction instance lives on the cube".into()));
    }
    let mut values = Vec::with_capacity(grid.len());
    for row in 0..grid.side() {
        values.extend(nonrestriction_row(spec, grid.level(), row)?.into_values());
    }
    GridFunction::new(*grid, values)
}

/// Level-`level` cell rows through `count` evenly spaced original coordinates
/// `x = (i + 1/2)/count`, so every row crosses the instance.
pub fn instance_rows(level: usize, count: usize) -> Vec<usize> {
    (0..count)
        .map(|i| {
            let x = (i as f64 + 0.5) / count as f64;
            (((x + X_OFFSET) / (1 << PLACEMENT_SHIFT) as f64) * (1u64 << level) as f64).floor() as usize
        })
        .collect()
}

/// One row of a restriction scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowStatistic {
    pub row: usize,
    /// Cutoff level.
    #[serde(rename = "J")]
    pub level: usize,
    /// `max_(j <= J) 2^(js) ||E_j - E_(j-1)||_p` of the row.
    pub running_sup: f64,
}

/// Running sup of the dyadic-average terms of the rows `f(x, .)` for the given `x` cells,
/// one entry per row and cutoff level.
pub fn restriction_scan(f: &GridFunction, params: &BesovParams, rows: &[usize]) -> Result<Vec<RowStatistic>> {
    let grid = *f.grid();
    if grid.dim() != 2 {
        return Err(Error::DimensionUnsupported(grid.dim()));
    }
    let p1 = params.with_dim(1).with_q(Exponent::Infinite);
    let per_row: Vec<Result<Vec<RowStatistic>>> = par::map_range(rows.len(), |r| {
        let row = rows[r];
        let restricted = slice(f, &[0], &[row])?;
        let report = haar_average_norm(&restricted, &p1)?;
        let mut sup = 0.0f64;
        Ok(report
            .levels
            .iter()
            .map(|l| {
                sup = sup.max(l.term);
                RowStatistic { row, level: l.j, running_sup: sup }
            })
            .collect())
    });
    let mut out = Vec::new();
    for r in per_row {
        out.extend(r?);
    }
    Ok(out)
}

/// `row,J,running_sup` CSV.
pub fn scan_to_csv(stats: &[RowStatistic]) -> String {
    let mut out = String::from("row,J,running_sup\n");
    for s in stats {
        out.push_str(&format!("{},{},{}\n", s.row, s.level, crate::besov::fmt17(s.running_sup)));
    }
    out
}
