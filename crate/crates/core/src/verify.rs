//! The acceptance suites, shared by the `verify` command and the integration tests.
//!
//! Each criterion returns a list of named checks with the measured value and the bound it
//! is held to. A check marked `known_gap` is computed and reported but cannot pass with
//! the construction as specified; it is listed separately instead of failing the suite.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::besov::{
    diff_seminorm, haar_average_norm, haar_coeff_decompose, haar_coeff_norm, poincare_ratio,
};
use crate::corpus::{self, CorpusFunction};
use crate::counterexamples::{
    instance_rows, nonrestriction, nonrestriction_row, radial_bump, restriction_scan, second_diff_domination_check,
    step_function, vortex, NonrestrictionSpec,
};
use crate::error::{Error, Result};
use crate::grid::{
    ancestor, diff, restrict_block, BesovParams, CircleMap, Domain, DyadicGrid, Exponent, GridFunction,
    MAX_LEVEL,
};
use crate::jacobian::{disintegrate_check, pair_jacobian, plaquette_winding, TestForm};
use crate::lifting::{dyadic_trace, lift_continuous, lift_dyadic, lift_mollifier};
use rand::Rng;

pub const CRITERIA: [&str; 10] = [
    "lifting round trip",
    "obstruction dichotomy",
    "vortex regularity frontier",
    "integer-valued divergence",
    "mollifier lifting",
    "jacobian disintegration",
    "jacobian normalization",
    "norm-estimator coherence",
    "non-restriction phenomenon",
    "poincare corridor",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Cap on the level of 2D and 3D grids; 1D grids and closed-form paths are not capped.
    pub max_level: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 1, max_level: MAX_LEVEL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
    pub known_gap: bool,
}

impl Check {
    fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, format!("<= {bound}"), value <= bound)
    }

    fn lt(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, format!("< {bound}"), value < bound)
    }

    fn gt(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, format!("> {bound}"), value > bound)
    }

    fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, value, format!("in [{lo}, {hi}]"), (lo..=hi).contains(&value))
    }

    fn eq(name: impl Into<String>, value: f64, want: f64) -> Self {
        Self::new(name, value, format!("== {want}"), value == want)
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, "holds".into(), ok)
    }

    fn new(name: impl Into<String>, value: f64, bound: String, pass: bool) -> Self {
        Self { name: name.into(), value, bound, pass, known_gap: false }
    }

    fn known_gap(mut self) -> Self {
        self.known_gap = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    /// Passes apart from checks marked as known gaps.
    pub fn pass_except_known(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.pass || c.known_gap)
    }

    pub fn status(&self) -> &'static str {
        if self.pass() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

pub fn run_criterion(id: usize, opts: &VerifyOptions) -> CriterionReport {
    let mut checks = Vec::new();
    let outcome = match id {
        1 => lifting_round_trip(opts, &mut checks),
        2 => obstruction_dichotomy(opts, &mut checks),
        3 => vortex_frontier(opts, &mut checks),
        4 => integer_divergence(opts, &mut checks),
        5 => mollifier_lifting(opts, &mut checks),
        6 => jacobian_disintegration(opts, &mut checks),
        7 => jacobian_normalization(opts, &mut checks),
        8 => estimator_coherence(opts, &mut checks),
        9 => nonrestriction_phenomenon(opts, &mut checks),
        10 => poincare_corridor(opts, &mut checks),
        _ => Err(Error::InvalidParams(format!("no criterion {id}"))),
    };
    let title = id.checked_sub(1).and_then(|k| CRITERIA.get(k)).copied().unwrap_or("unknown");
    CriterionReport { id, title, checks, error: outcome.err().map(|e| e.to_string()) }
}

pub fn run_suite(ids: &[usize], opts: &VerifyOptions) -> Vec<CriterionReport> {
    ids.iter().map(|&id| run_criterion(id, opts)).collect()
}

/// Plain-text table, one summary line per criterion followed by its checks.
pub fn render_table(reports: &[CriterionReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("{} criterion {:>2} {}\n", r.status(), r.id, r.title));
        if let Some(e) = &r.error {
            out.push_str(&format!("     error: {e}\n"));
        }
        for c in &r.checks {
            let tag = match (c.pass, c.known_gap) {
                (true, _) => "ok  ",
                (false, true) => "gap ",
                (false, false) => "FAIL",
            };
            out.push_str(&format!("     {tag} {}: {:.6e} {}\n", c.name, c.value, c.bound));
        }
    }
    out
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn capped(levels: impl IntoIterator<Item = usize>, opts: &VerifyOptions) -> Vec<usize> {
    levels.into_iter().filter(|&j| j <= opts.max_level).collect()
}

fn require(levels: &[usize], min: usize, what: &str) -> Result<()> {
    if levels.len() < min {
        return Err(Error::InvalidParams(format!("max level too small for {what}")));
    }
    Ok(())
}

fn phase_map(item: &CorpusFunction, grid: &DyadicGrid) -> Result<CircleMap> {
    CircleMap::from_phase(*grid, &item.realize(grid)?.real_parts())
}

/// Number of cells where `|phi_j - phi_(j-1)| <= pi |U_j - U_(j-1)|` fails, over all levels.
fn nearest_phase_violations(u: &CircleMap) -> usize {
    let trace = dyadic_trace(u);
    let grid = *u.grid();
    (1..trace.levels())
        .map(|j| {
            let lvl = grid.with_level(j).expect("coarser level is valid");
            let (phi, prev) = (&trace.phases[j], &trace.phases[j - 1]);
            let (uj, uprev) = (&trace.normalized[j], &trace.normalized[j - 1]);
            (0..phi.len())
                .filter(|&i| {
                    let parent = ancestor(&lvl, i, j - 1);
                    (phi[i] - prev[parent]).abs() > PI * (uj[i] - uprev[parent]).norm()
                })
                .count()
        })
        .sum()
}

fn lifting_round_trip(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let params = BesovParams::finite(0.3, 2.0, 2.0, 2)?;
    let phases = corpus::random_phases(opts.seed, 100, 2);
    let levels = capped([6, 8, 10], opts);
    if !levels.contains(&8) {
        return Err(Error::InvalidParams("max level too small for J = 8".into()));
    }
    let mut max_ratios = Vec::new();
    for &level in &levels {
        let grid = DyadicGrid::new(2, level, Domain::Cube)?;
        let mut worst = 0.0f64;
        let (mut residual, mut violations) = (0.0f64, 0usize);
        for item in &phases {
            let u = phase_map(item, &grid)?;
            let r = lift_dyadic(&u, &params);
            worst = worst.max(r.norm_ratio.unwrap_or(f64::INFINITY));
            if level == 8 {
                residual = residual.max(r.residual);
                violations += nearest_phase_violations(&u);
            }
        }
        if level == 8 {
            out.push(Check::le("max residual at J=8", residual, 1e-9));
            out.push(Check::eq("cells violating the nearest-phase bound at J=8", violations as f64, 0.0));
        }
        out.push(Check::le(format!("max norm ratio at J={level}"), worst, 50.0));
        max_ratios.push(worst);
    }
    out.push(Check::lt("spread of max norm ratio across J", spread(&max_ratios), 2.0));
    Ok(())
}

fn obstruction_dichotomy(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let levels = capped(4..=9, opts);
    require(&levels, 1, "the vortex levels")?;
    let (mut wrong_winding, mut sub_residual, mut plaquette_off) = (0usize, 0.0f64, 0usize);
    for &level in &levels {
        let grid = DyadicGrid::new(2, level, Domain::Cube)?;
        let u = vortex(&grid, [0.5, 0.5])?;
        match lift_continuous(&u) {
            Err(Error::ObstructionDetected(w)) if w.winding == 1 => {}
            _ => wrong_winding += 1,
        }
        // lower-left quadrant, its cells all avoid the core
        let sub = CircleMap::new(restrict_block(u.as_function(), &[0, 0], level - 1)?)?;
        match lift_continuous(&sub) {
            Ok(r) => sub_residual = sub_residual.max(r.residual),
            Err(_) => sub_residual = f64::INFINITY,
        }
        if plaquette_winding(&u)?.total(0, 1) != Some(1) {
            plaquette_off += 1;
        }
    }
    out.push(Check::eq("levels without a winding-1 obstruction", wrong_winding as f64, 0.0));
    out.push(Check::le("max residual on the core-free quadrant", sub_residual, 1e-9));
    out.push(Check::eq("levels with plaquette total != 1", plaquette_off as f64, 0.0));
    Ok(())
}

fn vortex_frontier(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let level = opts.max_level.min(10);
    if level < 8 {
        return Err(Error::InvalidParams("max level too small for h = 2^-8".into()));
    }
    let grid = DyadicGrid::new(2, level, Domain::Cube)?;
    let u = vortex(&grid, [0.5, 0.5])?;
    let ratios: Vec<f64> = (4..=8)
        .map(|k| {
            let step = 1isize << (level - k);
            let h = 0.5f64.powi(k as i32);
            Ok(diff(u.as_function(), 3, &[step, 0])?.lp_norm(1.0) / (h * h))
        })
        .collect::<Result<_>>()?;
    out.push(Check::lt("spread of ||D^3_h u||_1 / h^2 over h", spread(&ratios), 3.0));

    let levels = capped(6..=10, opts);
    require(&levels, 2, "the seminorm growth")?;
    let totals = |s: f64, m: usize| -> Result<Vec<f64>> {
        let params = BesovParams::finite(s, 2.0, 2.0, 2)?;
        levels
            .iter()
            .map(|&j| {
                let grid = DyadicGrid::new(2, j, Domain::Cube)?;
                Ok(diff_seminorm(vortex(&grid, [0.5, 0.5])?.as_function(), &params, m, 0.25)?.total)
            })
            .collect()
    };
    let below = totals(0.75, 1)?;
    let worst = below.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    out.push(Check::le("max successive ratio for s=0.75", worst, 1.1));
    let above = totals(1.5, 2)?;
    let x: Vec<f64> = levels.iter().map(|&j| j as f64).collect();
    let y: Vec<f64> = above.iter().map(|t| t.log2()).collect();
    out.push(Check::within("log2 growth per level for s=1.5", ls_slope(&x, &y), 0.35, 0.65));
    Ok(())
}

fn integer_divergence(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let params = BesovParams::finite(0.5, 2.0, 2.0, 1)?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for level in 6..=12 {
        let grid = DyadicGrid::new(1, level, Domain::Torus)?;
        let g = step_function(&grid, 1, &[1, 0])?;
        x.push((level as f64).ln());
        y.push(diff_seminorm(&g, &params, 1, 0.5)?.total.ln());
    }
    out.push(Check::within("log-log slope of the seminorm in J", ls_slope(&x, &y), 0.35, 0.65));

    let mut r = corpus::rng(opts.seed, 4);
    let mut failures = 0usize;
    for trial in 0..100 {
        let domain = if trial % 2 == 0 { Domain::Cube } else { Domain::Torus };
        let grid = DyadicGrid::new(1, 8, domain)?;
        let coarse = r.random_range(1..=6usize);
        let values: Vec<i64> = (0..1usize << coarse).map(|_| r.random_range(-5..=5)).collect();
        let g = step_function(&grid, coarse, &values)?;
        let mut h = r.random_range(1..=64i64) as isize;
        if r.random_bool(0.5) {
            h = -h;
        }
        if !second_diff_domination_check(&g, h)?.pass {
            failures += 1;
        }
    }
    out.push(Check::eq("random step functions failing the domination check", failures as f64, 0.0));
    Ok(())
}

fn mollifier_lifting(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    if opts.max_level < 8 {
        return Err(Error::InvalidParams("max level too small for J = 8".into()));
    }
    let grid = DyadicGrid::new(2, 8, Domain::Torus)?;
    let params = BesovParams::finite(0.3, 2.0, 2.0, 2)?;
    let (mut residual, mut gap, mut min_modulus, mut untracked) = (0.0f64, 0.0f64, f64::INFINITY, 0usize);
    for index in 0..5 {
        let phi = corpus::smooth_phase(opts.seed, index, 2, 3, 0.5);
        let u = phase_map(&phi, &grid)?;
        let m = lift_mollifier(&u, None)?;
        let d = lift_dyadic(&u, &params);
        residual = residual.max(m.residual);
        let (pm, pd) = (m.phase_values(), d.phase_values());
        let shift = ((pm[0] - pd[0]) / TAU).round() * TAU;
        gap = gap.max(pm.iter().zip(&pd).map(|(a, b)| (a - b - shift).abs()).fold(0.0, f64::max));
        for step in &m.ladder {
            min_modulus = min_modulus.min(step.min_modulus);
            untracked += usize::from(!step.tracked);
        }
    }
    out.push(Check::le("max mollifier residual", residual, 1e-9));
    out.push(Check::le("max distance to the dyadic lift modulo 2 pi", gap, 1e-6));
    out.push(Check::gt("min |F| over every ladder step", min_modulus, 0.5));
    out.push(Check::eq("untracked ladder steps", untracked as f64, 0.0));

    // nonzero axis windings (1, 2) are removed and restored exactly
    let phi = corpus::smooth_phase(opts.seed, 9, 2, 3, 0.5).realize(&grid)?.real_parts();
    let wound: Vec<f64> = (0..grid.len())
        .map(|i| {
            let c = grid.center(i);
            TAU * (c[0] + 2.0 * c[1]) + phi[i]
        })
        .collect();
    let m = lift_mollifier(&CircleMap::from_phase(grid, &wound)?, None)?;
    out.push(Check::le("residual on a map with windings (1, 2)", m.residual, 1e-9));
    out.push(Check::holds("axis windings (1, 2) recovered", m.axis_windings == [1, 2]));

    let collapse = matches!(lift_mollifier(&vortex(&grid, [0.5, 0.5])?, None), Err(Error::ModulusCollapse { .. }));
    out.push(Check::holds("vortex raises ModulusCollapse", collapse));
    Ok(())
}

fn jacobian_disintegration(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    if opts.max_level < 4 {
        return Err(Error::InvalidParams("max level too small for J = 4".into()));
    }
    let grid = DyadicGrid::new(3, 4, Domain::Cube)?;
    let mut r = corpus::rng(opts.seed, 6);
    let forms: Vec<(usize, GridFunction)> =
        (0..10).map(|i| (r.random_range(0..3usize), corpus::random_interior_field(opts.seed, i, &grid))).collect();

    let u = vortex(&grid, [0.5, 0.5])?;
    let (mut gap, mut largest) = (0.0f64, 0.0f64);
    for (axis, zeta) in &forms {
        let (lhs, rhs) = disintegrate_check(&u, zeta, *axis)?;
        gap = gap.max((lhs - rhs).abs());
        largest = largest.max(lhs.abs());
    }
    out.push(Check::le("max |lhs - rhs| on the extruded vortex", gap, 1e-10));
    out.push(Check::gt("max |lhs| on the extruded vortex", largest, 0.0));

    let (mut gap, mut size, mut not_liftable) = (0.0f64, 0.0f64, 0usize);
    for m in 0..10 {
        let u = phase_map(&corpus::smooth_phase(opts.seed, 50 + m, 3, 1, 1.0), &grid)?;
        not_liftable += usize::from(lift_continuous(&u).is_err());
        for (axis, zeta) in &forms {
            let (lhs, rhs) = disintegrate_check(&u, zeta, *axis)?;
            gap = gap.max((lhs - rhs).abs());
            size = size.max(lhs.abs()).max(rhs.abs());
        }
    }
    out.push(Check::eq("random maps that fail to lift", not_liftable as f64, 0.0));
    out.push(Check::le("max |lhs - rhs| on liftable maps", gap, 1e-10));
    out.push(Check::le("max |lhs|, |rhs| on liftable maps", size, 1e-10));
    Ok(())
}

fn jacobian_normalization(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let levels = capped(5..=9, opts);
    require(&levels, 2, "the gap slope")?;
    const ROUNDOFF: f64 = 1e-12;
    let (mut not_pi, mut worst, mut x, mut y) = (0usize, 0.0f64, Vec::new(), Vec::new());
    for &level in &levels {
        let grid = DyadicGrid::new(2, level, Domain::Cube)?;
        let u = vortex(&grid, [0.5, 0.5])?;
        let zeta = radial_bump(&grid, [0.5, 0.5], 0.1, 0.4)?;
        let pairing = pair_jacobian(&u, &TestForm::scalar(zeta)?)?;
        not_pi += usize::from(pairing.singular != PI);
        let gap = (pairing.direct - pairing.singular).abs();
        worst = worst.max(gap);
        x.push(level as f64);
        y.push(gap.max(f64::MIN_POSITIVE).log2());
    }
    out.push(Check::eq("levels where the singular evaluator != pi", not_pi as f64, 0.0));
    // the edge-based direct sum is a summation by parts of the plaquette sum, so the gap
    // may already sit at roundoff; a slope is only meaningful above that floor
    let slope = ls_slope(&x, &y);
    out.push(Check::new(
        "max |direct - singular| over J",
        worst,
        format!("<= {ROUNDOFF:e} or log2 slope {slope:.3} <= -0.8"),
        worst <= ROUNDOFF || slope <= -0.8,
    ));
    Ok(())
}

fn estimator_coherence(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let grid = DyadicGrid::new(1, 10, Domain::Cube)?;
    let params = BesovParams::finite(0.3, 2.0, 2.0, 1)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let (mut coeff_lo, mut coeff_hi) = (f64::INFINITY, 0.0f64);
    let mut non_monotone = 0usize;
    let qs = [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinite];
    for item in corpus::norm_corpus(opts.seed, 50, 1) {
        let f = item.realize(&grid)?;
        let avg = haar_average_norm(&f, &params)?.total;
        let ratio = avg / diff_seminorm(&f, &params, 1, 0.5)?.total;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        let c = haar_coeff_decompose(&f, &params);
        let coeff = haar_coeff_norm(&c, &params).total / avg;
        coeff_lo = coeff_lo.min(coeff);
        coeff_hi = coeff_hi.max(coeff);
        let norms: Vec<f64> = qs.iter().map(|&q| haar_coeff_norm(&c, &params.with_q(q)).total).collect();
        non_monotone += norms.windows(2).filter(|w| w[1] > w[0]).count();
    }
    out.push(Check::within("min haar-avg / diff ratio", lo, 0.01, 100.0));
    out.push(Check::within("max haar-avg / diff ratio", hi, 0.01, 100.0));
    out.push(Check::within("min haar-coeff / haar-avg ratio", coeff_lo, 0.01, 100.0));
    out.push(Check::within("max haar-coeff / haar-avg ratio", coeff_hi, 0.01, 100.0));
    out.push(Check::eq("q-monotonicity violations", non_monotone as f64, 0.0));

    let divergent = BesovParams::finite(0.4, 2.0, 6.0, 2)?;
    let contrast = BesovParams::finite(0.4, 2.0, 2.0, 2)?;
    let other = BesovParams::finite(0.3, 2.0, 4.0, 2)?;
    let mut specs = vec![NonrestrictionSpec::new(divergent, 4, 5)?];
    if opts.max_level >= 10 {
        specs.push(NonrestrictionSpec::new(divergent, 4, 6)?);
        specs.push(NonrestrictionSpec::contrast(contrast, 4, 6)?);
    }
    if opts.max_level < specs[0].grid_level() {
        return Err(Error::InvalidParams("max level too small for the generated instances".into()));
    }
    let mut rel = 0.0f64;
    for spec in &specs {
        let g2 = DyadicGrid::new(2, spec.grid_level(), Domain::Cube)?;
        let f = nonrestriction(spec, &g2)?;
        for p in [spec.params, other] {
            let got = haar_coeff_norm(&haar_coeff_decompose(&f, &p), &p).total;
            let want = spec.closed_form_coeff_norm(&p);
            rel = rel.max((got - want).abs() / want);
        }
    }
    out.push(Check::le("max relative gap to the closed-form coefficient norm", rel, 1e-9));
    Ok(())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

fn sup(terms: &[f64]) -> f64 {
    terms.iter().copied().fold(0.0, f64::max)
}

/// `u_j^t = 1/(j ln^3 j)` summed over `j > from`, with an integral remainder past `10^6`.
fn divergent_series_tail(from: usize, t: f64) -> f64 {
    const CUTOFF: usize = 1_000_000;
    let u = crate::counterexamples::default_u(t);
    let head: f64 = (from + 1..=CUTOFF).map(|j| u(j).powf(t)).sum();
    let n = CUTOFF as f64 + 0.5;
    head + 1.0 / (2.0 * n.ln().powi(2))
}

fn nonrestriction_phenomenon(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    const ROWS: usize = 64;
    let params = BesovParams::finite(0.4, 2.0, 6.0, 2)?;
    let p1 = params.with_dim(1);
    let levels = [8usize, 10, 12, 14];
    let specs: Vec<NonrestrictionSpec> =
        levels.iter().map(|&j| NonrestrictionSpec::new(params, 4, j)).collect::<Result<_>>()?;

    // coefficient series: partial sums through J, then the tail past the last J
    let partial: Vec<f64> = specs.iter().map(|s| s.series_terms().iter().sum()).collect();
    let increments: Vec<f64> = partial.windows(2).map(|w| w[1] - w[0]).collect();
    out.push(Check::holds(
        "partial-sum increments decrease",
        increments.windows(2).all(|w| w[1] < w[0]) && increments.iter().all(|&d| d > 0.0),
    ));
    let tail = divergent_series_tail(14, 3.0);
    let total = partial[3] + tail;
    out.push(Check::le("series tail beyond J=14 / total", tail / total, 0.05).known_gap());
    out.push(Check::le("norm tail 1 - (S_14 / S)^(1/q)", 1.0 - (partial[3] / total).powf(1.0 / 6.0), 0.05));

    // row statistic: closed-form row terms, cross-checked on 1D grid rows where they fit
    let mut medians = Vec::new();
    let mut worst_gap = 0.0f64;
    for spec in &specs {
        let level = spec.grid_level();
        let rows = instance_rows(level, ROWS);
        let stats: Vec<f64> = rows.iter().map(|&row| sup(&spec.row_terms(level, row))).collect();
        if level <= MAX_LEVEL {
            for (&row, &stat) in rows.iter().zip(&stats) {
                let f = nonrestriction_row(spec, level, row)?;
                let terms: Vec<f64> = haar_average_norm(&f, &p1)?.levels.iter().map(|l| l.term).collect();
                worst_gap = worst_gap.max((sup(&terms) - stat).abs() / stat.max(1e-300));
            }
        }
        if level <= opts.max_level && 2 * level <= crate::grid::MAX_SAMPLES_LOG2 {
            let f = nonrestriction(spec, &DyadicGrid::new(2, level, Domain::Cube)?)?;
            let scan = restriction_scan(&f, &params, &rows)?;
            for (&row, &stat) in rows.iter().zip(&stats) {
                let s = scan.iter().filter(|r| r.row == row && r.level == level).map(|r| r.running_sup).sum::<f64>();
                worst_gap = worst_gap.max((s - stat).abs() / stat.max(1e-300));
            }
        }
        medians.push(median(stats));
    }
    out.push(Check::le("closed-form vs grid row statistic (relative)", worst_gap, 1e-12));
    let rising = medians.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    out.push(Check::gt("min ratio of successive median row statistics", rising, 1.0));

    let cparams = BesovParams::finite(0.4, 2.0, 2.0, 2)?;
    let mut cmedians = Vec::new();
    for &j in &levels {
        let spec = NonrestrictionSpec::contrast(cparams, 4, j)?;
        let level = spec.grid_level();
        cmedians.push(median(instance_rows(level, ROWS).iter().map(|&r| sup(&spec.row_terms(level, r))).collect()));
    }
    out.push(Check::le("contrast instance: max / first median row statistic", spread(&cmedians), 1.05));
    Ok(())
}

fn poincare_corridor(opts: &VerifyOptions, out: &mut Vec<Check>) -> Result<()> {
    let params = BesovParams::finite(0.3, 2.0, 2.0, 1)?;
    let corpus = corpus::norm_corpus(opts.seed, 50, 1);
    let mut per_level = Vec::new();
    for level in [6usize, 8, 10] {
        let grid = DyadicGrid::new(1, level, Domain::Cube)?;
        let ratios: Vec<f64> = corpus
            .iter()
            .map(|item| poincare_ratio(&item.realize(&grid)?, &params, 1, 0.5))
            .collect::<Result<_>>()?;
        per_level.push(ratios);
    }
    let constants: Vec<f64> = per_level.iter().map(|r| sup(r)).collect();
    out.push(Check::lt("corridor constant C over the corpus", sup(&constants), f64::INFINITY));
    out.push(Check::lt("spread of C across J", spread(&constants), 2.0));
    let worst = (0..corpus.len())
        .map(|k| spread(&per_level.iter().map(|r| r[k]).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    out.push(Check::lt("max per-function spread across J", worst, 2.0));
    Ok(())
}
