use std::f64::consts::{PI, TAU};

use besov_lift::besov::{
    diff_seminorm, haar_average_norm, haar_basis_function, haar_coeff_decompose, haar_coeff_norm,
    haar_synthesize, telescoping_norm,
};
use besov_lift::corpus;
use besov_lift::counterexamples::{tempseq, vortex};
use besov_lift::grid::{
    diff, dyadic_average, level_means, mollify, sample, slice, BesovParams, CircleMap, Domain, DyadicGrid,
    Exponent, GridFunction,
};
use besov_lift::jacobian::{disintegrate_check, plaquette_winding};
use besov_lift::lifting::{
    axis_windings, dyadic_trace, lift_continuous, lift_dyadic, lift_mollifier, LiftResult,
};
use besov_lift::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn domain(torus: bool) -> Domain {
    if torus {
        Domain::Torus
    } else {
        Domain::Cube
    }
}

prop_compose! {
    fn real_field(max_dim: usize, max_level: usize)(
        dim in 1..=max_dim,
        level in 1..=max_level,
        torus in any::<bool>(),
        seed in any::<u64>(),
    ) -> GridFunction {
        let grid = DyadicGrid::new(dim, level, domain(torus)).unwrap();
        use rand::Rng;
        let mut r = corpus::rng(seed, 0);
        GridFunction::from_real(grid, (0..grid.len()).map(|_| r.random_range(-1.0..1.0)).collect()).unwrap()
    }
}

prop_compose! {
    fn integer_field(max_level: usize)(
        dim in 1..=2usize,
        level in 2..=max_level,
        torus in any::<bool>(),
        seed in any::<u64>(),
    ) -> GridFunction {
        let grid = DyadicGrid::new(dim, level, domain(torus)).unwrap();
        use rand::Rng;
        let mut r = corpus::rng(seed, 0);
        GridFunction::from_real(grid, (0..grid.len()).map(|_| r.random_range(-9..=9) as f64).collect()).unwrap()
    }
}

prop_compose! {
    /// Random phases on a coarse level, any size of jump.
    fn rough_map(max_level: usize)(
        level in 2..=max_level,
        torus in any::<bool>(),
        seed in any::<u64>(),
    ) -> CircleMap {
        let grid = DyadicGrid::new(2, level, domain(torus)).unwrap();
        let phi = corpus::random_phases(seed, 1, 2).remove(0);
        let coarse = match phi {
            corpus::CorpusFunction::PiecewiseConstant { level: l, .. } if l > level => {
                corpus::random_phases(seed, 1, 2).remove(0)
            }
            other => other,
        };
        match coarse.realize(&grid) {
            Ok(f) => CircleMap::from_phase(grid, &f.real_parts()).unwrap(),
            // too fine for this grid: use the values directly
            Err(_) => {
                use rand::Rng;
                let mut r = corpus::rng(seed, 9);
                let v: Vec<f64> = (0..grid.len()).map(|_| r.random_range(-PI..PI)).collect();
                CircleMap::from_phase(grid, &v).unwrap()
            }
        }
    }
}

prop_compose! {
    fn smooth_map(min_level: usize, max_level: usize, amplitude: f64)(
        dim in 1..=2usize,
        level in min_level..=max_level,
        torus in any::<bool>(),
        seed in any::<u64>(),
    ) -> CircleMap {
        let grid = DyadicGrid::new(dim, level, domain(torus)).unwrap();
        let phi = corpus::smooth_phase(seed, 0, dim, 2, amplitude).realize(&grid).unwrap();
        CircleMap::from_phase(grid, &phi.real_parts()).unwrap()
    }
}

fn params(dim: usize) -> BesovParams {
    BesovParams::finite(0.3, 2.0, 2.0, dim).unwrap()
}

fn max_gap(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max_i |(a_i - b_i) - c|` for the best `c` in `2 pi Z`.
fn phase_offset_gap(a: &LiftResult, b: &LiftResult) -> f64 {
    let (pa, pb) = (a.phase_values(), b.phase_values());
    let c = ((pa[0] - pb[0]) / TAU).round() * TAU;
    pa.iter().zip(&pb).map(|(x, y)| (x - y - c).abs()).fold(0.0, f64::max)
}

fn max_neighbour_jump(r: &LiftResult) -> f64 {
    let grid = *r.phase.grid();
    let phase = r.phase_values();
    (0..grid.len())
        .flat_map(|i| (0..grid.dim()).filter_map(move |axis| grid.shift(i, axis, 1).map(|j| (i, j))))
        .map(|(i, j)| (phase[i] - phase[j]).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn diff_order_m_is_composition_of_first_differences(f in integer_field(5), m in 2..=4usize, step in 1..=3isize) {
        let grid = *f.grid();
        let mut h = vec![0isize; grid.dim()];
        h[grid.dim() - 1] = step;
        let direct = diff(&f, m, &h).unwrap();
        let mut composed = f.clone();
        for _ in 0..m {
            composed = diff(&composed, 1, &h).unwrap();
        }
        let side = grid.side() as isize;
        for i in 0..grid.len() {
            let last = grid.coords(i)[grid.dim() - 1] as isize;
            // on the cube both agree where every x + l h stays inside
            if grid.domain() == Domain::Torus || last + m as isize * step < side {
                prop_assert_eq!(direct.values()[i], composed.values()[i]);
            }
        }
    }

    #[test]
    fn dyadic_averages_form_a_projection_chain(f in real_field(3, 4), a in 0..=4usize, b in 0..=4usize) {
        let level = f.grid().level();
        let (j, k) = (a.min(level), b.min(level));
        let jk = dyadic_average(&dyadic_average(&f, k).unwrap(), j).unwrap();
        let direct = dyadic_average(&f, j.min(k)).unwrap();
        prop_assert_eq!(jk.values(), direct.values());
        prop_assert_eq!(dyadic_average(&f, j).unwrap().mean(), f.mean());
    }

    #[test]
    fn slicing_a_separable_sample(level in 2..=6usize, row in 0..64usize, a in 0.5f64..3.0, b in 0.5f64..3.0) {
        let g2 = DyadicGrid::new(2, level, Domain::Cube).unwrap();
        let g1 = DyadicGrid::new(1, level, Domain::Cube).unwrap();
        let row = row % g2.side();
        let f = sample(|x| (a * x[0]).sin() * (b * x[1]).cos(), &g2, 4).unwrap();
        let sliced = slice(&f, &[0], &[row]).unwrap();
        let factor = sample(|x| (a * x[0]).sin(), &g1, 4).unwrap().values()[row];
        let restricted = sample(|y| (b * y[0]).cos(), &g1, 4).unwrap();
        for (s, r) in sliced.values().iter().zip(restricted.values()) {
            prop_assert!((s - r * factor).norm() < 1e-12);
        }
    }

    #[test]
    fn mollify_is_linear(level in 3..=6usize, dim in 1..=2usize, s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let grid = DyadicGrid::new(dim, level, Domain::Torus).unwrap();
        let f = corpus::random_interior_field(s1, 0, &grid);
        let g = corpus::random_interior_field(s2, 1, &grid);
        let eps = 0.25;
        let lhs = mollify(&f.lin_comb(a.into(), &g, b.into()).unwrap(), eps).unwrap();
        let rhs = mollify(&f, eps).unwrap().lin_comb(a.into(), &mollify(&g, eps).unwrap(), b.into()).unwrap();
        prop_assert!(max_gap(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn coefficient_norm_decreases_in_q(f in real_field(2, 5), q0 in 1.0f64..8.0, dq in 0.0f64..8.0, inf in any::<bool>()) {
        let p = params(f.grid().dim());
        let c = haar_coeff_decompose(&f, &p);
        let q1 = if inf { Exponent::Infinite } else { Exponent::Finite(q0 + dq) };
        let low = haar_coeff_norm(&c, &p.with_q(Exponent::Finite(q0))).total;
        let high = haar_coeff_norm(&c, &p.with_q(q1)).total;
        prop_assert!(high <= low, "{} > {}", high, low);
    }

    #[test]
    fn haar_functions_are_orthonormal(dim in 1..=2usize, j1 in 0..3usize, j2 in 0..3usize, l1 in 0u8..4, l2 in 0u8..4, m1 in 0usize..16, m2 in 0usize..16) {
        let grid = DyadicGrid::new(dim, 3, Domain::Cube).unwrap();
        let labels = 1u8 << dim;
        let pick = |j: usize, l: u8, m: usize| {
            let l = if j == 0 { l % labels } else { 1 + l % (labels - 1) };
            (j, l, m % (1usize << (dim * j)))
        };
        let (a, b) = (pick(j1, l1, m1), pick(j2, l2, m2));
        let fa = haar_basis_function(&grid, a.0, a.1, a.2).unwrap();
        let fb = haar_basis_function(&grid, b.0, b.1, b.2).unwrap();
        let inner: f64 = fa.values().iter().zip(fb.values()).map(|(x, y)| (x * y.conj()).re).sum::<f64>() * grid.cell_volume();
        let want = if a == b { 1.0 } else { 0.0 };
        prop_assert!((inner - want).abs() < 1e-12);
    }

    #[test]
    fn decompose_then_synthesize_is_identity(f in real_field(3, 4)) {
        let c = haar_coeff_decompose(&f, &params(f.grid().dim()));
        prop_assert!(max_gap(&haar_synthesize(&c), &f) < 1e-12);
    }

    #[test]
    fn average_and_telescoping_forms_are_comparable(seed in any::<u64>(), level in 6..=9usize) {
        let grid = DyadicGrid::new(1, level, Domain::Cube).unwrap();
        let p = params(1);
        for item in corpus::norm_corpus(seed, 6, 1) {
            let f = item.realize(&grid).unwrap();
            let avg = haar_average_norm(&f, &p).unwrap().total;
            let tel = telescoping_norm(&f, &p).unwrap();
            prop_assert!(avg <= 4.0 * tel && tel <= 4.0 * avg, "{} vs {}", avg, tel);
        }
    }

    #[test]
    fn oscillation_parts_vanish_iff_constant(f in real_field(2, 4), constant in any::<bool>(), c in -5.0f64..5.0) {
        let f = if constant { GridFunction::constant(*f.grid(), Complex64::new(c, 0.0)) } else { f };
        let grid = *f.grid();
        let p = params(grid.dim());
        let m = level_means(&f, 0).unwrap()[0];
        let is_constant = f.values().iter().all(|v| *v == m);
        let diff_zero = diff_seminorm(&f, &p, 1, 0.5).unwrap().total == 0.0;
        let avg_zero = haar_average_norm(&f, &p).unwrap().levels[1..].iter().all(|l| l.term == 0.0);
        let coeffs = haar_coeff_decompose(&f, &p);
        let coeff_zero = coeffs.levels.iter().flat_map(|lvl| {
            lvl.labels.iter().zip(&lvl.coeffs).filter(|(&g, _)| g != 0).flat_map(|(_, c)| c.iter())
        }).all(|z| z.norm() == 0.0);
        prop_assert_eq!(diff_zero, is_constant);
        prop_assert_eq!(avg_zero, is_constant);
        prop_assert_eq!(coeff_zero, is_constant);
    }

    #[test]
    fn diff_seminorm_ignores_unimodular_rotation(f in real_field(2, 4), t in 0.0f64..TAU) {
        let p = params(f.grid().dim());
        let rotated = f.map(|z| z * Complex64::from_polar(1.0, t));
        let a = diff_seminorm(&f, &p, 1, 0.5).unwrap().total;
        let b = diff_seminorm(&rotated, &p, 1, 0.5).unwrap().total;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn dyadic_lift_is_exact_and_respects_the_increment_bound(u in rough_map(6)) {
        let r = lift_dyadic(&u, &params(2));
        prop_assert!(r.residual <= 1e-9);
        let trace = dyadic_trace(&u);
        let grid = *u.grid();
        for j in 1..trace.levels() {
            let lvl = grid.with_level(j).unwrap();
            for i in 0..lvl.len() {
                // parent at level j - 1
                let c = lvl.coords(i);
                let parent = grid.with_level(j - 1).unwrap().index(&[c[0] / 2, c[1] / 2]);
                let lhs = (trace.phases[j][i] - trace.phases[j - 1][parent]).abs();
                let rhs = PI * (trace.normalized[j][i] - trace.normalized[j - 1][parent]).norm();
                prop_assert!(lhs <= rhs);
            }
        }
    }

    #[test]
    fn lifts_rotate_with_the_map(u in smooth_map(3, 6, 2.0), t in 0.0f64..TAU) {
        let c = Complex64::from_polar(1.0, t);
        let v = u.rotate(c).unwrap();
        let mut results = vec![(lift_dyadic(&u, &params(u.grid().dim())), lift_dyadic(&v, &params(u.grid().dim())))];
        let mut outcomes = vec![(lift_continuous(&u), lift_continuous(&v))];
        if u.grid().domain() == Domain::Torus {
            outcomes.push((lift_mollifier(&u, None), lift_mollifier(&v, None)));
        }
        // a method either succeeds on both maps or fails on both with the same kind of error
        for pair in outcomes {
            match pair {
                (Ok(a), Ok(b)) => results.push((a, b)),
                (Err(a), Err(b)) => prop_assert_eq!(a.kind(), b.kind()),
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a.err(), b.err()),
            }
        }
        for (a, b) in &results {
            let pa = a.phase_values();
            let pb = b.phase_values();
            for ((x, y), z) in pa.iter().zip(&pb).zip(u.values()) {
                let want = c * Complex64::from_polar(1.0, *x);
                prop_assert!((Complex64::from_polar(1.0, *y) - want).norm() < 1e-9);
                prop_assert!((Complex64::from_polar(1.0, *x) - z).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn successful_lifts_differ_by_a_multiple_of_two_pi(u in smooth_map(5, 7, 1.0)) {
        // the dyadic lift joins the comparison when it is itself continuous on the grid
        let mut lifts: Vec<LiftResult> = Some(lift_dyadic(&u, &params(u.grid().dim())))
            .filter(|r| max_neighbour_jump(r) < PI)
            .into_iter()
            .collect();
        lifts.extend(lift_continuous(&u).ok());
        if u.grid().domain() == Domain::Torus {
            lifts.extend(lift_mollifier(&u, None).ok());
        }
        for a in &lifts {
            for b in &lifts {
                prop_assert!(phase_offset_gap(a, b) < 1e-9, "{} vs {}: {} on {:?}", a.method, b.method, phase_offset_gap(a, b), u.grid());
            }
        }
    }

    #[test]
    fn continuous_lift_succeeds_iff_no_winding(u in rough_map(4)) {
        let windings = plaquette_winding(&u).unwrap();
        let axis_zero = u.grid().domain() == Domain::Cube || axis_windings(&u).unwrap().iter().all(|&w| w == 0);
        match lift_continuous(&u) {
            Err(Error::DegenerateEdge { .. }) => {}
            Ok(r) => {
                prop_assert!(windings.is_zero() && axis_zero);
                prop_assert!(r.residual < 1e-9);
            }
            Err(Error::ObstructionDetected(w)) => {
                prop_assert!(!(windings.is_zero() && axis_zero));
                prop_assert!(w.winding != 0);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn torus_windings_cancel(seed in any::<u64>(), level in 2..=5usize, three in any::<bool>()) {
        let dim = if three { 3 } else { 2 };
        let grid = DyadicGrid::new(dim, level.min(4), Domain::Torus).unwrap();
        use rand::Rng;
        let mut r = corpus::rng(seed, 3);
        let phase: Vec<f64> = (0..grid.len()).map(|_| r.random_range(-PI..PI)).collect();
        let u = CircleMap::from_phase(grid, &phase).unwrap();
        let w = plaquette_winding(&u).unwrap();
        for &(a, b) in &w.pairs {
            let lattice = w.pair(a, b).unwrap();
            if dim == 2 {
                prop_assert_eq!(w.total(a, b), Some(0));
            } else {
                // each 2-torus slice of the pair cancels on its own
                let c = 3 - a - b;
                for k in 0..grid.side() {
                    let s: i64 = (0..grid.len()).filter(|&i| grid.coords(i)[c] == k).map(|i| lattice[i]).sum();
                    prop_assert_eq!(s, 0);
                }
            }
        }
    }

    #[test]
    fn disintegration_is_an_identity(seed in any::<u64>(), axis in 0..3usize, vortex_map in any::<bool>(), cx in 0.2f64..0.8, cy in 0.2f64..0.8) {
        let grid = DyadicGrid::new(3, 3, Domain::Cube).unwrap();
        let u = if vortex_map {
            // keep the center away from the cell centers
            let snap = |c: f64| (c * 8.0).round() / 8.0;
            vortex(&grid, [snap(cx).clamp(0.125, 0.875), snap(cy).clamp(0.125, 0.875)]).unwrap()
        } else {
            use rand::Rng;
            let mut r = corpus::rng(seed, 5);
            let phase: Vec<f64> = (0..grid.len()).map(|_| r.random_range(-PI..PI)).collect();
            CircleMap::from_phase(grid, &phase).unwrap()
        };
        let zeta = corpus::random_interior_field(seed, 0, &grid);
        let (lhs, rhs) = disintegrate_check(&u, &zeta, axis).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tempseq_respects_budget_and_is_maximal(j0 in 2..=8usize, extra in 0..=20usize, t in 1.2f64..6.0) {
        let u = besov_lift::counterexamples::default_u(t);
        let v = besov_lift::counterexamples::default_v();
        for l in tempseq(&u, &v, j0, j0 + extra) {
            let budget = v(l.j) * u(l.j);
            prop_assert!(l.length() <= budget);
            let longer = (l.t + 1 - l.s) as f64 / (1u64 << l.j) as f64;
            prop_assert!(longer > budget);
        }
    }
}
