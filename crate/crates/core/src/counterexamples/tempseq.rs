use serde::{Deserialize, Serialize};

/// `[s/2^j, t/2^j]` with integer endpoints, `0 <= s < 2^j`, `s <= t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub j: usize,
    pub s: u64,
    pub t: u64,
    /// Set when even one cell exceeded the budget, leaving `t = s`.
    pub degenerate: bool,
}

impl DyadicInterval {
    pub fn left(&self) -> f64 {
        self.s as f64 / (1u64 << self.j) as f64
    }

    pub fn right(&self) -> f64 {
        self.t as f64 / (1u64 << self.j) as f64
    }

    pub fn length(&self) -> f64 {
        (self.t - self.s) as f64 / (1u64 << self.j) as f64
    }

    /// Number of integers in `[s, t]`.
    pub fn count(&self) -> u64 {
        self.t - self.s + 1
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left() <= x && x <= self.right()
    }
}

/// `u_j = 1/(j^(1/t) ln j)`.
pub fn default_u(t: f64) -> impl Fn(usize) -> f64 {
    move |j| 1.0 / ((j as f64).powf(1.0 / t) * (j as f64).ln())
}

/// `v_j = 1/ln(ln(j + 16))`.
pub fn default_v() -> impl Fn(usize) -> f64 {
    |j| 1.0 / ((j as f64 + 16.0).ln()).ln()
}

/// Greedy covering by dyadic intervals of length at most `v_j u_j`, `j = j0..=last`.
///
/// `L_j0` starts at 0. While the previous right end `t_j/2^j` is below 1 the next interval
/// starts there (at `2 t_j` on the finer level); otherwise it starts again at 0. Each
/// interval is the longest one allowed by the budget.
pub fn tempseq(u: impl Fn(usize) -> f64, v: impl Fn(usize) -> f64, j0: usize, last: usize) -> Vec<DyadicInterval> {
    let mut out: Vec<DyadicInterval> = Vec::new();
    let mut start = 0u64;
    for j in j0..=last {
        let cells = (1u64 << j) as f64;
        let budget = v(j) * u(j);
        let width = (budget * cells).floor().max(0.0) as u64;
        let iv = DyadicInterval { j, s: start, t: start + width, degenerate: width == 0 };
        start = if iv.t < (1u64 << j) { 2 * iv.t } else { 0 };
        out.push(iv);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_budget() {
        let l = tempseq(|_| 1.0, |_| 1.0, 2, 9);
        assert!(l.iter().all(|iv| iv.s == 0 && iv.right() == 1.0));
    }

    #[test]
    fn three_eighths() {
        let l = tempseq(|_| 0.375, |_| 1.0, 3, 6);
        let ends: Vec<(u64, u64)> = l.iter().map(|iv| (iv.s, iv.t)).collect();
        assert_eq!(ends, vec![(0, 3), (6, 12), (24, 36), (0, 24)]);
    }

    #[test]
    fn budget_and_maximality() {
        let (u, v) = (default_u(3.0), default_v());
        for iv in tempseq(&u, &v, 4, 40) {
            let b = u(iv.j) * v(iv.j);
            assert!(iv.length() <= b);
            assert!((iv.t + 1 - iv.s) as f64 / (1u64 << iv.j) as f64 > b);
            assert!(iv.s < 1 << iv.j);
        }
    }

    #[test]
    fn coverage_at_level_six() {
        let l = tempseq(default_u(3.0), default_v(), 4, 60);
        for k in 0..=64 {
            let x = k as f64 / 64.0;
            let hits = l.iter().filter(|iv| iv.contains(x)).count();
            assert!(hits >= 3, "x = {x} covered {hits} times");
        }
    }
}
