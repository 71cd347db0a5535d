//! Seeded test functions shared by the acceptance suites and the CLI.
//!
//! Every corpus item is described independently of the grid, so the same function can
//! be realized at several levels.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{broadcast, sample, DyadicGrid, GridFunction};
use num_complex::Complex64;

/// One term `amp * cos(2 pi k . x + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wave {
    pub amp: f64,
    pub freq: Vec<i32>,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CorpusFunction {
    /// Constant on the dyadic cells of `level`, one value per cell.
    PiecewiseConstant { level: usize, values: Vec<f64> },
    /// Finite trigonometric sum, realized as cell averages by quadrature.
    Smooth { waves: Vec<Wave> },
}

impl CorpusFunction {
    pub fn realize(&self, grid: &DyadicGrid) -> Result<GridFunction> {
        match self {
            CorpusFunction::PiecewiseConstant { level, values } => {
                if *level > grid.level() {
                    return Err(Error::LevelOutOfRange { level: *level, max: grid.level() });
                }
                if values.len() != 1 << (grid.dim() * level) {
                    return Err(Error::InvalidParams("corpus item does not match the grid dimension".into()));
                }
                let coarse: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                GridFunction::new(*grid, broadcast(grid, &coarse, *level))
            }
            CorpusFunction::Smooth { waves } => {
                if waves.iter().any(|w| w.freq.len() != grid.dim()) {
                    return Err(Error::InvalidParams("corpus item does not match the grid dimension".into()));
                }
                sample(|x| eval_waves(waves, x), grid, 4)
            }
        }
    }

    /// Pointwise value (smooth items only).
    pub fn eval(&self, x: &[f64]) -> Option<f64> {
        match self {
            CorpusFunction::Smooth { waves } => Some(eval_waves(waves, x)),
            CorpusFunction::PiecewiseConstant { .. } => None,
        }
    }
}

fn eval_waves(waves: &[Wave], x: &[f64]) -> f64 {
    waves
        .iter()
        .map(|w| {
            let arg: f64 = w.freq.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
            w.amp * (TAU * arg + w.phase).cos()
        })
        .sum()
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn random_piecewise(r: &mut ChaCha8Rng, dim: usize, max_level: usize, range: f64) -> CorpusFunction {
    let level = r.random_range(1..=max_level);
    let values = (0..1usize << (dim * level)).map(|_| r.random_range(-range..range)).collect();
    CorpusFunction::PiecewiseConstant { level, values }
}

fn random_smooth(r: &mut ChaCha8Rng, dim: usize, max_freq: i32, terms: usize) -> CorpusFunction {
    let waves = (0..terms)
        .map(|_| Wave {
            amp: r.random_range(-1.0..1.0),
            freq: (0..dim).map(|_| r.random_range(-max_freq..=max_freq)).collect(),
            phase: r.random_range(0.0..TAU),
        })
        .collect();
    CorpusFunction::Smooth { waves }
}

/// `n` real test functions in `dim` dimensions: alternately random piecewise constants on
/// levels `1..=5` and random trigonometric sums; none is constant.
pub fn norm_corpus(seed: u64, n: usize, dim: usize) -> Vec<CorpusFunction> {
    let mut r = rng(seed, 1);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let item = if out.len() % 2 == 0 {
            random_piecewise(&mut r, dim, 5, 1.0)
        } else {
            random_smooth(&mut r, dim, 4, 3)
        };
        let constant = match &item {
            CorpusFunction::PiecewiseConstant { values, .. } => values.iter().all(|&v| v == values[0]),
            CorpusFunction::Smooth { waves } => waves.iter().all(|w| w.freq.iter().all(|&k| k == 0)),
        };
        if !constant {
            out.push(item);
        }
    }
    out
}

/// `n` piecewise-constant phase fields on levels `1..=6` with values in `[-2 pi, 2 pi)`.
pub fn random_phases(seed: u64, n: usize, dim: usize) -> Vec<CorpusFunction> {
    let mut r = rng(seed, 2);
    (0..n).map(|_| random_piecewise(&mut r, dim, 6, TAU)).collect()
}

/// A random trigonometric phase scaled so that `sup |phi| <= amplitude`.
pub fn smooth_phase(seed: u64, index: u64, dim: usize, max_freq: i32, amplitude: f64) -> CorpusFunction {
    let mut r = rng(seed, 100 + index);
    let CorpusFunction::Smooth { mut waves } = random_smooth(&mut r, dim, max_freq, 4) else { unreachable!() };
    let total: f64 = waves.iter().map(|w| w.amp.abs()).sum();
    for w in &mut waves {
        w.amp *= amplitude / total;
    }
    CorpusFunction::Smooth { waves }
}

/// Random real values in `[-1, 1)` on the interior cells of a cube grid, 0 on boundary cells.
pub fn random_interior_field(seed: u64, index: u64, grid: &DyadicGrid) -> GridFunction {
    let mut r = rng(seed, 1000 + index);
    let side = grid.side();
    let values = (0..grid.len())
        .map(|i| {
            let v: f64 = r.random_range(-1.0..1.0);
            let c = grid.coords(i);
            if c[..grid.dim()].iter().any(|&k| k == 0 || k + 1 == side) {
                0.0
            } else {
                v
            }
        })
        .collect();
    GridFunction::from_real(*grid, values).expect("finite values")
}
