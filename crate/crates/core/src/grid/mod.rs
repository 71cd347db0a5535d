//! Dyadic grids over the torus and the unit cube, and the functions that live on them.
//!
//! A [`GridFunction`] at level `J` holds one complex value per dyadic cell of side
//! `2^-J`, interpreted as the cell average. Cells are indexed lexicographically with
//! the last coordinate running fastest; coordinate `k` of a cell index is the
//! position along axis `x_{k+1}`.

mod bsvg;
mod mollify;
mod ops;
mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bsvg::{read_bsvg, read_bsvg_from, write_bsvg, write_bsvg_to, Dtype};
pub use mollify::{bump_kernel, mollify, mollify_direct};
pub use ops::{diff, dyadic_average, level_means, mean_pyramid, restrict_block, slice};
pub(crate) use ops::{ancestor, broadcast};
pub use quadrature::{gauss_legendre, sample, sample_complex, DEFAULT_QUADRATURE_ORDER};

/// Largest supported number of samples, `2^24`.
pub const MAX_SAMPLES_LOG2: usize = 24;
/// Largest supported level.
pub const MAX_LEVEL: usize = 16;
/// Tolerance on `| |u| - 1 |` for circle-valued maps.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// Periodic wrap in every axis.
    Torus,
    /// The open unit cube; differences reaching outside vanish.
    Cube,
}

impl Domain {
    pub fn code(self) -> u8 {
        match self {
            Domain::Torus => 0,
            Domain::Cube => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Domain::Torus),
            1 => Some(Domain::Cube),
            _ => None,
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "torus" => Ok(Domain::Torus),
            "cube" => Ok(Domain::Cube),
            other => Err(Error::InvalidParams(format!("unknown domain `{other}`"))),
        }
    }
}

/// Validated descriptor of a dyadic grid of mesh `2^-level` in `dim` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicGrid {
    dim: usize,
    level: usize,
    domain: Domain,
}

pub fn make_grid(dim: usize, level: usize, domain: Domain) -> Result<DyadicGrid> {
    DyadicGrid::new(dim, level, domain)
}

impl DyadicGrid {
    pub fn new(dim: usize, level: usize, domain: Domain) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::DimensionUnsupported(dim));
        }
        if level > MAX_LEVEL || dim * level > MAX_SAMPLES_LOG2 {
            return Err(Error::GridTooLarge { dim, level });
        }
        Ok(Self { dim, level, domain })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Number of cells along one axis, `2^level`.
    pub fn side(&self) -> usize {
        1 << self.level
    }

    /// Mesh size `2^-level`.
    pub fn mesh(&self) -> f64 {
        1.0 / self.side() as f64
    }

    /// Total number of cells, `2^(dim*level)`.
    pub fn len(&self) -> usize {
        1 << (self.dim * self.level)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Index stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        1 << (self.level * (self.dim - 1 - axis))
    }

    /// Same grid at another level.
    pub fn with_level(&self, level: usize) -> Result<Self> {
        Self::new(self.dim, level, self.domain)
    }

    pub fn coords(&self, index: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mask = self.side() - 1;
        for (axis, c) in out.iter_mut().enumerate().take(self.dim) {
            *c = (index >> (self.level * (self.dim - 1 - axis))) & mask;
        }
        out
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords[..self.dim]
            .iter()
            .fold(0usize, |acc, &c| (acc << self.level) | c)
    }

    /// Neighbour of `index` displaced by `offset` cells along `axis`; `None` when the
    /// displacement leaves the cube.
    pub fn shift(&self, index: usize, axis: usize, offset: isize) -> Option<usize> {
        let side = self.side() as isize;
        let c = self.coords(index)[axis] as isize;
        let target = c + offset;
        let wrapped = match self.domain {
            Domain::Torus => target.rem_euclid(side),
            Domain::Cube if (0..side).contains(&target) => target,
            Domain::Cube => return None,
        };
        let stride = self.stride(axis) as isize;
        Some((index as isize + (wrapped - c) * stride) as usize)
    }

    /// Centre of cell `index` in `[0,1)^dim`.
    pub fn center(&self, index: usize) -> [f64; 3] {
        let h = self.mesh();
        let c = self.coords(index);
        let mut out = [0.0; 3];
        for axis in 0..self.dim {
            out[axis] = (c[axis] as f64 + 0.5) * h;
        }
        out
    }
}

/// Cell-average samples on a dyadic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: DyadicGrid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: DyadicGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParams(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFiniteSample(i));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: DyadicGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(grid: DyadicGrid, value: Complex64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn zeros(grid: DyadicGrid) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    /// Unchecked constructor for kernels that only produce finite values.
    pub(crate) fn from_parts(grid: DyadicGrid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub(crate) fn from_real_parts(grid: DyadicGrid, values: Vec<f64>) -> Self {
        Self::from_parts(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &DyadicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Global mean (integral over the unit cube).
    pub fn mean(&self) -> Complex64 {
        level_means(self, 0).expect("level 0 always exists")[0]
    }

    /// `L^p` norm computed from the cell averages.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(&self.values, p, self.grid.cell_volume())
    }

    pub fn sup_norm(&self) -> f64 {
        crate::par::max(self.len(), |i| self.values[i].norm()).max(0.0)
    }

    /// `a*self + b*other` on the same grid.
    pub fn lin_comb(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::DomainMismatch("grids differ".into()));
        }
        Ok(Self::from_parts(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect(),
        ))
    }
}

/// `(sum |v|^p * vol)^(1/p)`; the scaling by the largest modulus keeps the result
/// exact for a single nonzero entry.
pub(crate) fn lp_norm(values: &[Complex64], p: f64, cell_volume: f64) -> f64 {
    let peak = crate::par::max(values.len(), |i| values[i].norm());
    if !(peak > 0.0) {
        return 0.0;
    }
    let s = crate::par::sum(values.len(), |i| (values[i].norm() / peak).powf(p));
    peak * (s * cell_volume).powf(1.0 / p)
}

/// A grid function with unit-modulus values.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap(GridFunction);

impl CircleMap {
    pub fn new(f: GridFunction) -> Result<Self> {
        if let Some(i) = f.values.iter().position(|v| (v.norm() - 1.0).abs() > UNIT_TOL) {
            return Err(Error::NotUnimodular(i));
        }
        Ok(Self(f))
    }

    /// `e^{i phase}` cellwise.
    pub fn from_phase(grid: DyadicGrid, phase: &[f64]) -> Result<Self> {
        let values = phase.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        Self::new(GridFunction::new(grid, values)?)
    }

    pub fn grid(&self) -> &DyadicGrid {
        self.0.grid()
    }

    pub fn values(&self) -> &[Complex64] {
        self.0.values()
    }

    pub fn as_function(&self) -> &GridFunction {
        &self.0
    }

    pub fn into_function(self) -> GridFunction {
        self.0
    }

    /// `c * u` for a unit constant `c`.
    pub fn rotate(&self, c: Complex64) -> Result<Self> {
        Self::new(self.0.map(|v| v * c))
    }
}

/// Summability exponent: finite `q >= 1` or the sup.
/// Summability exponent; serialized as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Exponent::Finite(q) => Some(q),
            Exponent::Infinite => None,
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Exponent::Finite(q) => ser.serialize_f64(q),
            Exponent::Infinite => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(q) => Ok(Exponent::Finite(q)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(Exponent::Infinite),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|q| q.is_finite())
                .map(Exponent::Finite)
                .ok_or_else(|| Error::InvalidParams(format!("bad exponent `{other}`"))),
        }
    }
}

/// Smoothness `s`, integrability `p`, summability `q` and dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub q: Exponent,
    pub dim: usize,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, q: Exponent, dim: usize) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParams(format!("s = {s} must be positive")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidParams(format!("p = {p} must lie in [1, inf)")));
        }
        if let Exponent::Finite(qv) = q {
            if !(qv >= 1.0) {
                return Err(Error::InvalidParams(format!("q = {qv} must be >= 1")));
            }
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::DimensionUnsupported(dim));
        }
        Ok(Self { s, p, q, dim })
    }

    /// Shorthand for finite `q`.
    pub fn finite(s: f64, p: f64, q: f64, dim: usize) -> Result<Self> {
        Self::new(s, p, Exponent::Finite(q), dim)
    }

    pub fn sp(&self) -> f64 {
        self.s * self.p
    }

    pub fn with_q(&self, q: Exponent) -> Self {
        Self { q, ..*self }
    }

    pub fn with_dim(&self, dim: usize) -> Self {
        Self { dim, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_grid_examples() {
        let g = make_grid(2, 3, Domain::Torus).unwrap();
        assert_eq!(g.len(), 64);
        let g = make_grid(1, 0, Domain::Cube).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(
            make_grid(3, 10, Domain::Torus),
            Err(Error::GridTooLarge { dim: 3, level: 10 })
        );
        assert_eq!(make_grid(4, 1, Domain::Torus), Err(Error::DimensionUnsupported(4)));
        assert_eq!(make_grid(0, 1, Domain::Torus), Err(Error::DimensionUnsupported(0)));
        assert!(make_grid(1, 17, Domain::Cube).is_err());
        assert!(make_grid(3, 8, Domain::Cube).is_ok());
    }

    #[test]
    fn coords_round_trip_and_shift() {
        let g = make_grid(3, 2, Domain::Torus).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.index(&g.coords(i)), i);
        }
        let i = g.index(&[1, 3, 0]);
        assert_eq!(g.coords(g.shift(i, 1, 1).unwrap()), [1, 0, 0]);
        assert_eq!(g.coords(g.shift(i, 2, -1).unwrap()), [1, 3, 3]);
        let c = make_grid(3, 2, Domain::Cube).unwrap();
        assert_eq!(c.shift(i, 1, 1), None);
        assert_eq!(c.coords(c.shift(i, 0, 2).unwrap()), [3, 3, 0]);
    }

    #[test]
    fn rejects_bad_values() {
        let g = make_grid(1, 1, Domain::Cube).unwrap();
        assert!(GridFunction::from_real(g, vec![1.0]).is_err());
        assert_eq!(
            GridFunction::from_real(g, vec![1.0, f64::NAN]),
            Err(Error::NonFiniteSample(1))
        );
        let f = GridFunction::from_real(g, vec![1.0, 0.5]).unwrap();
        assert_eq!(CircleMap::new(f), Err(Error::NotUnimodular(1)));
    }

    #[test]
    fn params_validation() {
        assert!(BesovParams::finite(0.0, 2.0, 2.0, 1).is_err());
        assert!(BesovParams::finite(0.5, 0.5, 2.0, 1).is_err());
        assert!(BesovParams::finite(0.5, 2.0, 0.5, 1).is_err());
        assert!(BesovParams::new(0.5, 2.0, Exponent::Infinite, 2).is_ok());
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert_eq!("2.5".parse::<Exponent>().unwrap(), Exponent::Finite(2.5));
    }

    #[test]
    fn lp_norm_of_single_spike_is_exact() {
        let g = make_grid(1, 2, Domain::Cube).unwrap();
        let f = GridFunction::from_real(g, vec![0.0, 3.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.lp_norm(1.0), 0.75);
        assert_eq!(f.lp_norm(2.0), 3.0 * 0.5);
    }
}
