//! Discrete Besov norm estimators.
//!
//! Three characterizations are available: finite differences over dyadic offsets,
//! differences of dyadic averages, and Haar coefficients. The last two are norm
//! equivalent only for `s p < 1`; outside that range they are still computed and the
//! report is flagged.

mod averages;
mod diff;
mod haar;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BesovParams, Exponent};

pub use averages::{haar_average_norm, telescoping_norm, vmo_modulus};
pub use diff::{diff_full_norm, diff_seminorm, poincare_ratio};
pub use haar::{
    haar_basis_function, haar_coeff_decompose, haar_coeff_norm, haar_synthesize, HaarCoefficients,
    HaarLevel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMethod {
    #[serde(rename = "diff")]
    Diff,
    #[serde(rename = "haar-avg")]
    HaarAvg,
    #[serde(rename = "haar-coeff")]
    HaarCoeff,
}

impl NormMethod {
    pub fn name(self) -> &'static str {
        match self {
            NormMethod::Diff => "diff",
            NormMethod::HaarAvg => "haar-avg",
            NormMethod::HaarCoeff => "haar-coeff",
        }
    }
}

impl std::fmt::Display for NormMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NormMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diff" => Ok(NormMethod::Diff),
            "haar-avg" => Ok(NormMethod::HaarAvg),
            "haar-coeff" => Ok(NormMethod::HaarCoeff),
            other => Err(Error::InvalidParams(format!("unknown norm method `{other}`"))),
        }
    }
}

/// Weighted contribution of one dyadic level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelTerm {
    pub j: usize,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub params: BesovParams,
    pub method: NormMethod,
    /// Ordered by `j`; `total` is their `l^q` aggregate.
    pub levels: Vec<LevelTerm>,
    pub total: f64,
    /// False when the estimator is used outside its equivalence range (`s p >= 1`).
    pub equivalent: bool,
}

impl NormReport {
    /// [`Error::OutOfValidityRange`] for reports computed outside the equivalence range.
    pub fn require_equivalent(&self) -> Result<&Self> {
        if self.equivalent {
            Ok(self)
        } else {
            Err(Error::OutOfValidityRange(self.params.sp()))
        }
    }

    /// CSV with header `j,term,method,s,p,q`, one row per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,term,method,s,p,q\n");
        for l in &self.levels {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                l.j,
                fmt17(l.term),
                self.method,
                fmt17(self.params.s),
                fmt17(self.params.p),
                fmt_exponent(self.params.q)
            ));
        }
        out
    }

    /// `{method, s, p, q, total, levels, equivalent}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "method": self.method,
            "s": self.params.s,
            "p": self.params.p,
            "q": self.params.q,
            "total": self.total,
            "levels": self.levels,
            "equivalent": self.equivalent,
        })
    }
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_exponent(q: Exponent) -> String {
    match q {
        Exponent::Finite(v) => fmt17(v),
        Exponent::Infinite => "inf".into(),
    }
}

/// `l^q` norm of nonnegative terms (sup for `q = inf`), scaled by the largest term so a
/// single nonzero term is returned exactly.
pub fn lq_aggregate(terms: &[f64], q: Exponent) -> f64 {
    let peak = terms.iter().copied().fold(0.0, f64::max);
    match q {
        Exponent::Infinite => peak,
        Exponent::Finite(_) if !(peak > 0.0) => 0.0,
        Exponent::Finite(qv) => {
            let s: f64 = terms.iter().map(|&t| (t / peak).powf(qv)).sum();
            peak * s.powf(1.0 / qv)
        }
    }
}

pub(crate) fn validity(params: &BesovParams) -> bool {
    params.sp() < 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lq_singleton_is_exact() {
        for q in [Exponent::Finite(1.0), Exponent::Finite(2.7), Exponent::Infinite] {
            assert_eq!(lq_aggregate(&[0.0, 0.1234567, 0.0], q), 0.1234567);
        }
        assert_eq!(lq_aggregate(&[], Exponent::Finite(2.0)), 0.0);
        assert!((lq_aggregate(&[3.0, 4.0], Exponent::Finite(2.0)) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn csv_header_and_digits() {
        let r = NormReport {
            params: BesovParams::new(0.3, 2.0, Exponent::Infinite, 1).unwrap(),
            method: NormMethod::HaarAvg,
            levels: vec![LevelTerm { j: 0, term: 0.1 }],
            total: 0.1,
            equivalent: true,
        };
        let csv = r.to_csv();
        assert_eq!(
            csv,
            "j,term,method,s,p,q\n0,1.0000000000000001e-1,haar-avg,2.9999999999999999e-1,2.0000000000000000e0,inf\n"
        );
        let v = r.to_json_value();
        assert_eq!(v["q"], "inf");
        assert_eq!(v["method"], "haar-avg");
    }
}
