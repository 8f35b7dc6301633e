use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Evaluation route that produced an [`EvalResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    /// Double integral over the two spheres.
    Integral,
    /// Outer series with terminating unit-argument ₃F₂ coefficients.
    Series12,
    /// Two-variable Horn series, q-side table.
    Horn13,
    /// Two-variable Horn series, p-side table.
    Horn14,
    /// Closed form for q = 1.
    ClosedQ1,
    /// Cost-based dispatch; never stored in a finished result.
    Auto,
    /// Plain Gauss hypergeometric series.
    Gauss2F1,
    /// Generic Horn-series engine.
    HornSeries,
}

impl MethodTag {
    pub const ZONAL: [MethodTag; 5] = [
        MethodTag::Integral,
        MethodTag::Series12,
        MethodTag::Horn13,
        MethodTag::Horn14,
        MethodTag::ClosedQ1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::Integral => "integral",
            MethodTag::Series12 => "series12",
            MethodTag::Horn13 => "horn13",
            MethodTag::Horn14 => "horn14",
            MethodTag::ClosedQ1 => "closed_q1",
            MethodTag::Auto => "auto",
            MethodTag::Gauss2F1 => "gauss_2f1",
            MethodTag::HornSeries => "horn_series",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let tag = match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "integral" => MethodTag::Integral,
            "series12" => MethodTag::Series12,
            "horn13" => MethodTag::Horn13,
            "horn14" => MethodTag::Horn14,
            "closed_q1" | "closedq1" => MethodTag::ClosedQ1,
            "auto" => MethodTag::Auto,
            "gauss_2f1" => MethodTag::Gauss2F1,
            "horn_series" => MethodTag::HornSeries,
            other => return Err(format!("unknown method '{other}'")),
        };
        Ok(tag)
    }
}

/// Value of one evaluation together with its error estimate and the amount
/// of work (terms, shells or quadrature nodes) it consumed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub abs_err_est: f64,
    pub work: u64,
    pub method: MethodTag,
}

impl EvalResult {
    pub fn new(value: Complex64, abs_err_est: f64, work: u64, method: MethodTag) -> Self {
        debug_assert!(abs_err_est >= 0.0);
        Self {
            value,
            abs_err_est,
            work,
            method,
        }
    }

    pub(crate) fn scaled(self, factor: Complex64, method: MethodTag) -> Self {
        Self {
            value: self.value * factor,
            abs_err_est: self.abs_err_est * factor.norm(),
            work: self.work,
            method,
        }
    }
}
