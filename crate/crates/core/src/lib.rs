//! Zonal spherical functions of the pseudo-orthogonal groups SO(p, q),
//! evaluated by quadrature, by an outer hypergeometric series, by two
//! double Horn series and, for q = 1, by a Gauss hypergeometric closed form.

// `!(x > 0.0)` is the NaN-rejecting form used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod horn;
pub mod kernel;
pub mod quad;
pub mod result;
pub mod specfun;
pub mod zonal;

pub use error::{Error, Result};
pub use horn::{horn_eval, horn_format, horn_validate, HornParameter, HornSeries};
pub use kernel::{partner_sigma, principal_sigma, theta, GroupSignature, KernelPoint, RepresentationParams};
pub use num_complex::Complex64;
pub use quad::{zonal_integral, QuadratureSpec};
pub use result::{EvalResult, MethodTag};
pub use zonal::{verify_all, zonal_eval, HornForm, HornTable, VerifyReport, ZonalConfig};
