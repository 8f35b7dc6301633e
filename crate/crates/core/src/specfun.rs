//! Scalar special functions: complex log-gamma, Pochhammer symbols and the
//! Gauss hypergeometric series ₂F₁ on the real segment (-1, 1).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::result::{EvalResult, MethodTag};

/// Tolerance used to decide that a complex number sits on a pole of Γ.
pub const POLE_TOL: f64 = 1e-12;

/// Above this length the Pochhammer symbol switches from the direct product
/// to a log-gamma ratio.
pub const POCHHAMMER_PRODUCT_MAX: u64 = 64;

/// Hard cap on the number of ₂F₁ terms.
pub const GAUSS_2F1_MAX_TERMS: u64 = 1_000_000;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Returns `Some(n)` when `z` lies within [`POLE_TOL`] of the non-positive
/// integer `n`.
pub fn nonpositive_integer(z: Complex64) -> Option<i64> {
    let r = z.re.round();
    if r <= 0.0 && (z.re - r).abs() <= POLE_TOL && z.im.abs() <= POLE_TOL {
        Some(r as i64)
    } else {
        None
    }
}

/// ln Γ(z) for complex `z`.
///
/// Lanczos approximation (g = 7, nine terms) on Re z ≥ 1/2 and the
/// reflection formula elsewhere. The imaginary part is a continuous branch
/// along horizontal lines but is not reduced to (-π, π].
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain(format!("log_gamma of non-finite {z}")));
    }
    if let Some(n) = nonpositive_integer(z) {
        return Err(Error::pole(format!("log_gamma at non-positive integer {n}")));
    }
    if z.re < 0.5 {
        // ln Γ(z) = ln π - ln sin(πz) - ln Γ(1 - z)
        let rest = lanczos(Complex64::new(1.0, 0.0) - z);
        Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - rest)
    } else {
        Ok(lanczos(z))
    }
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// ln sin(πz), written to avoid overflow of sin for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (i/2) e^{-iπz} (1 - e^{2iπz}) for Im z > 0, and the
    // conjugate relation for Im z < 0.
    let i = Complex64::i();
    if z.im > 0.0 {
        let e = (2.0 * i * PI * z).exp();
        (i * 0.5).ln() - i * PI * z + (1.0 - e).ln()
    } else {
        let e = (-2.0 * i * PI * z).exp();
        (-i * 0.5).ln() + i * PI * z + (1.0 - e).ln()
    }
}

/// Rising factorial (a)_n = a (a+1) ... (a+n-1).
///
/// Direct product up to [`POCHHAMMER_PRODUCT_MAX`] factors, log-gamma ratio
/// beyond. A factor that is exactly zero makes the result exactly zero.
pub fn pochhammer(a: Complex64, n: u64) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if a.im == 0.0 && a.re <= 0.0 && a.re == a.re.floor() && -a.re < n as f64 {
        return Complex64::new(0.0, 0.0);
    }
    if n <= POCHHAMMER_PRODUCT_MAX || nonpositive_integer(a).is_some() {
        return pochhammer_product(a, n);
    }
    match (log_gamma(a + n as f64), log_gamma(a)) {
        (Ok(top), Ok(bottom)) => (top - bottom).exp(),
        _ => pochhammer_product(a, n),
    }
}

pub(crate) fn pochhammer_product(a: Complex64, n: u64) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| acc * (a + k as f64))
}

/// Gauss hypergeometric series ₂F₁(a, b; c; z) for real |z| < 1.
///
/// Terms follow the ratio (a+k)(b+k)z / ((c+k)(k+1)). Summation stops once
/// three consecutive terms satisfy |term| ≤ tol·|sum|, or as soon as a
/// numerator factor vanishes (terminating series). The error estimate is the
/// magnitude of the last term added.
pub fn gauss_2f1(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    z: f64,
    tol: f64,
) -> Result<EvalResult> {
    if !(z.abs() < 1.0) {
        return Err(Error::domain(format!("gauss_2f1 requires |z| < 1, got {z}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut small = 0u32;
    let mut k = 0u64;
    loop {
        let kf = k as f64;
        let num = (a + kf) * (b + kf);
        if num == Complex64::new(0.0, 0.0) {
            // terminated
            return Ok(EvalResult::new(sum, 0.0, k + 1, MethodTag::Gauss2F1));
        }
        let den = c + kf;
        if den.norm() <= POLE_TOL {
            return Err(Error::pole(format!(
                "gauss_2f1: c + {k} vanishes before the series terminates"
            )));
        }
        term *= num / den * (z / (kf + 1.0));
        sum += term;
        k += 1;
        if term.norm() <= tol * sum.norm() {
            small += 1;
            if small >= 3 {
                return Ok(EvalResult::new(sum, term.norm(), k + 1, MethodTag::Gauss2F1));
            }
        } else {
            small = 0;
        }
        if k >= GAUSS_2F1_MAX_TERMS {
            return Err(Error::Convergence {
                what: format!("gauss_2f1 at z = {z}"),
                work: k,
            });
        }
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn cplx() -> impl Strategy<Value = Complex64> {
        (-8.0f64..8.0, -8.0f64..8.0).prop_map(|(re, im)| Complex64::new(re, im))
    }

    proptest! {
        #[test]
        fn pochhammer_splits(a in cplx(), m in 0u64..40, n in 0u64..40) {
            let whole = pochhammer(a, m + n);
            let split = pochhammer(a, m) * pochhammer(a + m as f64, n);
            prop_assert!((whole - split).norm() <= 1e-11 * whole.norm().max(1e-300));
        }

        #[test]
        fn log_gamma_recurrence(z in cplx().prop_filter("away from poles", |z| z.norm() > 1e-3 && nonpositive_integer(*z).is_none() && (z - z.re.round()).norm() > 1e-6)) {
            let d = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln();
            prop_assert!(d.re.abs() < 1e-10 * (1.0 + z.norm()));
            let turns = d.im / (2.0 * PI);
            prop_assert!((turns - turns.round()).abs() < 1e-10 * (1.0 + z.norm()));
        }

        #[test]
        fn terminating_2f1_matches_polynomial(
            n in 0u32..25,
            b in cplx(),
            c in (0.5f64..10.0, -4.0f64..4.0).prop_map(|(re, im)| Complex64::new(re, im)),
            z in -0.95f64..0.95,
        ) {
            let a = Complex64::new(-f64::from(n), 0.0);
            let got = gauss_2f1(a, b, c, z, 1e-16).unwrap().value;
            let mut want = Complex64::new(0.0, 0.0);
            let mut scale = 0.0f64;
            for k in 0..=u64::from(n) {
                let term = pochhammer(a, k) * pochhammer(b, k) / pochhammer(c, k)
                    * z.powi(k as i32)
                    / (1..=k).map(|j| j as f64).product::<f64>();
                want += term;
                scale = scale.max(term.norm());
            }
            prop_assert!((got - want).norm() <= 1e-12 * scale.max(1.0));
        }
    }
}
