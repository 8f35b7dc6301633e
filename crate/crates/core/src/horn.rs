//! Horn-type hypergeometric series in r variables,
//!
//! ```text
//! F(X) = Σ_{n ∈ ℕ^r} Π_α (a_α)_{u^α·n} / Π_β (b_β)_{v^β·n} · Π_i X_i^{n_i} / n_i!
//! ```
//!
//! with 0/1 weight vectors u^α, v^β. The balance of variable i is
//! `Σ_α u^α_i - Σ_β v^β_i`; the hypergeometric series met in practice satisfy
//! it with equality at 1, i.e. `Σ_α u^α_i = Σ_β v^β_i + 1`, which gives the
//! unit polydisk as the region of convergence along each axis. Other balances
//! are reported rather than rejected, except positive balances of 2 or more,
//! whose series diverge for every non-zero argument.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::result::{EvalResult, MethodTag};
use crate::specfun::{nonpositive_integer, POLE_TOL};

/// Upper clamp of the observed shell ratio used in the tail estimate.
pub const TAIL_RATIO_MAX: f64 = 0.99;

/// Number of consecutive small shells required to stop.
pub const SMALL_SHELLS_TO_STOP: u32 = 3;

/// A Pochhammer base together with the variables whose indices it collects.
#[derive(Debug, Clone, PartialEq)]
pub struct HornParameter {
    pub base: Complex64,
    weights: Vec<u8>,
    label: Option<String>,
}

impl HornParameter {
    /// `weights` must be a non-empty 0/1 vector that is not identically 0.
    pub fn new(base: Complex64, weights: &[u32]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|&&w| w > 1) {
            return Err(Error::domain(format!(
                "Horn weights must be 0 or 1, got {w} in {weights:?}"
            )));
        }
        if !weights.contains(&1) {
            return Err(Error::domain(format!("Horn weight vector {weights:?} is all zero")));
        }
        if !(base.re.is_finite() && base.im.is_finite()) {
            return Err(Error::domain(format!("Horn parameter base {base} is not finite")));
        }
        Ok(Self {
            base,
            weights: weights.iter().map(|&w| w as u8).collect(),
            label: None,
        })
    }

    /// Attaches a symbolic name used by [`horn_format`].
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn weights(&self) -> &[u8] {
        &self.weights
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    fn pattern(&self) -> String {
        self.weights.iter().map(|w| char::from(b'0' + w)).collect()
    }

    fn index(&self, n: &[u32]) -> u64 {
        self.weights
            .iter()
            .zip(n)
            .map(|(&w, &k)| u64::from(w) * u64::from(k))
            .sum()
    }
}

/// Immutable description of a Horn-type series.
#[derive(Debug, Clone, PartialEq)]
pub struct HornSeries {
    r: usize,
    numerator: Vec<HornParameter>,
    denominator: Vec<HornParameter>,
}

impl HornSeries {
    pub fn new(r: usize, numerator: Vec<HornParameter>, denominator: Vec<HornParameter>) -> Result<Self> {
        if r == 0 {
            return Err(Error::domain("a Horn series needs at least one variable"));
        }
        for p in numerator.iter().chain(&denominator) {
            if p.weights.len() != r {
                return Err(Error::domain(format!(
                    "weight vector {:?} has length {}, expected {r}",
                    p.weights,
                    p.weights.len()
                )));
            }
        }
        if let Some(p) = denominator.iter().find(|p| nonpositive_integer(p.base).is_some()) {
            return Err(Error::pole(format!(
                "denominator base {} is a non-positive integer",
                p.base
            )));
        }
        Ok(Self { r, numerator, denominator })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn numerator(&self) -> &[HornParameter] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[HornParameter] {
        &self.denominator
    }
}

/// Convergence class of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceClass {
    /// Balance ≤ 0: the series is entire in this variable.
    Entire,
    /// Balance 1: converges for |X_i| < 1, like ₂F₁.
    UnitRadius,
    /// Balance ≥ 2: diverges for X_i ≠ 0; evaluation is refused.
    Divergent,
}

/// Per-variable balances `Σ numerator weights - Σ denominator weights`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornValidation {
    pub balances: Vec<i64>,
    pub classes: Vec<BalanceClass>,
}

impl HornValidation {
    pub fn evaluable(&self) -> bool {
        !self.classes.contains(&BalanceClass::Divergent)
    }
}

pub fn horn_validate(series: &HornSeries) -> HornValidation {
    let column = |params: &[HornParameter], i: usize| -> i64 {
        params.iter().map(|p| i64::from(p.weights[i])).sum()
    };
    let balances: Vec<i64> = (0..series.r)
        .map(|i| column(&series.numerator, i) - column(&series.denominator, i))
        .collect();
    let classes = balances
        .iter()
        .map(|&b| match b {
            b if b <= 0 => BalanceClass::Entire,
            1 => BalanceClass::UnitRadius,
            _ => BalanceClass::Divergent,
        })
        .collect();
    HornValidation { balances, classes }
}

/// Evaluation knobs beyond tolerance and shell cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HornEvalOptions {
    /// Accumulate each shell's terms in reverse generation order.
    pub reverse_within_shell: bool,
}

/// Sums the series in shells of constant total order `n_1 + ... + n_r`.
///
/// `work` in the result counts shells. Stops once three consecutive shell
/// sums are below `tol·max(1, |sum|)`.
pub fn horn_eval(series: &HornSeries, x: &[Complex64], tol: f64, max_shells: u64) -> Result<EvalResult> {
    horn_eval_with(series, x, tol, max_shells, HornEvalOptions::default())
}

pub fn horn_eval_with(
    series: &HornSeries,
    x: &[Complex64],
    tol: f64,
    max_shells: u64,
    opts: HornEvalOptions,
) -> Result<EvalResult> {
    let r = series.r;
    if x.len() != r {
        return Err(Error::domain(format!("expected {r} arguments, got {}", x.len())));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let report = horn_validate(series);
    for (i, class) in report.classes.iter().enumerate() {
        match class {
            BalanceClass::Divergent if x[i] != Complex64::new(0.0, 0.0) => {
                return Err(Error::domain(format!(
                    "variable {} has balance {} and the series diverges",
                    i + 1,
                    report.balances[i]
                )));
            }
            BalanceClass::UnitRadius if !(x[i].norm() < 1.0) => {
                return Err(Error::domain(format!(
                    "|X_{}| = {} is outside the unit disk",
                    i + 1,
                    x[i].norm()
                )));
            }
            _ => {}
        }
    }

    // Parameters touching each variable, for the one-step ratio.
    let num_by_var: Vec<Vec<&HornParameter>> = (0..r)
        .map(|i| series.numerator.iter().filter(|p| p.weights[i] == 1).collect())
        .collect();
    let den_by_var: Vec<Vec<&HornParameter>> = (0..r)
        .map(|i| series.denominator.iter().filter(|p| p.weights[i] == 1).collect())
        .collect();

    // A shell is stored as flat index vectors plus terms. Each composition n
    // of N+1 is generated once, from n - e_i where i is the first non-zero
    // coordinate of n.
    let mut idx: Vec<u32> = vec![0; r];
    let mut terms: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let mut sum = Complex64::new(1.0, 0.0);
    let mut prev_norm = 1.0f64;
    let mut small = 0u32;
    let mut shells = 1u64;

    loop {
        if shells >= max_shells {
            return Err(Error::Convergence {
                what: format!("Horn series ({r} variables)"),
                work: shells,
            });
        }
        let mut next_idx = Vec::with_capacity(idx.len() + r * r);
        let mut next_terms = Vec::with_capacity(terms.len() + r);
        for (k, &t) in terms.iter().enumerate() {
            let m = &idx[k * r..(k + 1) * r];
            let first = m.iter().position(|&v| v != 0).unwrap_or(r - 1);
            for i in 0..=first {
                let child = if t == Complex64::new(0.0, 0.0) || x[i] == Complex64::new(0.0, 0.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    let mut num = x[i] / f64::from(m[i] + 1);
                    for p in &num_by_var[i] {
                        num *= p.base + p.index(m) as f64;
                    }
                    let mut den = Complex64::new(1.0, 0.0);
                    for p in &den_by_var[i] {
                        let f = p.base + p.index(m) as f64;
                        if f.norm() <= POLE_TOL && num != Complex64::new(0.0, 0.0) {
                            return Err(Error::pole(format!(
                                "denominator ({})_{{n}} vanishes at index {}",
                                p.base,
                                p.index(m)
                            )));
                        }
                        den *= f;
                    }
                    if num == Complex64::new(0.0, 0.0) {
                        num
                    } else {
                        t * num / den
                    }
                };
                next_idx.extend_from_slice(m);
                let last = next_idx.len() - r + i;
                next_idx[last] += 1;
                next_terms.push(child);
            }
        }
        idx = next_idx;
        terms = next_terms;
        shells += 1;

        let shell_sum: Complex64 = if opts.reverse_within_shell {
            terms.iter().rev().sum()
        } else {
            terms.iter().sum()
        };
        sum += shell_sum;
        let s = shell_sum.norm();
        if s < tol * sum.norm().max(1.0) {
            small += 1;
        } else {
            small = 0;
        }
        if small >= SMALL_SHELLS_TO_STOP {
            let rho = if s == 0.0 {
                0.0
            } else if prev_norm == 0.0 {
                TAIL_RATIO_MAX
            } else {
                (s / prev_norm).clamp(0.0, TAIL_RATIO_MAX)
            };
            let err = s / (1.0 - rho);
            return Ok(EvalResult::new(sum, err, shells, MethodTag::HornSeries));
        }
        prev_norm = s;
        if terms.iter().all(|t| *t == Complex64::new(0.0, 0.0)) {
            // every later term descends from a zero
            return Ok(EvalResult::new(sum, 0.0, shells, MethodTag::HornSeries));
        }
    }
}

/// Renders the series in weight-row bracket notation: one row per distinct
/// weight pattern, numerator rows above the separator, denominator rows
/// below, each prefixed by its pattern.
pub fn horn_format(series: &HornSeries) -> String {
    let mut out = format!(
        "F^{{{}}}_{{{}}}[\n",
        series.numerator.len(),
        series.denominator.len()
    );
    let rows = |params: &[HornParameter], out: &mut String| {
        let mut patterns: Vec<String> = Vec::new();
        for p in params {
            let pat = p.pattern();
            if !patterns.contains(&pat) {
                patterns.push(pat);
            }
        }
        for pat in patterns {
            let bases: Vec<String> = params
                .iter()
                .filter(|p| p.pattern() == pat)
                .map(|p| p.label.clone().unwrap_or_else(|| format_complex(p.base)))
                .collect();
            let _ = writeln!(out, "  {pat} | {}", bases.join(", "));
        }
    };
    rows(&series.numerator, &mut out);
    out.push_str("  ---\n");
    rows(&series.denominator, &mut out);
    let vars: Vec<String> = (1..=series.r).map(|i| format!("X{i}")).collect();
    let _ = write!(out, "; {}]", vars.join(", "));
    out
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{}{}i", z.re, sign, z.im.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gauss_2f1;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gauss_pattern(a: Complex64, b: Complex64, cc: Complex64) -> HornSeries {
        HornSeries::new(
            2,
            vec![
                HornParameter::new(a, &[1, 0]).unwrap(),
                HornParameter::new(b, &[1, 0]).unwrap(),
            ],
            vec![HornParameter::new(cc, &[1, 0]).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn parameter_weights_are_restricted() {
        assert!(HornParameter::new(c(1.0, 0.0), &[2, 0]).is_err());
        assert!(HornParameter::new(c(1.0, 0.0), &[0, 0]).is_err());
        assert!(HornParameter::new(c(1.0, 0.0), &[]).is_err());
        assert!(HornParameter::new(c(1.0, 0.0), &[0, 1]).is_ok());
    }

    #[test]
    fn series_construction_checks() {
        let p = HornParameter::new(c(1.0, 0.0), &[1, 0]).unwrap();
        assert!(HornSeries::new(3, vec![p.clone()], vec![]).is_err());
        assert!(matches!(
            HornSeries::new(2, vec![], vec![HornParameter::new(c(-2.0, 0.0), &[1, 0]).unwrap()]),
            Err(Error::Pole(_))
        ));
        assert!(HornSeries::new(0, vec![], vec![]).is_err());
    }

    #[test]
    fn validation_classes() {
        let g = gauss_pattern(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0));
        let v = horn_validate(&g);
        assert_eq!(v.balances, vec![1, 0]);
        assert_eq!(v.classes, vec![BalanceClass::UnitRadius, BalanceClass::Entire]);

        let e = HornSeries::new(2, vec![], vec![]).unwrap();
        assert_eq!(horn_validate(&e).balances, vec![0, 0]);
        assert!(horn_validate(&e).evaluable());

        let one = c(1.0, 0.0);
        let d = HornSeries::new(
            1,
            (0..3).map(|_| HornParameter::new(one, &[1]).unwrap()).collect(),
            vec![HornParameter::new(one, &[1]).unwrap()],
        )
        .unwrap();
        let v = horn_validate(&d);
        assert_eq!((v.balances[0], v.classes[0]), (2, BalanceClass::Divergent));
        assert!(matches!(horn_eval(&d, &[c(0.1, 0.0)], 1e-12, 100), Err(Error::Domain(_))));
    }

    #[test]
    fn exponential_series() {
        let e = HornSeries::new(2, vec![], vec![]).unwrap();
        let r = horn_eval(&e, &[c(0.3, 0.0), c(0.2, 0.0)], 1e-15, 1000).unwrap();
        assert!((r.value - c(1.648_721_270_700_128_2, 0.0)).norm() < 1e-15);
        assert_eq!(r.method, MethodTag::HornSeries);
    }

    #[test]
    fn gauss_degeneration() {
        let one = c(1.0, 0.0);
        let g = gauss_pattern(one, one, c(2.0, 0.0));
        let r = horn_eval(&g, &[c(0.5, 0.0), c(0.0, 0.0)], 1e-15, 10_000).unwrap();
        assert!((r.value.re - 1.386_294_361_119_890_6).abs() < 1e-14);

        let (a, b, cc) = (c(0.4, -1.3), c(-2.2, 0.7), c(1.9, 0.0));
        let g = gauss_pattern(a, b, cc);
        let r = horn_eval(&g, &[c(-0.7, 0.0), c(0.0, 0.0)], 1e-15, 10_000).unwrap();
        let want = gauss_2f1(a, b, cc, -0.7, 1e-16).unwrap().value;
        assert!((r.value - want).norm() <= 1e-13 * want.norm());
    }

    #[test]
    fn matched_pair_cancels() {
        let a = c(0.7, 0.2);
        let b = c(1.3, -0.4);
        let base = HornSeries::new(
            2,
            vec![HornParameter::new(a, &[1, 1]).unwrap()],
            vec![HornParameter::new(c(2.5, 0.0), &[0, 1]).unwrap()],
        )
        .unwrap();
        let mut num = base.numerator().to_vec();
        num.push(HornParameter::new(b, &[1, 0]).unwrap());
        let mut den = base.denominator().to_vec();
        den.push(HornParameter::new(b, &[1, 0]).unwrap());
        let padded = HornSeries::new(2, num, den).unwrap();
        let x = [c(0.1, 0.0), c(0.1, 0.0)];
        let u = horn_eval(&base, &x, 1e-15, 1000).unwrap().value;
        let v = horn_eval(&padded, &x, 1e-15, 1000).unwrap().value;
        assert!((u - v).norm() <= 1e-15 * u.norm());
    }

    #[test]
    fn terminating_numerator_gives_exact_zeros() {
        // (-3)_{n1} kills every term with n1 > 3; X2 = 0 leaves a polynomial
        let s = HornSeries::new(
            2,
            vec![
                HornParameter::new(c(-3.0, 0.0), &[1, 0]).unwrap(),
                HornParameter::new(c(0.5, 0.0), &[1, 1]).unwrap(),
            ],
            vec![HornParameter::new(c(1.5, 0.0), &[1, 1]).unwrap()],
        )
        .unwrap();
        let r = horn_eval(&s, &[c(0.9, 0.0), c(0.0, 0.0)], 1e-15, 100).unwrap();
        assert_eq!(r.abs_err_est, 0.0);
        assert!(r.work <= 6);
        // brute force: Σ_{k≤3} (-3)_k (1/2)_k / (3/2)_k · 0.9^k / k!
        let mut want = 0.0;
        let mut t = 1.0;
        for k in 0..=3 {
            want += t;
            let kf = f64::from(k);
            t *= (-3.0 + kf) * (0.5 + kf) / (1.5 + kf) * 0.9 / (kf + 1.0);
        }
        assert!((r.value.re - want).abs() < 1e-15);
    }

    #[test]
    fn reversed_shell_order_is_stable() {
        let s = HornSeries::new(
            2,
            vec![
                HornParameter::new(c(-0.8, 1.1), &[1, 0]).unwrap(),
                HornParameter::new(c(1.2, -0.3), &[0, 1]).unwrap(),
                HornParameter::new(c(0.5, 0.0), &[1, 1]).unwrap(),
            ],
            vec![HornParameter::new(c(1.7, 0.0), &[1, 1]).unwrap()],
        )
        .unwrap();
        let x = [c(0.6, 0.0), c(0.6, 0.0)];
        let fwd = horn_eval(&s, &x, 1e-14, 10_000).unwrap();
        let rev = horn_eval_with(
            &s,
            &x,
            1e-14,
            10_000,
            HornEvalOptions { reverse_within_shell: true },
        )
        .unwrap();
        assert!((fwd.value - rev.value).norm() <= 1e-13 * fwd.value.norm());
    }

    #[test]
    fn shell_cap_reports_non_convergence() {
        let g = gauss_pattern(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            horn_eval(&g, &[c(0.999, 0.0), c(0.0, 0.0)], 1e-12, 50),
            Err(Error::Convergence { work: 50, .. })
        ));
        assert!(matches!(
            horn_eval(&g, &[c(1.0, 0.0), c(0.0, 0.0)], 1e-12, 50),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn formatting() {
        let g = HornSeries::new(
            1,
            vec![
                HornParameter::new(c(1.0, 0.0), &[1]).unwrap().with_label("a"),
                HornParameter::new(c(1.0, 0.0), &[1]).unwrap().with_label("b"),
            ],
            vec![HornParameter::new(c(2.0, 0.0), &[1]).unwrap().with_label("c")],
        )
        .unwrap();
        assert_eq!(horn_format(&g), "F^{2}_{1}[\n  1 | a, b\n  ---\n  1 | c\n; X1]");

        let e = HornSeries::new(2, vec![], vec![]).unwrap();
        assert_eq!(horn_format(&e), "F^{0}_{0}[\n  ---\n; X1, X2]");

        let n = HornSeries::new(
            2,
            vec![
                HornParameter::new(c(0.5, -1.0), &[1, 0]).unwrap(),
                HornParameter::new(c(2.0, 0.0), &[0, 1]).unwrap(),
                HornParameter::new(c(-3.0, 0.0), &[1, 0]).unwrap(),
            ],
            vec![],
        )
        .unwrap();
        assert_eq!(
            horn_format(&n),
            "F^{3}_{0}[\n  10 | 0.5-1i, -3\n  01 | 2\n  ---\n; X1, X2]"
        );
    }
}
