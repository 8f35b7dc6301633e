//! Zonal spherical functions Z^{p,q}_σ(α) by every available route, and a
//! verifier that checks the routes against each other.
//!
//! With t = th²α:
//!
//! ```text
//! Series12:  Z = (1/ch α) Σ_M (½)_M (-σ/2)_M (1-(σ+q)/2)_M / ((p/2)_M (q/2)_M M!) t^M
//!                 · ₃F₂(-M, 1-M-p/2, (σ+q)/2; 1-M+σ/2, (σ+q)/2-M; 1)
//! Horn13:    Z = (1/ch α) F[10: -σ/2, 1-(σ+q)/2 | 01: (σ+q)/2 | 11: ½ ;
//!                           11: q/2 | 10: p/2 ; t, t]
//! Horn14:    Horn13 with p and q exchanged
//! ClosedQ1:  Z = ch^σ α · ₂F₁(-σ/2, (1-σ)/2; p/2; t)          (q = 1)
//! ```

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::horn::{horn_eval, HornParameter, HornSeries, TAIL_RATIO_MAX};
use crate::kernel::{GroupSignature, RepresentationParams};
use crate::quad::{zonal_integral, QuadratureSpec};
use crate::result::{EvalResult, MethodTag};
use crate::specfun::{gauss_2f1, POLE_TOL};

/// Auto dispatch uses Horn13 up to this value of th²α and quadrature beyond.
pub const AUTO_HORN_MAX_T: f64 = 0.9;

/// Distance from an exceptional σ below which the outer series switches to
/// its pole-free rearrangement.
pub const SERIES12_POLE_GUARD: f64 = 1e-6;

/// Settings shared by all routes.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalConfig {
    /// Relative tolerance of every series stopping rule.
    pub tol: f64,
    /// Cap on shells (Horn routes) and terms (series routes).
    pub max_shells: u64,
    pub quad: QuadratureSpec,
    /// Replacement for the Horn13 table, for fault injection.
    pub horn13_table: Option<HornTable>,
}

impl ZonalConfig {
    pub const DEFAULT_TOL: f64 = 1e-10;
    pub const DEFAULT_MAX_SHELLS: u64 = 20_000;

    /// Default caps and orders with the given tolerance for series and
    /// quadrature alike.
    pub fn with_tol(tol: f64) -> Result<Self> {
        Ok(Self {
            tol,
            max_shells: Self::DEFAULT_MAX_SHELLS,
            quad: QuadratureSpec::with_tol(tol)?,
            horn13_table: None,
        })
    }
}

impl Default for ZonalConfig {
    fn default() -> Self {
        Self::with_tol(Self::DEFAULT_TOL).expect("default tolerance is valid")
    }
}

fn t_of(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be finite, got {alpha}")));
    }
    let th = alpha.tanh();
    Ok(th * th)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tolerance must be positive, got {tol}")))
    }
}

fn tail_estimate(last: f64, prev: f64) -> f64 {
    let rho = if last == 0.0 {
        0.0
    } else if prev == 0.0 {
        TAIL_RATIO_MAX
    } else {
        (last / prev).clamp(0.0, TAIL_RATIO_MAX)
    };
    last / (1.0 - rho)
}

fn near_integer_in(z: Complex64, lo: i64, hi: i64) -> bool {
    let k = z.re.round();
    z.im.abs() <= SERIES12_POLE_GUARD
        && (z.re - k).abs() <= SERIES12_POLE_GUARD
        && (lo as f64..=hi as f64).contains(&k)
}

/// Outer series with terminating unit-argument ₃F₂ coefficients.
pub fn zonal_series12(sig: &GroupSignature, rep: &RepresentationParams, alpha: f64, tol: f64) -> Result<EvalResult> {
    let cfg = ZonalConfig::with_tol(tol)?;
    series12_with(sig, rep, alpha, &cfg)
}

fn series12_with(sig: &GroupSignature, rep: &RepresentationParams, alpha: f64, cfg: &ZonalConfig) -> Result<EvalResult> {
    rep.require_even()?;
    check_tol(cfg.tol)?;
    let t = t_of(alpha)?;
    let s = rep.sigma;
    let (hp, hq) = (f64::from(sig.p()) / 2.0, f64::from(sig.q()) / 2.0);
    let a1 = -s * 0.5;
    let a2 = 1.0 - (s + 2.0 * hq) * 0.5;
    let g = (s + 2.0 * hq) * 0.5;
    // The ₃F₂ denominators vanish when σ/2 ∈ {0, .., M-1} or
    // (σ+q)/2 ∈ {1, .., M}; the outer coefficient vanishes with them.
    let exceptional = near_integer_in(s * 0.5, 0, i64::MAX) || near_integer_in(g, 1, i64::MAX);

    let one = Complex64::new(1.0, 0.0);
    let mut coef = one; // outer coefficient times t^M
    let mut ratio_half = 1.0f64; // (½)_M / (q/2)_M · t^M for the rearrangement
    let mut left: Vec<Complex64> = vec![one]; // (a1)_m (a2)_m / ((p/2)_m m!)
    let mut right: Vec<Complex64> = vec![one]; // (g)_j / j!

    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    let mut prev_norm = 0.0;
    for m in 0..cfg.max_shells {
        let mf = m as f64;
        let term = if exceptional {
            let inner: Complex64 = (0..=m as usize).map(|i| left[i] * right[m as usize - i]).sum();
            inner * ratio_half
        } else {
            let mut inner = one;
            let mut tk = one;
            for k in 0..m {
                let kf = k as f64;
                let num = (kf - mf) * (1.0 - mf - hp + kf) * (g + kf);
                let den = (1.0 - mf + kf + s * 0.5) * (g - mf + kf) * (kf + 1.0);
                if den.norm() <= POLE_TOL {
                    return Err(Error::pole(format!("unit-argument coefficient at M = {m}")));
                }
                tk *= num / den;
                inner += tk;
            }
            coef * inner
        };
        sum += term;
        let n = term.norm();
        if n < cfg.tol * sum.norm().max(1.0) {
            small += 1;
            if small >= 3 {
                let err = tail_estimate(n, prev_norm);
                let r = EvalResult::new(sum, err, m + 1, MethodTag::Series12);
                return Ok(r.scaled(Complex64::new(1.0 / alpha.cosh(), 0.0), MethodTag::Series12));
            }
        } else {
            small = 0;
        }
        prev_norm = n;

        coef *= (a1 + mf) * (a2 + mf) * (0.5 + mf) / ((hp + mf) * (hq + mf) * (mf + 1.0)) * t;
        if exceptional {
            ratio_half *= (0.5 + mf) / (hq + mf) * t;
            let last = left[m as usize];
            left.push(last * (a1 + mf) * (a2 + mf) / ((hp + mf) * (mf + 1.0)));
            let last = right[m as usize];
            right.push(last * (g + mf) / (mf + 1.0));
        }
    }
    Err(Error::Convergence {
        what: format!("outer series at alpha = {alpha}"),
        work: cfg.max_shells,
    })
}

/// Which of the two Horn tables to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum HornForm {
    Form13,
    Form14,
}

impl HornForm {
    pub fn tag(self) -> MethodTag {
        match self {
            HornForm::Form13 => MethodTag::Horn13,
            HornForm::Form14 => MethodTag::Horn14,
        }
    }
}

/// Base `c0 + cσ·σ + cp·p + cq·q` of one Horn parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub c0: f64,
    pub c_sigma: f64,
    pub c_p: f64,
    pub c_q: f64,
}

impl Affine {
    const fn new(c0: f64, c_sigma: f64, c_p: f64, c_q: f64) -> Self {
        Self { c0, c_sigma, c_p, c_q }
    }

    pub fn eval(&self, sigma: Complex64, p: f64, q: f64) -> Complex64 {
        sigma * self.c_sigma + (self.c0 + self.c_p * p + self.c_q * q)
    }
}

/// One row entry of a Horn table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub numerator: bool,
    pub weights: [u32; 2],
    pub base: Affine,
    pub label: &'static str,
}

const fn entry(numerator: bool, weights: [u32; 2], base: Affine, label: &'static str) -> TableEntry {
    TableEntry { numerator, weights, base, label }
}

const FORM13: [TableEntry; 6] = [
    entry(true, [1, 0], Affine::new(0.0, -0.5, 0.0, 0.0), "-σ/2"),
    entry(true, [1, 0], Affine::new(1.0, -0.5, 0.0, -0.5), "1-(σ+q)/2"),
    entry(true, [0, 1], Affine::new(0.0, 0.5, 0.0, 0.5), "(σ+q)/2"),
    entry(true, [1, 1], Affine::new(0.5, 0.0, 0.0, 0.0), "1/2"),
    entry(false, [1, 1], Affine::new(0.0, 0.0, 0.0, 0.5), "q/2"),
    entry(false, [1, 0], Affine::new(0.0, 0.0, 0.5, 0.0), "p/2"),
];

const FORM14: [TableEntry; 6] = [
    entry(true, [1, 0], Affine::new(0.0, -0.5, 0.0, 0.0), "-σ/2"),
    entry(true, [1, 0], Affine::new(1.0, -0.5, -0.5, 0.0), "1-(σ+p)/2"),
    entry(true, [0, 1], Affine::new(0.0, 0.5, 0.5, 0.0), "(σ+p)/2"),
    entry(true, [1, 1], Affine::new(0.5, 0.0, 0.0, 0.0), "1/2"),
    entry(false, [1, 1], Affine::new(0.0, 0.0, 0.5, 0.0), "p/2"),
    entry(false, [1, 0], Affine::new(0.0, 0.0, 0.0, 0.5), "q/2"),
];

/// Parameter table of a Horn form; the zonal function is `(1/ch α)` times
/// the two-variable series at `(th²α, th²α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HornTable {
    pub entries: Vec<TableEntry>,
}

impl HornTable {
    pub fn of(form: HornForm) -> Self {
        let entries = match form {
            HornForm::Form13 => FORM13.to_vec(),
            HornForm::Form14 => FORM14.to_vec(),
        };
        Self { entries }
    }

    /// The table with `delta` added to the constant part of entry `index`.
    pub fn perturbed(mut self, index: usize, delta: f64) -> Result<Self> {
        let n = self.entries.len();
        let e = self
            .entries
            .get_mut(index)
            .ok_or_else(|| Error::domain(format!("table entry {index} out of range (0..{n})")))?;
        e.base.c0 += delta;
        Ok(self)
    }

    /// Instantiates the series; with `symbolic` the parameters carry their
    /// table labels for display.
    pub fn series(&self, sig: &GroupSignature, sigma: Complex64, symbolic: bool) -> Result<HornSeries> {
        let (p, q) = (f64::from(sig.p()), f64::from(sig.q()));
        let mut num = Vec::new();
        let mut den = Vec::new();
        for e in &self.entries {
            let mut par = HornParameter::new(e.base.eval(sigma, p, q), &e.weights)?;
            if symbolic {
                par = par.with_label(e.label);
            }
            if e.numerator {
                num.push(par);
            } else {
                den.push(par);
            }
        }
        HornSeries::new(2, num, den)
    }
}

/// Horn-series evaluation of the zonal function with the given table.
pub fn zonal_horn(
    form: HornForm,
    sig: &GroupSignature,
    rep: &RepresentationParams,
    alpha: f64,
    tol: f64,
) -> Result<EvalResult> {
    let cfg = ZonalConfig::with_tol(tol)?;
    horn_with(form, &HornTable::of(form), sig, rep, alpha, &cfg)
}

fn horn_with(
    form: HornForm,
    table: &HornTable,
    sig: &GroupSignature,
    rep: &RepresentationParams,
    alpha: f64,
    cfg: &ZonalConfig,
) -> Result<EvalResult> {
    rep.require_even()?;
    check_tol(cfg.tol)?;
    let t = Complex64::new(t_of(alpha)?, 0.0);
    let series = table.series(sig, rep.sigma, false)?;
    let r = horn_eval(&series, &[t, t], cfg.tol, cfg.max_shells)?;
    Ok(r.scaled(Complex64::new(1.0 / alpha.cosh(), 0.0), form.tag()))
}

/// `ch^σ α · ₂F₁(-σ/2, (1-σ)/2; p/2; th²α)`, the zonal function of SO(p, 1).
pub fn zonal_closed_q1(p: u32, sigma: Complex64, alpha: f64, tol: f64) -> Result<EvalResult> {
    if p < 2 {
        return Err(Error::domain(format!("closed form needs p >= 2, got {p}")));
    }
    let t = t_of(alpha)?;
    let r = gauss_2f1(
        -sigma * 0.5,
        (1.0 - sigma) * 0.5,
        Complex64::new(f64::from(p) / 2.0, 0.0),
        t,
        tol,
    )?;
    let pre = (sigma * alpha.cosh().ln()).exp();
    Ok(r.scaled(pre, MethodTag::ClosedQ1))
}

/// Evaluates by the requested route; `Auto` picks Horn13 while
/// th²α ≤ [`AUTO_HORN_MAX_T`] and quadrature otherwise.
pub fn zonal_eval(
    sig: &GroupSignature,
    rep: &RepresentationParams,
    alpha: f64,
    method: MethodTag,
    cfg: &ZonalConfig,
) -> Result<EvalResult> {
    rep.require_even()?;
    let method = match method {
        MethodTag::Auto if t_of(alpha)? <= AUTO_HORN_MAX_T => MethodTag::Horn13,
        MethodTag::Auto => MethodTag::Integral,
        m => m,
    };
    match method {
        MethodTag::Integral => zonal_integral(sig, rep, alpha, &cfg.quad),
        MethodTag::Series12 => series12_with(sig, rep, alpha, cfg),
        MethodTag::Horn13 => {
            let table = cfg
                .horn13_table
                .clone()
                .unwrap_or_else(|| HornTable::of(HornForm::Form13));
            horn_with(HornForm::Form13, &table, sig, rep, alpha, cfg)
        }
        MethodTag::Horn14 => horn_with(HornForm::Form14, &HornTable::of(HornForm::Form14), sig, rep, alpha, cfg),
        MethodTag::ClosedQ1 => {
            if sig.q() != 1 {
                return Err(Error::domain(format!(
                    "closed_q1 applies only to q = 1, got ({}, {})",
                    sig.p(),
                    sig.q()
                )));
            }
            zonal_closed_q1(sig.p(), rep.sigma, alpha, cfg.tol)
        }
        other => Err(Error::domain(format!("{other} is not a zonal evaluation route"))),
    }
}

/// Routes applicable to a signature.
pub fn applicable_methods(sig: &GroupSignature) -> Vec<MethodTag> {
    MethodTag::ZONAL
        .into_iter()
        .filter(|&m| m != MethodTag::ClosedQ1 || sig.q() == 1)
        .collect()
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_deviation(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Outcome of one route at one α.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub method: MethodTag,
    pub result: std::result::Result<EvalResult, Error>,
}

/// Deviation between two routes at one α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDeviation {
    pub a: MethodTag,
    pub b: MethodTag,
    pub abs: f64,
    pub rel: f64,
    pub pass: bool,
}

/// All checks at one α.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub alpha: f64,
    pub outcomes: Vec<MethodOutcome>,
    pub pairs: Vec<PairDeviation>,
    /// Relative deviation of the quadrature value at σ from the one at
    /// 2 - p - q - σ, when both converged.
    pub partner_rel: Option<f64>,
    pub partner_pass: bool,
    /// Largest |Im Z| over converged routes, reported on the principal line.
    pub max_imag: Option<f64>,
    pub imag_pass: bool,
}

impl AlphaReport {
    pub fn pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.is_ok())
            && self.pairs.iter().all(|d| d.pass)
            && self.partner_pass
            && self.imag_pass
    }
}

/// Cross-validation of every applicable route.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub p: u32,
    pub q: u32,
    pub sigma: Complex64,
    pub tol: f64,
    pub alphas: Vec<AlphaReport>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.alphas.iter().all(AlphaReport::pass)
    }

    pub fn max_rel_deviation(&self) -> f64 {
        self.alphas
            .iter()
            .flat_map(|a| a.pairs.iter().map(|d| d.rel))
            .fold(0.0, f64::max)
    }

    /// Routes involved in every failing comparison, or failing outright.
    /// Empty when nothing fails or the failures share no route.
    pub fn suspects(&self) -> Vec<MethodTag> {
        let mut failing_pairs = Vec::new();
        let mut errored = Vec::new();
        for a in &self.alphas {
            failing_pairs.extend(a.pairs.iter().filter(|d| !d.pass).map(|d| (d.a, d.b)));
            errored.extend(a.outcomes.iter().filter(|o| o.result.is_err()).map(|o| o.method));
        }
        let mut out: Vec<MethodTag> = MethodTag::ZONAL
            .into_iter()
            .filter(|m| {
                (!failing_pairs.is_empty() && failing_pairs.iter().all(|(a, b)| a == m || b == m))
                    || errored.contains(m)
            })
            .collect();
        out.dedup();
        out
    }
}

/// Evaluates every applicable route at every α and compares them pairwise.
/// Evaluations run in parallel; the report order is fixed.
pub fn verify_all(
    sig: &GroupSignature,
    rep: &RepresentationParams,
    alphas: &[f64],
    tol: f64,
    cfg: &ZonalConfig,
) -> Result<VerifyReport> {
    rep.require_even()?;
    check_tol(tol)?;
    let methods = applicable_methods(sig);
    let partner = rep.partner(sig);
    let principal = rep.is_principal(sig);

    // one job per (alpha, route), plus the partner quadrature per alpha
    let jobs: Vec<(usize, Option<MethodTag>)> = (0..alphas.len())
        .flat_map(|i| methods.iter().map(move |&m| (i, Some(m))).chain([(i, None)]))
        .collect();
    let results: Vec<std::result::Result<EvalResult, Error>> = jobs
        .par_iter()
        .map(|&(i, m)| match m {
            Some(m) => zonal_eval(sig, rep, alphas[i], m, cfg),
            None => zonal_eval(sig, &partner, alphas[i], MethodTag::Integral, cfg),
        })
        .collect();

    let per_alpha = methods.len() + 1;
    let reports = alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let chunk = &results[i * per_alpha..(i + 1) * per_alpha];
            let outcomes: Vec<MethodOutcome> = methods
                .iter()
                .zip(chunk)
                .map(|(&method, result)| MethodOutcome { method, result: result.clone() })
                .collect();
            let mut pairs = Vec::new();
            for (j, a) in outcomes.iter().enumerate() {
                for b in &outcomes[j + 1..] {
                    if let (Ok(ra), Ok(rb)) = (&a.result, &b.result) {
                        let rel = relative_deviation(ra.value, rb.value);
                        pairs.push(PairDeviation {
                            a: a.method,
                            b: b.method,
                            abs: (ra.value - rb.value).norm(),
                            rel,
                            pass: rel <= tol,
                        });
                    }
                }
            }
            let integral = outcomes
                .iter()
                .find(|o| o.method == MethodTag::Integral)
                .and_then(|o| o.result.as_ref().ok());
            let partner_rel = match (integral, &chunk[per_alpha - 1]) {
                (Some(z), Ok(w)) => Some(relative_deviation(z.value, w.value)),
                _ => None,
            };
            let partner_pass = partner_rel.is_some_and(|d| d <= tol);
            let max_imag = principal.then(|| {
                outcomes
                    .iter()
                    .filter_map(|o| o.result.as_ref().ok())
                    .map(|r| r.value.im.abs())
                    .fold(0.0, f64::max)
            });
            let imag_pass = max_imag.is_none_or(|m| m <= tol);
            AlphaReport { alpha, outcomes, pairs, partner_rel, partner_pass, max_imag, imag_pass }
        })
        .collect();

    let (p, q) = sig.original();
    Ok(VerifyReport { p, q, sigma: rep.sigma, tol, alphas: reports })
}
