//! Group signatures, representation labels and the positive kernel
//! Θ(α; x, y) whose complex powers are integrated to obtain zonal functions.
//!
//! With `x = cos χ` on the q-side sphere and `y = cos φ` on the p-side
//! sphere,
//!
//! ```text
//! Θ(α; x, y) = (y ch α - x sh α)² + (1 - y²)
//!            = 1 + (x² + y²) sh²α - 2xy sh α ch α
//! ```
//!
//! The kernel is symmetric under `x ↔ y`, which is what lets
//! [`GroupSignature`] store `p ≥ q` regardless of the order it was given in.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::result::{EvalResult, MethodTag};
use crate::specfun::pochhammer;

/// Tolerance of the principal-series predicate `Re σ = -(p+q-2)/2`.
pub const PRINCIPAL_TOL: f64 = 1e-12;

/// The pair (p, q) labelling SO(p, q), stored with `p ≥ q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSignature {
    p: u32,
    q: u32,
    swapped: bool,
}

impl GroupSignature {
    /// Builds a signature, swapping the arguments when `p < q`.
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::domain(format!(
                "signature entries must be positive, got ({p}, {q})"
            )));
        }
        if p + q < 3 {
            return Err(Error::domain(format!("p + q must be at least 3, got ({p}, {q})")));
        }
        Ok(if p < q {
            Self { p: q, q: p, swapped: true }
        } else {
            Self { p, q, swapped: false }
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Whether the constructor had to swap its arguments.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// The (p, q) pair in the order it was supplied.
    pub fn original(&self) -> (u32, u32) {
        if self.swapped {
            (self.q, self.p)
        } else {
            (self.p, self.q)
        }
    }

    /// `p + q - 2`, the dimension shift that fixes the principal line.
    pub fn rho_shift(&self) -> f64 {
        f64::from(self.p + self.q) - 2.0
    }
}

/// Label (σ, ε) of a most-degenerate representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepresentationParams {
    pub sigma: Complex64,
    eps: u8,
}

impl RepresentationParams {
    pub fn new(sigma: Complex64, eps: u8) -> Result<Self> {
        if eps > 1 {
            return Err(Error::domain(format!("eps must be 0 or 1, got {eps}")));
        }
        if !(sigma.re.is_finite() && sigma.im.is_finite()) {
            return Err(Error::domain(format!("sigma must be finite, got {sigma}")));
        }
        Ok(Self { sigma, eps })
    }

    /// Even-parity representation with the given σ.
    pub fn even(sigma: Complex64) -> Result<Self> {
        Self::new(sigma, 0)
    }

    pub fn eps(&self) -> u8 {
        self.eps
    }

    /// Zonal functions only exist for ε = 0.
    pub fn require_even(&self) -> Result<()> {
        if self.eps == 0 {
            Ok(())
        } else {
            Err(Error::EpsOdd)
        }
    }

    /// Whether σ lies on the unitary principal line of `sig`.
    pub fn is_principal(&self, sig: &GroupSignature) -> bool {
        (self.sigma.re + sig.rho_shift() / 2.0).abs() <= PRINCIPAL_TOL
    }

    /// The same representation with σ replaced by its partner.
    pub fn partner(&self, sig: &GroupSignature) -> Self {
        Self {
            sigma: partner_sigma(sig, self.sigma),
            eps: self.eps,
        }
    }
}

/// σ = -(p+q-2)/2 + iρ with ε = 0.
pub fn principal_sigma(sig: &GroupSignature, rho: f64) -> RepresentationParams {
    RepresentationParams {
        sigma: Complex64::new(-sig.rho_shift() / 2.0, rho),
        eps: 0,
    }
}

/// The equivalent label 2 - p - q - σ.
pub fn partner_sigma(sig: &GroupSignature, sigma: Complex64) -> Complex64 {
    Complex64::new(-sig.rho_shift(), 0.0) - sigma
}

/// A point `(x, y) = (cos χ, cos φ)` of the kernel domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x: f64,
    pub y: f64,
}

impl KernelPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.abs() <= 1.0 && y.abs() <= 1.0) {
            return Err(Error::domain(format!(
                "kernel point ({x}, {y}) outside [-1, 1]²"
            )));
        }
        Ok(Self { x, y })
    }

    /// The point with coordinates exchanged.
    pub fn transposed(self) -> Self {
        Self { x: self.y, y: self.x }
    }
}

/// Θ(α; x, y), evaluated as
///
/// ```text
/// [(1 - x²) + (1 - y²) + (x² + y²) e^{-2|α|}] / 2 + (x ∓ y)² sh|α| ch|α|
/// ```
///
/// (minus sign for α ≥ 0). Every term is non-negative, so the result keeps
/// full relative accuracy even where Θ approaches its minimum e^{-2|α|}, and
/// the arrangement is exactly symmetric in `x ↔ y`.
pub fn theta(alpha: f64, pt: KernelPoint) -> f64 {
    let KernelPoint { x, y } = pt;
    let a = alpha.abs();
    let diff = if alpha >= 0.0 { x - y } else { x + y };
    let one_minus = (1.0 - x) * (1.0 + x) + (1.0 - y) * (1.0 + y);
    let decay = (-2.0 * a).exp();
    0.5 * (one_minus + (x * x + y * y) * decay) + diff * diff * a.sinh() * a.cosh()
}

/// Θ in the printed sum-of-squares arrangement `(y ch α - x sh α)² + 1 - y²`.
pub fn theta_sum_of_squares(alpha: f64, pt: KernelPoint) -> f64 {
    let d = pt.y * alpha.cosh() - pt.x * alpha.sinh();
    d * d + (1.0 - pt.y * pt.y)
}

/// Θ in the expanded arrangement `1 + (x² + y²) sh²α - 2xy sh α ch α`.
pub fn theta_expanded(alpha: f64, pt: KernelPoint) -> f64 {
    let (s, c) = (alpha.sinh(), alpha.cosh());
    1.0 + (pt.x * pt.x + pt.y * pt.y) * s * s - 2.0 * pt.x * pt.y * s * c
}

/// Principal complex power Θ^{σ/2} of the (strictly positive) kernel.
pub fn theta_power(alpha: f64, pt: KernelPoint, sigma: Complex64) -> Complex64 {
    (sigma * (0.5 * theta(alpha, pt).ln())).exp()
}

/// One branch of the kernel expansion
///
/// ```text
/// Θ^{σ/2} = (1/ch α) Σ_{ν=0}^{1} (-σ xy th α)^ν Σ_{l≥0} (ν+½)_l / l! · th^{2l}α
///           · F(ν - σ/2; -l, -l; ν+½, ν+½; x², y²),
/// F(a; -l, -l; c, c; X, Y) = Σ_{m,n=0}^{l} (a)_{m+n} (-l)_m (-l)_n X^m Y^n
///                            / ((c)_m (c)_n m! n!)
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionBranch {
    /// ν, the power of `-σ xy th α`.
    pub nu: u32,
    /// Added to `-σ/2` to form the leading parameter of F.
    pub sigma_shift: f64,
    /// Shared lower parameter of F and base of the shell weight.
    pub lower: f64,
}

/// The two branches of the expansion; terms with ν ≥ 2 vanish identically.
pub const EXPANSION_BRANCHES: [ExpansionBranch; 2] = [
    ExpansionBranch { nu: 0, sigma_shift: 0.0, lower: 0.5 },
    ExpansionBranch { nu: 1, sigma_shift: 1.0, lower: 1.5 },
];

/// Shell `l` of the kernel expansion (both branches, including the 1/ch α
/// prefactor) computed term by term from [`EXPANSION_BRANCHES`].
///
/// The inner double sum alternates in sign and its terms grow roughly like
/// 4^l, so this is only usable in floating point for small `l`; it exists to
/// pin the coefficient table. [`theta_power_partial`] uses the equivalent
/// power-series recurrence instead.
pub fn expansion_shell_direct(alpha: f64, pt: KernelPoint, sigma: Complex64, l: u32) -> Complex64 {
    let t = alpha.tanh();
    let (x2, y2) = (pt.x * pt.x, pt.y * pt.y);
    let mut shell = Complex64::new(0.0, 0.0);
    for br in EXPANSION_BRANCHES {
        let lead = Complex64::new(br.sigma_shift, 0.0) - sigma * 0.5;
        let lower = Complex64::new(br.lower, 0.0);
        let poch_lead: Vec<Complex64> = (0..=2 * l as u64).map(|k| pochhammer(lead, k)).collect();
        let side = |v: f64| -> Vec<Complex64> {
            (0..=l as u64)
                .map(|m| {
                    pochhammer(Complex64::new(-f64::from(l), 0.0), m) * v.powi(m as i32)
                        / (pochhammer(lower, m) * factorial(m))
                })
                .collect()
        };
        let (xs, ys) = (side(x2), side(y2));
        let mut inner = Complex64::new(0.0, 0.0);
        for (m, xm) in xs.iter().enumerate() {
            for (n, yn) in ys.iter().enumerate() {
                inner += poch_lead[m + n] * xm * yn;
            }
        }
        let weight = pochhammer(lower, l as u64) / factorial(l as u64) * t.powi(2 * l as i32);
        let pre = (-sigma * (pt.x * pt.y * t)).powu(br.nu);
        shell += pre * weight * inner;
    }
    shell / alpha.cosh()
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Shell values `s_0, ..., s_{shells}` of the kernel expansion.
///
/// The expansion is the Taylor series in t = th α of
/// `(1 - t²)^{-(1+σ)/2} (1 - 2xy t + (x²+y²-1) t²)^{σ/2}`, scaled by 1/ch α;
/// shell `l` collects the powers t^{2l} (ν = 0) and t^{2l+1} (ν = 1). The
/// quadratic factor's coefficients obey a two-term recurrence, which keeps
/// every shell at working precision.
pub fn expansion_shells(alpha: f64, pt: KernelPoint, sigma: Complex64, shells: u32) -> Vec<Complex64> {
    let len = 2 * shells as usize + 2;
    let t = alpha.tanh();
    let lambda = sigma * 0.5;
    let b = -2.0 * pt.x * pt.y;
    let c = pt.x * pt.x + pt.y * pt.y - 1.0;

    // Q(t)^λ with Q = 1 + b t + c t²:
    // (k+1) h_{k+1} = (λ - k) b h_k + (2λ - k + 1) c h_{k-1}
    let mut h = vec![Complex64::new(0.0, 0.0); len];
    h[0] = Complex64::new(1.0, 0.0);
    for k in 0..len - 1 {
        let kf = k as f64;
        let prev = if k >= 1 { h[k - 1] } else { Complex64::new(0.0, 0.0) };
        h[k + 1] = ((lambda - kf) * b * h[k] + (2.0 * lambda - kf + 1.0) * c * prev) / (kf + 1.0);
    }
    // (1 - t²)^{-(1+σ)/2}: coefficient of t^{2i} is ((1+σ)/2)_i / i!
    let up = (sigma + 1.0) * 0.5;
    let mut e = vec![Complex64::new(0.0, 0.0); len / 2 + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for i in 1..e.len() {
        e[i] = e[i - 1] * (up + (i - 1) as f64) / i as f64;
    }
    let coef = |k: usize| -> Complex64 { (0..=k / 2).map(|i| e[i] * h[k - 2 * i]).sum() };

    let inv_ch = 1.0 / alpha.cosh();
    (0..=shells as usize)
        .map(|l| {
            let t2l = t.powi(2 * l as i32);
            (coef(2 * l) + coef(2 * l + 1) * t) * t2l * inv_ch
        })
        .collect()
}

/// Partial sum of the kernel expansion through shell `shells`; converges to
/// Θ^{σ/2} as `shells → ∞`.
pub fn theta_power_partial(alpha: f64, pt: KernelPoint, sigma: Complex64, shells: u32) -> Complex64 {
    expansion_shells(alpha, pt, sigma, shells).into_iter().sum()
}

/// Sums the kernel expansion until three consecutive shells fall below
/// `tol·max(1, |sum|)`.
pub fn theta_power_series(
    alpha: f64,
    pt: KernelPoint,
    sigma: Complex64,
    tol: f64,
    max_shells: u32,
) -> Result<EvalResult> {
    let shells = expansion_shells(alpha, pt, sigma, max_shells);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    for (l, s) in shells.iter().enumerate() {
        sum += s;
        if s.norm() < tol * sum.norm().max(1.0) {
            small += 1;
            if small == 3 {
                return Ok(EvalResult::new(sum, s.norm(), l as u64 + 1, MethodTag::HornSeries));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence {
        what: format!("kernel expansion at alpha = {alpha}"),
        work: u64::from(max_shells) + 1,
    })
}
