//! The alternating Hurwitz zeta function `ζ_E(s, x) = Σ_{n≥0} (−1)^n (n+x)^{−s}`
//! and the constants derived from it.
//!
//! Regimes:
//! - `series`: Cohen–Rodriguez Villegas–Zagier acceleration of the defining
//!   alternating series (`Re s > 0`), after direct summation of the terms
//!   with `Re(x + k) < 1`.
//! - `boole`: direct summation up to `a = x + N` followed by the Boole
//!   summation tail `½ Σ_j E_j(0)/j! · (d/da)^j a^{−s}`; valid for every `s`.
//! - `fourier`: the odd Fourier expansion in `x ∈ (0, 1]` for `Re s < 1`,
//!   with each lacunary sum accelerated by an Abel-summed asymptotic tail.
//! - `negint`: `ζ_E(−m, x) = E_m(x)/2`.
//!
//! `auto` picks `negint`, then `series` for `Re s ≥ 1/2`, else `boole`.
//! Powers use the principal branch throughout.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::Zero;

use crate::convolution::{convolve_at, QuadratureConfig};
use crate::error::{argument, domain, Error, Result};
use crate::euler::{euler_poly, EULER_DEGREE_CAP};
use crate::function::{BivariateFn, DomainNote, Exclusion};
use crate::invariance::check_odd;
use crate::scalar::{float_integer, rational_to_f64, Scalar};
use crate::special::gamma;

/// Evaluation strategy for [`zeta_e`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Series,
    Fourier,
    NegInt,
    Boole,
    Auto,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Series => "series",
            Regime::Fourier => "fourier",
            Regime::NegInt => "negint",
            Regime::Boole => "boole",
            Regime::Auto => "auto",
        })
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Regime::Series),
            "fourier" => Ok(Regime::Fourier),
            "negint" => Ok(Regime::NegInt),
            "boole" => Ok(Regime::Boole),
            "auto" => Ok(Regime::Auto),
            _ => Err(argument(format!("unknown regime {s:?}"))),
        }
    }
}

/// Inputs of [`zeta_e`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaParams {
    pub s: Complex64,
    pub x: Complex64,
    pub regime: Regime,
    pub tol: f64,
}

impl ZetaParams {
    pub fn new(s: Complex64, x: Complex64) -> Self {
        ZetaParams {
            s,
            x,
            regime: Regime::Auto,
            tol: 1e-14,
        }
    }

    pub fn real(s: f64, x: f64) -> Self {
        Self::new(Complex64::new(s, 0.0), Complex64::new(x, 0.0))
    }

    pub fn with_regime(mut self, regime: Regime) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Value with the regime actually used and an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZetaValue {
    pub value: Complex64,
    pub regime: Regime,
    pub est_error: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `b^{−s}` on the principal branch.
fn pow_neg(b: Complex64, s: Complex64) -> Complex64 {
    if b.im == 0.0 && b.re > 0.0 && s.im == 0.0 {
        c(b.re.powf(-s.re))
    } else {
        (-s * b.ln()).exp()
    }
}

fn nonpositive_integer(x: Complex64) -> Option<i64> {
    if x.im != 0.0 {
        return None;
    }
    float_integer(x.re).filter(|k| *k <= 0)
}

fn negint_index(s: Complex64) -> Option<usize> {
    if s.im.abs() > 1e-12 {
        return None;
    }
    float_integer(s.re)
        .filter(|k| *k <= 0)
        .map(|k| (-k) as usize)
}

/// `ζ_E(s, x)` in the requested regime.
pub fn zeta_e(p: &ZetaParams) -> Result<ZetaValue> {
    if !(p.tol > 0.0) {
        return Err(argument("tolerance must be positive"));
    }
    if !(p.s.re.is_finite() && p.s.im.is_finite() && p.x.re.is_finite() && p.x.im.is_finite()) {
        return Err(argument("non-finite zeta argument"));
    }
    if let Some(k) = nonpositive_integer(p.x) {
        return Err(domain(format!("zeta_E undefined at x = {k}")));
    }
    let regime = match p.regime {
        Regime::Auto => {
            if negint_index(p.s).is_some_and(|m| m <= EULER_DEGREE_CAP) {
                Regime::NegInt
            } else if p.s.re >= 0.5 && p.x.im.abs() <= 1.0 {
                Regime::Series
            } else {
                Regime::Boole
            }
        }
        r => r,
    };
    let (value, est_error) = match regime {
        Regime::Series => series(p.s, p.x, p.tol)?,
        Regime::Boole => boole(p.s, p.x, p.tol)?,
        Regime::Fourier => fourier(p.s, p.x, p.tol)?,
        Regime::NegInt => negint(p.s, p.x)?,
        Regime::Auto => unreachable!("auto resolved above"),
    };
    Ok(ZetaValue {
        value,
        regime,
        est_error,
    })
}

/// `ζ_E(s, x)` with automatic regime at tolerance `1e−14`.
pub fn zeta_value(s: Complex64, x: Complex64) -> Result<Complex64> {
    Ok(zeta_e(&ZetaParams::new(s, x))?.value)
}

fn negint(s: Complex64, x: Complex64) -> Result<(Complex64, f64)> {
    let m = negint_index(s).ok_or_else(|| {
        Error::Regime(format!("negint regime needs a nonpositive integer s, got {s}"))
    })?;
    let poly = euler_poly(m)?;
    let v = poly.eval_complex(x) * 0.5;
    let scale: f64 = poly
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, q)| rational_to_f64(q).abs() * x.norm().powi(k as i32))
        .sum();
    Ok((v, 4.0 * f64::EPSILON * scale))
}

/// `Σ_{k<count} (−1)^k (x+k)^{−s}`.
fn head_sum(s: Complex64, x: Complex64, count: usize) -> Result<Complex64> {
    let mut acc = Complex64::zero();
    for k in 0..count {
        let b = x + k as f64;
        if b.norm() == 0.0 {
            return Err(domain("zeta_E hit a zero base"));
        }
        let t = pow_neg(b, s);
        if k % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    Ok(acc)
}

fn digits_for(tol: f64) -> f64 {
    (-tol.log10()).clamp(1.0, 17.0)
}

fn series(s: Complex64, x: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    if s.re <= 0.0 {
        return Err(Error::Regime(format!("series regime needs Re(s) > 0, got {s}")));
    }
    let k0 = (1.0 - x.re).ceil().max(0.0) as usize;
    let head = head_sum(s, x, k0)?;
    let a = x + k0 as f64;
    let growth = (0.5 * PI * (s.im.abs() + a.im.abs())).exp();
    let n = (1.31 * digits_for(tol) + (growth.ln() / (3.0 + 8f64.sqrt()).ln())).ceil() as usize + 2;
    let tail = cvz(n, |k| pow_neg(a + k as f64, s));
    let sign = if k0.is_multiple_of(2) { 1.0 } else { -1.0 };
    let bound = 2.0 * pow_neg(a, s).norm() * growth * (3.0 + 8f64.sqrt()).powi(-(n as i32));
    Ok((head + tail * sign, bound + 8.0 * f64::EPSILON * head.norm().max(tail.norm())))
}

/// `Σ_{k≥0} (−1)^k a_k` by the Cohen–Rodriguez Villegas–Zagier scheme.
fn cvz<F: Fn(usize) -> Complex64>(n: usize, a: F) -> Complex64 {
    let mut d = (3.0 + 8f64.sqrt()).powi(n as i32);
    d = (d + 1.0 / d) / 2.0;
    let mut b = -1.0;
    let mut cc = -d;
    let mut sum = Complex64::zero();
    for k in 0..n {
        cc = b - cc;
        sum += a(k) * cc;
        let kf = k as f64;
        let nf = n as f64;
        b = (kf + nf) * (kf - nf) * b / ((kf + 0.5) * (kf + 1.0));
    }
    sum / d
}

/// `E_j(0)/j!` for `j ≤ 80`.
fn boole_coeffs() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut fact = num_rational::BigRational::from_integer(1.into());
        (0..=EULER_DEGREE_CAP)
            .map(|j| {
                if j > 0 {
                    fact *= num_rational::BigRational::from_integer((j as i64).into());
                }
                let e0 = euler_poly(j).expect("within cap").coeff(0);
                rational_to_f64(&(e0 / &fact))
            })
            .collect()
    })
}

fn boole(s: Complex64, x: Complex64, _tol: f64) -> Result<(Complex64, f64)> {
    let target = 12.0 + s.norm() + x.im.abs();
    let n = (target - x.re).ceil().max(0.0) as usize;
    let head = head_sum(s, x, n)?;
    let a = x + n as f64;
    let coeffs = boole_coeffs();
    let mut power = pow_neg(a, s);
    let inv_a = a.inv();
    let mut falling = c(1.0);
    let mut tail = Complex64::zero();
    let mut last = f64::INFINITY;
    let mut est = f64::INFINITY;
    for (j, e) in coeffs.iter().enumerate() {
        if j > 0 {
            falling *= -s - (j - 1) as f64;
            power *= inv_a;
        }
        if *e == 0.0 {
            continue;
        }
        let term = power * falling * (0.5 * e);
        let mag = term.norm();
        if mag > last && j > 4 {
            // asymptotic series: stop at the smallest term
            break;
        }
        tail += term;
        est = mag;
        last = mag;
        if mag <= 1e-3 * f64::EPSILON * tail.norm() && j > 4 {
            break;
        }
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let rounding = 8.0 * f64::EPSILON * (head.norm() + tail.norm()) * (n as f64 + 1.0).sqrt();
    Ok((head + tail * sign, est + rounding))
}

/// Largest head length accepted by the Fourier regime.
pub const FOURIER_MAX_TERMS: usize = 2_000_000;

fn fourier(s: Complex64, x: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    if s.re >= 1.0 {
        return Err(Error::Regime(format!("fourier regime needs Re(s) < 1, got {s}")));
    }
    if x.im != 0.0 {
        return Err(Error::Regime("fourier regime needs real x".into()));
    }
    // reduce x into (0, 1]
    let xr = x.re;
    let shift = xr.ceil() - 1.0;
    let mut x0 = xr - shift;
    if x0 <= 0.0 {
        x0 += 1.0;
    }
    let shift = (xr - x0).round() as i64;
    let (mut pre, sign) = (Complex64::zero(), if shift % 2 == 0 { 1.0 } else { -1.0 });
    if shift > 0 {
        for j in 0..shift {
            let t = pow_neg(c(x0 + j as f64), s);
            pre += if (shift - 1 - j) % 2 == 0 { t } else { -t };
        }
    } else {
        for j in 1..=(-shift) {
            let t = pow_neg(c(x0 - j as f64), s);
            pre += if (-shift - j) % 2 == 0 { t } else { -t };
        }
    }
    let (core, est) = fourier_unit(s, x0, tol)?;
    Ok((pre + core * sign, est + 4.0 * f64::EPSILON * pre.norm()))
}

/// The Fourier expansion for `x ∈ (0, 1]`.
fn fourier_unit(s: Complex64, x: f64, tol: f64) -> Result<(Complex64, f64)> {
    let sigma = c(1.0) - s;
    let pref = 2.0 * gamma(sigma) * pow_neg(c(PI), sigma);
    let sin_t = (s * (PI / 2.0)).sin();
    let cos_t = (s * (PI / 2.0)).cos();
    if x == 1.0 {
        if s == Complex64::zero() {
            return Ok((c(0.5), f64::EPSILON));
        }
        // Σ cos((2m+1)π)(2m+1)^{−σ} = −λ(σ), λ = (1−2^{−σ})/(1−2^{1−σ})·η(σ)
        let denom = c(1.0) - pow_neg(c(2.0), sigma - 1.0);
        if denom.norm() < 1e-300 {
            return Err(Error::Convergence(format!("fourier regime degenerate at s = {s}, x = 1")));
        }
        let eta_sigma = series(sigma, c(1.0), tol * 1e-2)?;
        let lambda = (c(1.0) - pow_neg(c(2.0), sigma)) / denom * eta_sigma.0;
        let v = pref * sin_t * (-lambda);
        return Ok((v, (pref * sin_t).norm() * eta_sigma.1 * 2.0 + 16.0 * f64::EPSILON * v.norm()));
    }
    let d = x.min(1.0 - x);
    let jmax = 40usize;
    let m_needed = 2.0 * (sigma.norm() + 30.0) / (PI * d) + 8.0;
    if !(m_needed < FOURIER_MAX_TERMS as f64) {
        return Err(Error::Convergence(format!(
            "fourier regime needs more than {FOURIER_MAX_TERMS} terms at x = {x}"
        )));
    }
    let m_head = m_needed.ceil() as usize;
    // P = Σ g(m) e^{i(2m+1)πx}, Q = Σ g(m) e^{−i(2m+1)πx}, g(m) = (2m+1)^{−σ}
    let mut p = Complex64::zero();
    let mut q = Complex64::zero();
    for m in 0..m_head {
        let k = (2 * m + 1) as f64;
        let g = pow_neg(c(k), sigma);
        let phase = ((k * x) % 2.0) * PI;
        let (sn, cs) = phase.sin_cos();
        p += g * Complex64::new(cs, sn);
        q += g * Complex64::new(cs, -sn);
    }
    let (tp, ep) = abel_tail(sigma, x, m_head, 1.0, jmax);
    let (tq, eq) = abel_tail(sigma, x, m_head, -1.0, jmax);
    p += tp;
    q += tq;
    let cc = (p + q) * 0.5;
    let ss = (p - q) / Complex64::new(0.0, 2.0);
    let v = pref * (sin_t * cc + cos_t * ss);
    let scale = pref.norm() * (sin_t.norm() + cos_t.norm());
    let rounding = 16.0 * f64::EPSILON * scale * (m_head as f64).sqrt() * (p.norm() + q.norm() + 1.0);
    let est = scale * (ep + eq) + rounding;
    if !(est <= tol.max(1e-6)) {
        return Err(Error::Convergence(format!(
            "fourier regime error estimate {est:e} above tolerance at s = {s}, x = {x}"
        )));
    }
    Ok((v, est))
}

/// Abel sum of `Σ_{m≥M} g(m) e^{±i(2m+1)πx}` via
/// `z w^M Σ_j (Li_{−j}(w)/j!) g^{(j)}(M)`, `w = e^{±2πix}`.
fn abel_tail(sigma: Complex64, x: f64, m0: usize, dir: f64, jmax: usize) -> (Complex64, f64) {
    let phase_w = dir * 2.0 * PI * x;
    let w = Complex64::new(phase_w.cos(), phase_w.sin());
    let k = (2 * m0 + 1) as f64;
    let lead_phase = dir * ((k * x) % 2.0) * PI;
    let lead = Complex64::new(lead_phase.cos(), lead_phase.sin()); // z·w^M
    let ratio = w / (c(1.0) - w);
    // d_j = Li_{−j}(w)/j!, d_j = w/(1−w) Σ_{i<j} d_i/(j−i)!
    let mut d: Vec<Complex64> = vec![(c(1.0) - w).inv()];
    let mut inv_fact = vec![1.0f64];
    for j in 1..=jmax {
        inv_fact.push(inv_fact[j - 1] / j as f64);
    }
    let mut deriv = pow_neg(c(k), sigma); // g^{(j)}(M)
    let mut sum = d[0] * deriv;
    let mut last = sum.norm();
    let mut est = last;
    for j in 1..=jmax {
        let acc: Complex64 = (0..j).map(|i| d[i] * inv_fact[j - i]).sum();
        d.push(ratio * acc);
        deriv = deriv * 2.0 * (-sigma - (j - 1) as f64) / k;
        let term = d[j] * deriv;
        let mag = term.norm();
        if mag > last && j > 3 {
            break;
        }
        sum += term;
        est = mag;
        last = mag;
        if mag < 1e-18 * sum.norm() {
            break;
        }
    }
    (lead * sum, est)
}

/// `η(s) = ζ_E(s, 1)`.
pub fn eta(s: Complex64) -> Result<Complex64> {
    zeta_value(s, c(1.0))
}

/// `|n^{−s} Σ_{j<n} (−1)^j ζ_E(s, x + j/n) − ζ_E(s, nx)|` in one regime.
pub fn zeta_distribution_residual_in(s: Complex64, x: f64, n: i64, regime: Regime, tol: f64) -> Result<f64> {
    let n = check_odd(n, "n")? as i64;
    let eval = |xx: f64| zeta_e(&ZetaParams::new(s, c(xx)).with_regime(regime).with_tol(tol));
    let mut sum = Complex64::zero();
    for j in 0..n {
        let v = eval(x + j as f64 / n as f64)?.value;
        if j % 2 == 0 {
            sum += v;
        } else {
            sum -= v;
        }
    }
    let lhs = pow_neg(c(n as f64), s) * sum;
    let rhs = eval(n as f64 * x)?.value;
    Ok((lhs - rhs).norm())
}

/// Distribution-formula residual with automatic regime.
pub fn zeta_distribution_residual(s: Complex64, x: f64, n: i64, tol: f64) -> Result<f64> {
    zeta_distribution_residual_in(s, x, n, Regime::Auto, tol)
}

/// `|ζ_E(s, x+1) + ζ_E(s, x) − x^{−s}|`.
pub fn zeta_difference_residual(s: Complex64, x: f64, regime: Regime, tol: f64) -> Result<f64> {
    let p = |xx: f64| ZetaParams::new(s, c(xx)).with_regime(regime).with_tol(tol);
    let a = zeta_e(&p(x + 1.0))?.value;
    let b = zeta_e(&p(x))?.value;
    Ok((a + b - pow_neg(c(x), s)).norm())
}

/// `γ̃_k(x)` with the spread of the Richardson ladder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StieltjesTilde {
    pub k: u32,
    pub x: f64,
    pub value: f64,
    /// Difference between the two once-extrapolated estimates.
    pub spread: f64,
}

/// Steps of the finite-difference ladder in `s`.
pub const STIELTJES_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// `γ̃_k(x) = (−1)^k ∂_s^k ζ_E(s, x)|_{s=1}` for `k ≤ 3`.
pub fn stieltjes_tilde(k: u32, x: f64, tol: f64) -> Result<StieltjesTilde> {
    if k > 3 {
        return Err(argument(format!("stieltjes_tilde supports k ≤ 3, got {k}")));
    }
    let f = |s: f64| -> Result<f64> {
        Ok(zeta_e(&ZetaParams::real(s, x).with_tol(tol.min(1e-14)))?.value.re)
    };
    if k == 0 {
        return Ok(StieltjesTilde {
            k,
            x,
            value: f(1.0)?,
            spread: 0.0,
        });
    }
    let diff = |h: f64| -> Result<f64> {
        Ok(match k {
            1 => (f(1.0 + h)? - f(1.0 - h)?) / (2.0 * h),
            2 => (f(1.0 + h)? - 2.0 * f(1.0)? + f(1.0 - h)?) / (h * h),
            _ => (f(1.0 + 2.0 * h)? - 2.0 * f(1.0 + h)? + 2.0 * f(1.0 - h)? - f(1.0 - 2.0 * h)?) / (2.0 * h * h * h),
        })
    };
    let d: Vec<f64> = STIELTJES_STEPS.iter().map(|&h| diff(h)).collect::<Result<_>>()?;
    let r1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0];
    let value = (16.0 * r1[1] - r1[0]) / 15.0;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(StieltjesTilde {
        k,
        x,
        value: sign * value,
        spread: (r1[1] - r1[0]).abs(),
    })
}

/// `ψ̃(x) = −ζ_E(1, x)`.
pub fn digamma_tilde(x: f64, tol: f64) -> Result<f64> {
    Ok(-zeta_e(&ZetaParams::real(1.0, x).with_tol(tol))?.value.re)
}

fn fmt_param(s: Complex64) -> String {
    if s.im == 0.0 {
        format!("{}", s.re)
    } else {
        format!("{}{:+}i", s.re, s.im)
    }
}

/// `(x, y) ↦ y^{−s} ζ_E(s, x/y)`, undefined for `x/y ∈ ℤ≤0`, with
/// analytic derivative `−s·y^{−s−1} ζ_E(s+1, x/y)`.
pub fn zeta_invfn(s: Complex64) -> BivariateFn {
    BivariateFn::new(format!("zeta:{}", fmt_param(s)), move |x, y| {
        let u = x.div(y);
        if u.nearest_integer().is_some_and(|k| k <= 0) {
            return Err(domain(format!("zeta:{}: x/y = {u} is a nonpositive integer", fmt_param(s))));
        }
        let z = zeta_e(&ZetaParams::new(s, c(u.to_f64())))?.value;
        Ok(pow_neg(c(y.to_f64()), s) * z)
    })
    .with_note(DomainNote::lattice(Exclusion::AtMost(0)))
    .with_derivative(move || zeta_invfn(s + 1.0).scaled(-s))
}

/// `|(g∗h)(x,y) − y^{α+β−1}ζ_E(1−α−β, x/y)/Γ(α+β)|` with
/// `g = y^{α−1}ζ_E(1−α, x/y)/Γ(α)` and `h` likewise in `β`.
pub fn zeta_convolution_identity_residual(alpha: f64, beta: f64, x: f64, y: f64, tol: f64) -> Result<f64> {
    if !(alpha > 1.0 && beta > 1.0) {
        return Err(argument("alpha and beta must exceed 1"));
    }
    if !(y > 0.0) {
        return Err(argument("y must be positive"));
    }
    let g = zeta_invfn(c(1.0 - alpha)).scaled(gamma(c(alpha)).inv());
    let h = zeta_invfn(c(1.0 - beta)).scaled(gamma(c(beta)).inv());
    let cfg = QuadratureConfig {
        abs_tol: tol.min(1e-10),
        ..QuadratureConfig::default()
    };
    let lhs = convolve_at(&g, &h, &Scalar::Float(x), &Scalar::Float(y), &cfg)?.value;
    let rhs = zeta_invfn(c(1.0 - alpha - beta)).eval_f64(x, y)? / gamma(c(alpha + beta));
    Ok((lhs - rhs).norm())
}

/// `ζ_E(1, 1) = log 2`.
pub const ZETA_E_1_1: f64 = LN_2;
