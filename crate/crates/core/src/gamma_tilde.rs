//! `Γ̃(x)`, the Gamma-type function attached to `ζ_E`, from its product
//!
//! `Γ̃(x) = (1/x) e^{x log 2} Π_{k≥1} ((1 + x/k) e^{−x/k})^{(−1)^{k+1}}`.
//!
//! The alternating product only converges in its natural order, so factors
//! are grouped in pairs `(2j−1, 2j)`. Each pair collapses to
//! `log(1 + x/((2j−1)(2j+x))) − x/((2j−1)·2j)`, which is `O(x²/j³)`, and
//! for `2J + 1 > 2|x|` the tail after `J` pairs is bounded by
//! `(x²/4 + |x|³/3) / (2J−1)²`. That bound picks `J` and is reported as the
//! error estimate.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{argument, domain, Error, Result};
use crate::function::{BivariateFn, DomainNote, Exclusion};
use crate::invariance::check_odd;
use crate::scalar::{float_integer, Scalar};

/// `log|Γ̃(x)|` with sign and truncation data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaTildeValue {
    pub x: f64,
    pub log_abs: f64,
    pub sign: i8,
    /// Number of product factors used (twice the number of pairs).
    pub truncation_terms: u64,
    pub est_error: f64,
}

impl GammaTildeValue {
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_abs.exp()
    }
}

/// Largest number of pairs the product may use.
pub const MAX_PAIRS: u64 = 200_000_000;

/// Tail bound after `pairs` pairs; valid once `2·pairs + 1 > 2|x|`.
pub fn pair_tail_bound(x: f64, pairs: u64) -> f64 {
    bound_for_odd(x.abs(), 2.0 * pairs as f64 - 1.0)
}

/// Number of pairs for a given tolerance.
///
/// Pair counts lie on a ladder `m_k = 2J_k − 1 ≥ A·√2^k − c`. The rung `k`
/// is fixed by a power-of-two comparison, so halving `tol` moves exactly one
/// rung, and the `− c` offset makes each rung shrink the `1/m²` tail by
/// slightly more than 2.
fn pairs_for(x: f64, tol: f64) -> u64 {
    let a = x.abs();
    let c = 2.0 * a + 12.0;
    let big_a = 4.0 * c;
    let floor = 2.0 * a + 3.0;
    let rung = |k: i32| big_a * std::f64::consts::SQRT_2.powi(k) - c;
    let mut k_min = 0i32;
    while rung(k_min - 1) >= floor {
        k_min -= 1;
    }
    // B(m_k) ≤ b_ref·2^{−k} for every k ≥ k_min
    let b_ref = bound_for_odd(a, big_a - c / std::f64::consts::SQRT_2.powi(k_min));
    let mut k = k_min;
    let mut scale = 2f64.powi(k_min);
    while b_ref > tol * scale && k < 400 {
        scale *= 2.0;
        k += 1;
    }
    let m = odd_ceil(rung(k));
    ((m + 1.0) / 2.0).min(u64::MAX as f64) as u64
}

fn odd_ceil(t: f64) -> f64 {
    let m = t.ceil();
    if m % 2.0 == 0.0 {
        m + 1.0
    } else {
        m
    }
}

fn bound_for_odd(a: f64, m: f64) -> f64 {
    (0.25 * a * a + a * a * a / 3.0) / (m * m)
}

/// `log|Γ̃(x)|` to within `tol` (product truncation bound).
pub fn log_gamma_tilde(x: f64, tol: f64) -> Result<GammaTildeValue> {
    if !(tol > 0.0) {
        return Err(argument("tolerance must be positive"));
    }
    if !x.is_finite() {
        return Err(argument("non-finite argument"));
    }
    if float_integer(x).is_some_and(|k| k <= 0) {
        return Err(domain(format!("Γ̃ has a pole at x = {x}")));
    }
    let pairs = pairs_for(x, tol);
    if pairs > MAX_PAIRS {
        return Err(Error::Convergence(format!(
            "Γ̃ product needs {pairs} pairs at x = {x}, tol = {tol:e}"
        )));
    }
    // Neumaier-compensated sum of the paired terms.
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut add = |v: f64| {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    };
    for j in 1..=pairs {
        let a = (2 * j - 1) as f64;
        let b = (2 * j) as f64;
        let delta = x / (a * (b + x));
        let l = if delta > -0.5 {
            delta.ln_1p()
        } else {
            (1.0 + delta).abs().ln()
        };
        add(l - x / (a * b));
    }
    let series = sum + comp;
    let log_abs = -x.abs().ln() + x * std::f64::consts::LN_2 + series;
    // one negative factor from 1/x, plus one for each k < −x
    let mut negatives = if x < 0.0 { 1 } else { 0 };
    if x < -1.0 {
        negatives += (-x).ceil() as i64 - 1;
    }
    let sign = if negatives % 2 == 0 { 1 } else { -1 };
    let rounding = 4.0 * f64::EPSILON * (log_abs.abs() + series.abs() + 1.0);
    Ok(GammaTildeValue {
        x,
        log_abs,
        sign,
        truncation_terms: 2 * pairs,
        est_error: pair_tail_bound(x, pairs) + rounding,
    })
}

/// Tolerance used for the cached constants `Γ̃(1)` and `Γ̃(2)`.
pub const CONSTANT_TOL: f64 = 1e-11;

/// `Γ̃(1)`, computed once from the product.
pub fn gamma_tilde_one() -> &'static GammaTildeValue {
    static G1: OnceLock<GammaTildeValue> = OnceLock::new();
    G1.get_or_init(|| log_gamma_tilde(1.0, CONSTANT_TOL).expect("Γ̃(1) is regular"))
}

/// `Γ̃(2)`, computed once from the product.
pub fn gamma_tilde_two() -> &'static GammaTildeValue {
    static G2: OnceLock<GammaTildeValue> = OnceLock::new();
    G2.get_or_init(|| log_gamma_tilde(2.0, CONSTANT_TOL).expect("Γ̃(2) is regular"))
}

/// Relative residual of the recurrence: for even `n`,
/// `Γ̃(x+n) = Π_{i<n/2} (x+2i)/(x+2i+1) · Γ̃(x)`; for odd `n`,
/// `Γ̃(x+n) = Π_{i<(n−1)/2} (x+2i+1)/(x+2i+2) · Γ̃(x+1)`.
pub fn recurrence_residual(x: f64, n: u32, tol: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(argument("recurrence_residual needs x > 0"));
    }
    if n == 0 {
        return Err(argument("n must be positive"));
    }
    let lhs = log_gamma_tilde(x + n as f64, tol)?;
    let (anchor, start) = if n.is_multiple_of(2) { (x, x) } else { (x + 1.0, x + 1.0) };
    let base = log_gamma_tilde(anchor, tol)?;
    let mut log_prod = 0.0;
    let mut z = start;
    while z + 1.0 < x + n as f64 {
        log_prod += (z / (z + 1.0)).ln();
        z += 2.0;
    }
    let rhs = base.log_abs + log_prod;
    if lhs.sign != base.sign {
        return Ok(f64::INFINITY);
    }
    Ok((lhs.log_abs - rhs).exp_m1().abs())
}

/// `|log Γ̃(nx) − (−½ log n + Σ_{j<n} (−1)^j log Γ̃(x + j/n))|` for the real
/// logarithms; infinite if the signs of the two products disagree.
pub fn distribution_residual(x: f64, n: i64, tol: f64) -> Result<f64> {
    let n = check_odd(n, "n")? as i64;
    let lhs = log_gamma_tilde(n as f64 * x, tol)?;
    let mut rhs = -0.5 * (n as f64).ln();
    let mut sign = 1i8;
    for j in 0..n {
        let v = log_gamma_tilde(x + j as f64 / n as f64, tol)?;
        sign *= v.sign;
        if j % 2 == 0 {
            rhs += v.log_abs;
        } else {
            rhs -= v.log_abs;
        }
    }
    if sign != lhs.sign {
        return Ok(f64::INFINITY);
    }
    Ok((lhs.log_abs - rhs).abs())
}

/// Central-difference derivative of `log|Γ̃|` (fourth order in `h`).
pub fn log_gamma_tilde_derivative(x: f64, h: f64, tol: f64) -> Result<f64> {
    let f = |t: f64| -> Result<f64> { Ok(log_gamma_tilde(t, tol)?.log_abs) };
    let d1 = f(x + h)? - f(x - h)?;
    let d2 = f(x + 2.0 * h)? - f(x - 2.0 * h)?;
    Ok((8.0 * d1 - d2) / (12.0 * h))
}

/// `log((m−1)!!/m!!)` with `(−1)!! = 0!! = 1`.
pub fn log_double_factorial_ratio(m: u64) -> f64 {
    // (m−1)!!/m!! = Π (k−1)/k over k ≤ m with k ≡ m (mod 2), k ≥ 2
    (2..=m).rev().step_by(2).map(|k| ((k - 1) as f64 / k as f64).ln()).sum::<f64>()
}

/// Per-evaluation tolerance of [`gamma_invfn`].
pub const GAMMA_INVFN_TOL: f64 = 1e-10;

/// `(x, y) ↦ log|Γ̃(x/y)/√y|`, extended to `x/y ∈ ℤ≤0` by
/// `log((m−1)!!/m!! · √y · Γ̃(2))` for even `m = −x/y` and
/// `log((m−1)!!/m!! · Γ̃(1)/√(y³))` for odd `m`.
pub fn gamma_invfn() -> BivariateFn {
    BivariateFn::new("gamma-log", |x: &Scalar, y: &Scalar| {
        let u = x.div(y);
        let yf = y.to_f64();
        let v = match u.nearest_integer() {
            Some(k) if k <= 0 => {
                let m = (-k) as u64;
                let base = log_double_factorial_ratio(m);
                if m.is_multiple_of(2) {
                    base + 0.5 * yf.ln() + gamma_tilde_two().log_abs
                } else {
                    base + gamma_tilde_one().log_abs - 1.5 * yf.ln()
                }
            }
            _ => log_gamma_tilde(u.to_f64(), GAMMA_INVFN_TOL)?.log_abs - 0.5 * yf.ln(),
        };
        Ok(Complex64::new(v, 0.0))
    })
    .with_note(DomainNote::lattice(Exclusion::None))
    .with_derivative(|| {
        BivariateFn::new("d/dx gamma-log", |x: &Scalar, y: &Scalar| {
            let u = x.div(y);
            if u.nearest_integer().is_some_and(|k| k <= 0) {
                return Err(domain("gamma-log is not differentiable at x/y ∈ ℤ≤0"));
            }
            let yf = y.to_f64();
            let psi = crate::zeta::digamma_tilde(u.to_f64(), 1e-14)?;
            Ok(Complex64::new(psi / yf, 0.0))
        })
        .with_note(DomainNote::lattice(Exclusion::AtMost(0)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_real;
    use std::f64::consts::PI;

    // Closed form used only as an independent oracle.
    fn oracle(x: f64) -> f64 {
        0.5 * PI.sqrt() * gamma_real(x / 2.0) / gamma_real((x + 1.0) / 2.0)
    }

    #[test]
    fn matches_closed_form() {
        for x in [0.3, 0.7, 1.0, 1.5, 2.0, 3.7, -0.4, -1.3, -2.5] {
            let v = log_gamma_tilde(x, 1e-12).unwrap();
            let want = oracle(x);
            assert_eq!(v.sign as f64, want.signum(), "sign at {x}");
            let err = (v.log_abs - want.abs().ln()).abs();
            assert!(err <= v.est_error, "x={x}: err {err:e} > est {:e}", v.est_error);
            assert!(err <= 1e-12, "x={x}: {err:e}");
        }
    }

    #[test]
    fn cached_constants() {
        assert!((gamma_tilde_one().value() - PI / 2.0).abs() < 1e-10);
        assert!((gamma_tilde_two().value() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sign_on_negative_unit_interval() {
        assert_eq!(log_gamma_tilde(-0.5, 1e-8).unwrap().sign, -1);
        assert_eq!(log_gamma_tilde(-1.5, 1e-8).unwrap().sign, 1);
    }

    #[test]
    fn poles_rejected() {
        for x in [0.0, -1.0, -4.0] {
            assert!(matches!(log_gamma_tilde(x, 1e-8), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn recurrence_examples() {
        assert!(recurrence_residual(0.7, 2, 1e-12).unwrap() <= 1e-9);
        assert_eq!(recurrence_residual(0.7, 1, 1e-12).unwrap(), 0.0);
        assert!(recurrence_residual(1.2, 3, 1e-12).unwrap() <= 1e-9);
    }

    #[test]
    fn distribution_examples() {
        assert!(distribution_residual(0.4, 1, 1e-12).unwrap() <= 1e-15);
        assert!(distribution_residual(0.4, 3, 1e-11).unwrap() <= 1e-8);
        assert!(distribution_residual(0.26, 5, 1e-11).unwrap() <= 1e-8);
    }

    #[test]
    fn halving_tol_halves_error() {
        for x in [0.3, 1.0, 1.5, 2.3, -0.6, 4.2] {
            let exact = oracle(x).abs().ln();
            let mut prev = f64::INFINITY;
            for k in 0..6 {
                let tol = 1e-6 / 2f64.powi(k);
                let err = (log_gamma_tilde(x, tol).unwrap().log_abs - exact).abs();
                assert!(err <= tol);
                assert!(err <= prev / 2.0, "x={x} tol={tol:e}: {err:e} vs {prev:e}");
                prev = err;
            }
        }
    }

    #[test]
    fn psi_tilde_consistency() {
        for x in [0.5, 1.0, 1.5, 2.3] {
            let d = log_gamma_tilde_derivative(x, 1e-3, 1e-12).unwrap();
            let z = crate::zeta::zeta_value(Complex64::new(1.0, 0.0), Complex64::new(x, 0.0))
                .unwrap()
                .re;
            assert!((d + z).abs() <= 1e-7, "x={x}: {:e}", (d + z).abs());
        }
    }

    #[test]
    fn double_factorials() {
        assert_eq!(log_double_factorial_ratio(0), 0.0);
        assert_eq!(log_double_factorial_ratio(1), 0.0);
        assert!((log_double_factorial_ratio(2) - 0.5f64.ln()).abs() < 1e-15);
        // 4!!/5!! = 8/15
        assert!((log_double_factorial_ratio(5) - (8.0f64 / 15.0).ln()).abs() < 1e-15);
        // 5!!/6!! = 15/48
        assert!((log_double_factorial_ratio(6) - (15.0f64 / 48.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn branch_value_at_zero() {
        let f = gamma_invfn();
        let v = f.eval(&Scalar::int(0), &Scalar::int(1)).unwrap().re;
        assert_eq!(v, gamma_tilde_two().log_abs);
    }

    #[test]
    fn invariance_examples() {
        let f = gamma_invfn();
        let r = crate::invariance_residual(&f, &0.3.into(), &1.0.into(), 3).unwrap();
        assert!(r.residual <= 1e-8, "{:e}", r.residual);
        let r = crate::invariance_residual(&f, &Scalar::int(-2), &Scalar::int(1), 3).unwrap();
        assert!(r.residual <= 1e-7, "{:e}", r.residual);
    }
}
