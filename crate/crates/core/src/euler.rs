//! Euler polynomials `E_m(x)` with exact rational coefficients.
//!
//! Coefficients come from the triangular system
//! `Σ_{k≤m} C(m,k) E_k(x) + E_m(x) = 2x^m`, solved degree by degree and
//! memoized once per degree.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::dd::Dd;
use crate::error::{argument, Result};
use crate::function::BivariateFn;
use crate::invariance::check_odd;
use crate::poly::{self, int, Poly};
use crate::scalar::{rational_to_f64, Scalar};

/// Largest supported degree.
pub const EULER_DEGREE_CAP: usize = 64;

/// `E_m(x) = Σ coeffs[k]·x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerPoly {
    degree: usize,
    coeffs: Poly,
    coeffs_dd: Vec<Dd>,
}

impl EulerPoly {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero above the degree).
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        poly::eval(&self.coeffs, x)
    }

    /// Horner evaluation in double-double, rounded once.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let xd = Dd::from_f64(x);
        self.coeffs_dd
            .iter()
            .rev()
            .fold(Dd::from_f64(0.0), |acc, c| acc.mul(xd).add(*c))
            .to_f64()
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs_dd
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c.to_f64())
    }

    /// `y^m E_m(x/y)` as the homogeneous form `Σ c_k x^k y^{m−k}`.
    pub fn eval_homogeneous_exact(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        let mut ypow = BigRational::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c * &ypow;
            ypow *= y;
        }
        acc
    }

    pub fn eval_homogeneous_f64(&self, x: f64, y: f64) -> f64 {
        let (xd, yd) = (Dd::from_f64(x), Dd::from_f64(y));
        let mut acc = Dd::from_f64(0.0);
        let mut ypow = Dd::from_f64(1.0);
        for c in self.coeffs_dd.iter().rev() {
            acc = acc.mul(xd).add(c.mul(ypow));
            ypow = ypow.mul(yd);
        }
        acc.to_f64()
    }
}

fn to_dd(c: &BigRational) -> Dd {
    let hi = rational_to_f64(c);
    let rest = c - BigRational::from_float(hi).unwrap_or_else(BigRational::zero);
    Dd::new(hi, rational_to_f64(&rest))
}

static CACHE: [OnceLock<EulerPoly>; EULER_DEGREE_CAP + 1] =
    [const { OnceLock::new() }; EULER_DEGREE_CAP + 1];

fn check_cap(m: usize) -> Result<()> {
    if m > EULER_DEGREE_CAP {
        Err(argument(format!(
            "Euler polynomial degree {m} exceeds the cap {EULER_DEGREE_CAP}"
        )))
    } else {
        Ok(())
    }
}

/// Exact `E_m`, computed once per degree and shared afterwards.
pub fn euler_poly(m: usize) -> Result<&'static EulerPoly> {
    check_cap(m)?;
    Ok(CACHE[m].get_or_init(|| build(m)))
}

fn build(m: usize) -> EulerPoly {
    // E_m = x^m − ½ Σ_{k<m} C(m,k) E_k
    let mut acc = poly::monomial(m);
    let half = poly::rat(1, 2);
    for k in 0..m {
        let ek = CACHE[k].get_or_init(|| build(k));
        let c = BigRational::from_integer(poly::binomial(m as u64, k as u64)) * &half;
        acc = poly::sub(&acc, &poly::scale(&ek.coeffs, &c));
    }
    let coeffs_dd = acc.iter().map(to_dd).collect();
    EulerPoly {
        degree: m,
        coeffs: acc,
        coeffs_dd,
    }
}

/// `E_m(x)`; exact for exact input.
pub fn euler_eval(m: usize, x: &Scalar) -> Result<Scalar> {
    let p = euler_poly(m)?;
    Ok(match x {
        Scalar::Exact(r) => Scalar::Exact(p.eval_exact(r)),
        Scalar::Float(v) => Scalar::Float(p.eval_f64(*v)),
    })
}

fn pow_int(x: &BigRational, e: usize) -> BigRational {
    num_traits::pow(x.clone(), e)
}

/// `Σ_{r<n} (−1)^r E_m((x+r)/n) − E_m(x)/n^m`, exactly.
pub fn euler_distribution_residual(m: usize, x: &BigRational, n: i64) -> Result<BigRational> {
    let n = check_odd(n, "n")? as i64;
    let p = euler_poly(m)?;
    let nn = int(n);
    let mut lhs = BigRational::zero();
    for r in 0..n {
        let v = p.eval_exact(&((x + int(r)) / &nn));
        if r % 2 == 0 {
            lhs += v;
        } else {
            lhs -= v;
        }
    }
    Ok(lhs - p.eval_exact(x) / pow_int(&nn, m))
}

/// Coefficient-wise `E_m(1−x) − (−1)^m E_m(x)`; identically zero.
pub fn reflection_defect(m: usize) -> Result<Poly> {
    let p = euler_poly(m)?;
    let reflected = poly::compose_affine(&p.coeffs, &int(1), &int(-1));
    let sign = if m.is_multiple_of(2) { int(1) } else { int(-1) };
    Ok(poly::sub(&reflected, &poly::scale(&p.coeffs, &sign)))
}

/// Coefficient-wise `Σ_{k≤m} C(m,k)E_k + E_m − 2x^m`; identically zero.
pub fn triangular_defect(m: usize) -> Result<Poly> {
    let mut acc = euler_poly(m)?.coeffs.clone();
    for k in 0..=m {
        let c = BigRational::from_integer(poly::binomial(m as u64, k as u64));
        acc = poly::add(&acc, &poly::scale(&euler_poly(k)?.coeffs, &c));
    }
    Ok(poly::sub(&acc, &poly::scale(&poly::monomial(m), &int(2))))
}

/// Coefficient-wise `E_m(x+1) + E_m(x) − 2x^m`; identically zero.
pub fn difference_defect(m: usize) -> Result<Poly> {
    let p = &euler_poly(m)?.coeffs;
    let shifted = poly::compose_affine(p, &int(1), &int(1));
    Ok(poly::sub(
        &poly::add(&shifted, p),
        &poly::scale(&poly::monomial(m), &int(2)),
    ))
}

/// `∫₀¹ E_m(t) E_n(1−t) dt`, exactly.
pub fn euler_integral(m: usize, n: usize) -> Result<BigRational> {
    if m == 0 || n == 0 {
        return Err(argument("euler_integral needs m, n ≥ 1"));
    }
    let em = &euler_poly(m)?.coeffs;
    let en_reflected = poly::compose_affine(&euler_poly(n)?.coeffs, &int(1), &int(-1));
    Ok(poly::integrate(&poly::mul(em, &en_reflected), &BigRational::zero(), &BigRational::one()))
}

/// Closed form `2E_{m+n+1}(1) / (C(m+n,n)(m+n+1))` of [`euler_integral`].
pub fn euler_integral_closed_form(m: usize, n: usize) -> Result<BigRational> {
    let top = euler_poly(m + n + 1)?.eval_exact(&BigRational::one());
    let den = BigRational::from_integer(poly::binomial((m + n) as u64, n as u64) * BigInt::from(m + n + 1));
    Ok(int(2) * top / den)
}

/// `∫₀¹ E_m(t) E_n(t) dt`, exactly.
pub fn euler_integral_same_side(m: usize, n: usize) -> Result<BigRational> {
    let prod = poly::mul(&euler_poly(m)?.coeffs, &euler_poly(n)?.coeffs);
    Ok(poly::integrate(&prod, &BigRational::zero(), &BigRational::one()))
}

/// The bracket `∫₀¹E_m(x−t)E_n(t)dt − 2∫ₓ¹(x−t)^m E_n(t)dt` at rational `x`.
pub fn euler_convolution_bracket(m: usize, n: usize, x: &BigRational) -> Result<BigRational> {
    let en = &euler_poly(n)?.coeffs;
    let em_shift = poly::compose_affine(&euler_poly(m)?.coeffs, x, &int(-1));
    let first = poly::integrate(&poly::mul(&em_shift, en), &BigRational::zero(), &BigRational::one());
    let pow_shift = poly::compose_affine(&poly::monomial(m), x, &int(-1));
    let second = poly::integrate(&poly::mul(&pow_shift, en), x, &BigRational::one());
    Ok(first - int(2) * second)
}

fn convolution_factor(m: usize, n: usize) -> BigRational {
    BigRational::from_integer(poly::binomial((m + n) as u64, m as u64) * BigInt::from(m + n + 1)) / int(2)
}

/// `E_{m+n+1}(x) − (C(m+n,m)(m+n+1)/2)·bracket`, exactly; zero for every
/// rational `x`.
pub fn euler_convolution_identity_residual(m: usize, n: usize, x: &BigRational) -> Result<BigRational> {
    if m == 0 || n == 0 {
        return Err(argument("the convolution identity needs m, n ≥ 1"));
    }
    let lhs = euler_poly(m + n + 1)?.eval_exact(x);
    Ok(lhs - convolution_factor(m, n) * euler_convolution_bracket(m, n, x)?)
}

/// The bracket of [`euler_convolution_bracket`] as a polynomial in `x`.
pub fn euler_convolution_bracket_poly(m: usize, n: usize) -> Result<Poly> {
    let en = &euler_poly(n)?.coeffs;
    let em = &euler_poly(m)?.coeffs;
    // moments μ_j = ∫₀¹ t^j E_n(t) dt and antiderivatives P_j of t^j E_n(t)
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut out: Poly = Vec::new();
    for (k, ck) in em.iter().enumerate() {
        for j in 0..=k {
            let tj_en = poly::mul(&poly::monomial(j), en);
            let mu = poly::integrate(&tj_en, &zero, &one);
            let sign = if j % 2 == 0 { int(1) } else { int(-1) };
            let c = ck * BigRational::from_integer(poly::binomial(k as u64, j as u64)) * sign * mu;
            out = poly::add(&out, &poly::scale(&poly::monomial(k - j), &c));
        }
    }
    for j in 0..=m {
        let p = poly::antiderivative(&poly::mul(&poly::monomial(j), en));
        let p1 = poly::eval(&p, &one);
        let tail = poly::sub(&vec![p1], &p);
        let sign = if j % 2 == 0 { int(-2) } else { int(2) };
        let c = BigRational::from_integer(poly::binomial(m as u64, j as u64)) * sign;
        out = poly::add(&out, &poly::scale(&poly::mul(&poly::monomial(m - j), &tail), &c));
    }
    Ok(out)
}

/// Coefficient-wise form of the convolution identity; identically zero.
pub fn euler_convolution_identity_poly(m: usize, n: usize) -> Result<Poly> {
    if m == 0 || n == 0 {
        return Err(argument("the convolution identity needs m, n ≥ 1"));
    }
    let bracket = euler_convolution_bracket_poly(m, n)?;
    Ok(poly::sub(
        &euler_poly(m + n + 1)?.coeffs,
        &poly::scale(&bracket, &convolution_factor(m, n)),
    ))
}

/// `(x, y) ↦ y^m E_m(x/y)` with analytic x-derivative `m·y^{m−1}E_{m−1}(x/y)`.
///
/// Exact inputs are evaluated exactly and rounded once; float inputs use a
/// double-double homogeneous Horner scheme.
pub fn euler_invfn(m: usize) -> Result<BivariateFn> {
    let p = euler_poly(m)?;
    let f = BivariateFn::new(format!("euler:{m}"), move |x, y| {
        let v = match (x, y) {
            (Scalar::Float(a), Scalar::Float(b)) => p.eval_homogeneous_f64(*a, *b),
            _ => {
                let (a, b) = (
                    x.to_rational().expect("finite x"),
                    y.to_rational().expect("finite y"),
                );
                rational_to_f64(&p.eval_homogeneous_exact(&a, &b))
            }
        };
        Ok(Complex64::new(v, 0.0))
    });
    Ok(f
        .with_exact(move |x, y| p.eval_homogeneous_exact(x, y))
        .with_derivative(move || {
        if m == 0 {
            BivariateFn::zero()
        } else {
            euler_invfn(m - 1)
                .expect("lower degree within cap")
                .scaled(Complex64::new(m as f64, 0.0))
        }
    }))
}

/// Whether a polynomial is identically zero.
pub fn is_zero_poly(p: &Poly) -> bool {
    p.iter().all(|c| c.is_zero())
}

/// `|r|` as `f64`.
pub fn abs_f64(r: &BigRational) -> f64 {
    rational_to_f64(&r.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    #[test]
    fn low_degrees() {
        assert_eq!(euler_poly(0).unwrap().coeffs(), &[int(1)]);
        assert_eq!(euler_poly(1).unwrap().coeffs(), &[rat(-1, 2), int(1)]);
        assert_eq!(euler_poly(2).unwrap().coeffs(), &[int(0), int(-1), int(1)]);
        assert_eq!(
            euler_poly(3).unwrap().coeffs(),
            &[rat(1, 4), int(0), rat(-3, 2), int(1)]
        );
    }

    #[test]
    fn cap_enforced() {
        assert!(euler_poly(EULER_DEGREE_CAP).is_ok());
        assert!(matches!(euler_poly(EULER_DEGREE_CAP + 1), Err(crate::Error::Argument(_))));
    }

    #[test]
    fn evaluations() {
        assert_eq!(euler_eval(1, &Scalar::ratio(1, 2)).unwrap(), Scalar::int(0));
        assert_eq!(euler_eval(2, &Scalar::ratio(1, 2)).unwrap(), Scalar::ratio(-1, 4));
        assert_eq!(euler_eval(3, &Scalar::ratio(1, 4)).unwrap(), Scalar::ratio(11, 64));
        assert_eq!(euler_eval(0, &Scalar::Float(7.3)).unwrap(), Scalar::Float(1.0));
    }

    #[test]
    fn reflection_of_fifth() {
        assert!(is_zero_poly(&reflection_defect(5).unwrap()));
    }

    #[test]
    fn distribution_examples() {
        assert!(euler_distribution_residual(2, &rat(1, 3), 3).unwrap().is_zero());
        assert!(euler_distribution_residual(5, &int(-2), 7).unwrap().is_zero());
        assert!(euler_distribution_residual(4, &rat(2, 9), 1).unwrap().is_zero());
        assert!(euler_distribution_residual(4, &rat(2, 9), 4).is_err());
    }

    #[test]
    fn integral_matches_closed_form() {
        assert_eq!(euler_integral(1, 1).unwrap(), rat(-1, 12));
        assert_eq!(euler_integral_closed_form(1, 1).unwrap(), rat(-1, 12));
        assert_eq!(euler_integral(2, 1).unwrap(), euler_integral_closed_form(2, 1).unwrap());
        for (m, n) in [(2, 3), (4, 1), (3, 3)] {
            let sign = if n % 2 == 0 { int(1) } else { int(-1) };
            assert_eq!(euler_integral_same_side(m, n).unwrap(), sign * euler_integral(m, n).unwrap());
        }
    }

    #[test]
    fn convolution_identity_examples() {
        assert!(euler_convolution_identity_residual(1, 1, &rat(1, 4)).unwrap().is_zero());
        assert!(euler_convolution_identity_residual(2, 3, &int(-1)).unwrap().is_zero());
        assert!(is_zero_poly(&euler_convolution_identity_poly(3, 4).unwrap()));
    }

    #[test]
    fn bracket_derivative_for_m_one() {
        for n in 1..6 {
            let d = poly::derivative(&euler_convolution_bracket_poly(1, n).unwrap());
            let target = poly::scale(&euler_poly(n + 1).unwrap().coeffs, &rat(2, n as i64 + 1));
            assert_eq!(d, target, "n = {n}");
        }
    }

    #[test]
    fn bracket_poly_matches_pointwise() {
        let p = euler_convolution_bracket_poly(2, 3).unwrap();
        for x in [rat(-3, 2), rat(1, 7), int(2)] {
            assert_eq!(poly::eval(&p, &x), euler_convolution_bracket(2, 3, &x).unwrap());
        }
    }

    #[test]
    fn invfn_derivative_rule() {
        let f = euler_invfn(3).unwrap();
        let d = f.analytic_derivative().unwrap();
        let g = euler_invfn(2).unwrap();
        for (x, y) in [(0.3, 1.0), (-1.7, 0.5), (3.2, 2.0)] {
            let lhs = d.eval_f64(x, y).unwrap().re;
            let rhs = 3.0 * g.eval_f64(x, y).unwrap().re;
            assert!((lhs - rhs).abs() < 1e-14);
        }
        let lin = euler_invfn(1).unwrap();
        assert_eq!(lin.eval_f64(0.75, 2.0).unwrap().re, -0.25);
    }

    #[test]
    fn float_and_exact_paths_agree() {
        let f = euler_invfn(5).unwrap();
        let a = f.eval_f64(1.3, 0.7).unwrap().re;
        let b = f.eval(&Scalar::Exact(BigRational::from_float(1.3).unwrap()), &0.7.into()).unwrap().re;
        assert_eq!(a, b);
    }
}
