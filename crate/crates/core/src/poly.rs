//! Dense polynomials with exact rational coefficients (ascending order).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Poly = Vec<BigRational>;

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

pub fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn monomial(k: usize) -> Poly {
    let mut p = vec![BigRational::zero(); k + 1];
    p[k] = BigRational::one();
    p
}

pub fn add(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n)
        .map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z))
        .collect())
}

pub fn sub(a: &Poly, b: &Poly) -> Poly {
    add(a, &scale(b, &-BigRational::one()))
}

pub fn scale(a: &Poly, c: &BigRational) -> Poly {
    trim(a.iter().map(|v| v * c).collect())
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    trim(out)
}

pub fn eval(p: &Poly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Antiderivative vanishing at 0.
pub fn antiderivative(p: &Poly) -> Poly {
    let mut out = vec![BigRational::zero()];
    for (k, c) in p.iter().enumerate() {
        out.push(c / int(k as i64 + 1));
    }
    trim(out)
}

pub fn derivative(p: &Poly) -> Poly {
    trim(p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * int(k as i64))
        .collect())
}

/// `∫_a^b p(t) dt`, oriented.
pub fn integrate(p: &Poly, a: &BigRational, b: &BigRational) -> BigRational {
    let q = antiderivative(p);
    eval(&q, b) - eval(&q, a)
}

/// `t ↦ p(a + b·t)`.
pub fn compose_affine(p: &Poly, a: &BigRational, b: &BigRational) -> Poly {
    let lin: Poly = trim(vec![a.clone(), b.clone()]);
    let mut out: Poly = Vec::new();
    for c in p.iter().rev() {
        out = add(&mul(&out, &lin), &vec![c.clone()]);
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_integrate() {
        // (1 + t)^2 at t -> 2 - t gives (3 - t)^2.
        let p = vec![int(1), int(2), int(1)];
        let q = compose_affine(&p, &int(2), &int(-1));
        assert_eq!(q, vec![int(9), int(-6), int(1)]);
        assert_eq!(integrate(&monomial(2), &int(0), &int(3)), int(9));
        assert_eq!(integrate(&monomial(2), &int(3), &int(0)), int(-9));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::from(0));
    }
}
