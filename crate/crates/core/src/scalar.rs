//! Real scalars that are either floating point or exact rationals.
//!
//! Evaluation points carry their exactness so that lattice tests such as
//! `x/y ∈ ℤ` are decided exactly whenever the caller supplied rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{argument, Error};

/// Relative tolerance of the floating integer test.
pub const INTEGER_TOL: f64 = 1e-9;

/// A real number, exact when possible.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Float(f64),
    Exact(BigRational),
}

impl Scalar {
    pub fn float(v: f64) -> Self {
        Scalar::Float(v)
    }

    pub fn int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Float(v) => *v,
            Scalar::Exact(r) => rational_to_f64(r),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// Exact value of the scalar; floats convert to their binary value.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact(r) => Some(r.clone()),
            Scalar::Float(v) => BigRational::from_f64(*v),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Float(v) => *v > 0.0,
            Scalar::Exact(r) => r.is_positive(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Float(v) => v.is_finite(),
            Scalar::Exact(_) => true,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Float(self.to_f64() - other.to_f64()),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Float(self.to_f64() * other.to_f64()),
        }
    }

    /// Division; the caller guarantees a nonzero divisor.
    pub fn div(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / other.to_f64()),
        }
    }

    pub fn mul_int(&self, k: i64) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a * BigInt::from(k)),
            Scalar::Float(v) => Scalar::Float(v * k as f64),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }

    /// The integer this scalar equals under the detection policy.
    ///
    /// Exact scalars are tested exactly; floats use
    /// `|u − round(u)| ≤ INTEGER_TOL·max(1, |u|)`.
    pub fn nearest_integer(&self) -> Option<i64> {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    r.to_integer().to_i64()
                } else {
                    None
                }
            }
            Scalar::Float(u) => float_integer(*u),
        }
    }

    /// Floor and fractional part under the detection policy, so that a
    /// value detected as the integer `k` yields `(k, 0)`.
    pub fn floor_fract(&self) -> (i64, Scalar) {
        match self {
            Scalar::Exact(r) => {
                let fl = r.floor();
                let k = fl.to_integer().to_i64().unwrap_or(i64::MAX);
                (k, Scalar::Exact(r - fl))
            }
            Scalar::Float(u) => {
                if let Some(k) = float_integer(*u) {
                    (k, Scalar::Float(0.0))
                } else {
                    let fl = u.floor();
                    (fl as i64, Scalar::Float(u - fl))
                }
            }
        }
    }

    pub fn total_cmp(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }
}

pub(crate) fn float_integer(u: f64) -> Option<i64> {
    if !u.is_finite() {
        return None;
    }
    let r = u.round();
    if (u - r).abs() <= INTEGER_TOL * u.abs().max(1.0) && r.abs() < 9.0e15 {
        Some(r as i64)
    } else {
        None
    }
}

/// Correctly rounded conversion of a rational to `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    // Scale to a 64-bit quotient, then apply the binary exponent.
    let neg = r.is_negative();
    let num = r.numer().abs();
    let den = r.denom().clone();
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let (n2, d2) = if shift >= 0 {
        (num, den << shift as usize)
    } else {
        (num << (-shift) as usize, den)
    };
    let q = &n2 / &d2;
    let rem_nonzero = !(&n2 % &d2).is_zero();
    let mut qf = q.to_f64().unwrap_or(f64::INFINITY);
    if rem_nonzero {
        // Sticky bit for correct rounding of the 64-bit quotient.
        qf = (q.to_u128().unwrap_or(0) | 1) as f64;
    }
    let v = qf * 2f64.powi(shift as i32);
    if neg {
        -v
    } else {
        v
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Float(v) => write!(f, "{v}"),
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

/// Parses decimal (`0.25`, `1e-3`), integer (`-2`) or rational (`3/7`) text.
///
/// Integers and `p/q` become exact; anything with a decimal point or
/// exponent stays a float.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|_| argument(format!("bad rational numerator in {t:?}")))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|_| argument(format!("bad rational denominator in {t:?}")))?;
            if q.is_zero() {
                return Err(argument(format!("zero denominator in {t:?}")));
            }
            return Ok(Scalar::Exact(BigRational::new(p, q)));
        }
        if let Ok(i) = t.parse::<BigInt>() {
            return Ok(Scalar::Exact(BigRational::from_integer(i)));
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Scalar::Float(v)),
            _ => Err(argument(format!("not a number: {t:?}"))),
        }
    }
}
