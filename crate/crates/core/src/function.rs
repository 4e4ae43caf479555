//! The bivariate function handle used for every candidate member.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{domain, Result};
use crate::scalar::Scalar;

type EvalFn = dyn Fn(&Scalar, &Scalar) -> Result<Complex64> + Send + Sync;
type DerivFn = dyn Fn() -> BivariateFn + Send + Sync;
type ExactFn = dyn Fn(&BigRational, &BigRational) -> BigRational + Send + Sync;

/// Which lattice points `x/y` (shifted by an offset) are not evaluable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exclusion {
    /// Every lattice point is evaluable; it only selects a special branch.
    None,
    /// Lattice ratios `k ≤ bound` are excluded.
    AtMost(i64),
    /// Lattice ratios `k ≥ bound` are excluded.
    AtLeast(i64),
    /// Every lattice point is excluded.
    All,
}

impl Exclusion {
    fn excludes(self, k: i64) -> bool {
        match self {
            Exclusion::None => false,
            Exclusion::AtMost(b) => k <= b,
            Exclusion::AtLeast(b) => k >= b,
            Exclusion::All => true,
        }
    }
}

/// Marks the lattice `(x − offset)/y ∈ ℤ` on which a function switches to a
/// special branch or is undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainNote {
    pub offset: Scalar,
    pub exclusion: Exclusion,
}

impl DomainNote {
    pub fn lattice(exclusion: Exclusion) -> Self {
        DomainNote {
            offset: Scalar::int(0),
            exclusion,
        }
    }

    pub fn shifted(offset: Scalar, exclusion: Exclusion) -> Self {
        DomainNote { offset, exclusion }
    }

    pub fn ratio(&self, x: &Scalar, y: &Scalar) -> Scalar {
        x.sub(&self.offset).div(y)
    }

    /// Lattice index of `(x, y)` under the integer-detection policy.
    pub fn lattice_index(&self, x: &Scalar, y: &Scalar) -> Option<i64> {
        self.ratio(x, y).nearest_integer()
    }

    pub fn is_excluded(&self, x: &Scalar, y: &Scalar) -> bool {
        self.lattice_index(x, y)
            .is_some_and(|k| self.exclusion.excludes(k))
    }

    /// True when a lattice point lies within `radius` of `x` (in x units).
    pub fn is_near(&self, x: f64, y: f64, radius: f64) -> bool {
        let u = (x - self.offset.to_f64()) / y;
        (u - u.round()).abs() * y <= radius
    }

    /// Lattice points strictly inside the open interval `(lo, hi)`.
    pub fn breakpoints(&self, y: f64, lo: f64, hi: f64) -> Vec<f64> {
        let off = self.offset.to_f64();
        let (a, b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        let k0 = ((a - off) / y).floor() as i64;
        let k1 = ((b - off) / y).ceil() as i64;
        if k1 - k0 > 10_000 {
            return Vec::new();
        }
        (k0..=k1)
            .map(|k| off + k as f64 * y)
            .filter(|t| *t > a && *t < b)
            .collect()
    }
}

/// A possibly complex-valued function `f(x, y)` defined for `y > 0`.
///
/// Cloning is cheap; evaluation is pure and may be shared across threads.
#[derive(Clone)]
pub struct BivariateFn {
    name: String,
    eval: Arc<EvalFn>,
    dx: Option<Arc<DerivFn>>,
    exact: Option<Arc<ExactFn>>,
    note: Option<DomainNote>,
}

impl fmt::Debug for BivariateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BivariateFn")
            .field("name", &self.name)
            .field("analytic_dx", &self.dx.is_some())
            .field("note", &self.note)
            .finish()
    }
}

impl BivariateFn {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Scalar, &Scalar) -> Result<Complex64> + Send + Sync + 'static,
    {
        BivariateFn {
            name: name.into(),
            eval: Arc::new(f),
            dx: None,
            exact: None,
            note: None,
        }
    }

    /// Real-valued convenience constructor working on `f64` arguments.
    pub fn real<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, move |x, y| {
            Ok(Complex64::new(f(x.to_f64(), y.to_f64()), 0.0))
        })
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(format!("const:{}", fmt_complex(c)), move |_, _| Ok(c))
            .with_derivative(BivariateFn::zero)
    }

    pub fn zero() -> Self {
        Self::new("zero", |_, _| Ok(Complex64::new(0.0, 0.0)))
            .with_derivative(BivariateFn::zero)
    }

    /// Attaches an analytic x-derivative, built lazily on request.
    pub fn with_derivative<D>(mut self, d: D) -> Self
    where
        D: Fn() -> BivariateFn + Send + Sync + 'static,
    {
        self.dx = Some(Arc::new(d));
        self
    }

    /// Attaches an exact rational evaluator for real rational-valued
    /// functions; used when both arguments are exact.
    pub fn with_exact<E>(mut self, e: E) -> Self
    where
        E: Fn(&BigRational, &BigRational) -> BigRational + Send + Sync + 'static,
    {
        self.exact = Some(Arc::new(e));
        self
    }

    /// Exact value at exact arguments, when an exact evaluator exists.
    pub fn eval_exact(&self, x: &BigRational, y: &BigRational) -> Option<BigRational> {
        use num_traits::Signed;
        if !y.is_positive() {
            return None;
        }
        self.exact.as_ref().map(|e| e(x, y))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn with_note(mut self, note: DomainNote) -> Self {
        self.note = Some(note);
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_note(&self) -> Option<&DomainNote> {
        self.note.as_ref()
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.dx.is_some()
    }

    pub fn analytic_derivative(&self) -> Option<BivariateFn> {
        self.dx.as_ref().map(|d| d())
    }

    /// Evaluates `f(x, y)`. Excluded points and non-finite results are
    /// reported as domain errors.
    pub fn eval(&self, x: &Scalar, y: &Scalar) -> Result<Complex64> {
        if !y.is_positive() || !y.is_finite() {
            return Err(domain(format!("{}: y must be positive, got {y}", self.name)));
        }
        if !x.is_finite() {
            return Err(domain(format!("{}: non-finite x", self.name)));
        }
        if let Some(note) = &self.note {
            if note.is_excluded(x, y) {
                return Err(domain(format!(
                    "{}: excluded lattice point x={x}, y={y}",
                    self.name
                )));
            }
        }
        let v = (self.eval)(x, y)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(domain(format!(
                "{}: non-finite value at x={x}, y={y}",
                self.name
            )));
        }
        Ok(v)
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> Result<Complex64> {
        self.eval(&Scalar::Float(x), &Scalar::Float(y))
    }

    /// Pointwise product with a complex constant; derivatives follow.
    pub fn scaled(&self, a: Complex64) -> BivariateFn {
        let inner = self.clone();
        let mut out = BivariateFn::new(format!("{}*{}", fmt_complex(a), self.name), move |x, y| {
            Ok(a * inner.eval(x, y)?)
        });
        out.note = self.note.clone();
        if let Some(d) = self.dx.clone() {
            out = out.with_derivative(move || d().scaled(a));
        }
        if let (Some(e), true) = (self.exact.clone(), a.im == 0.0) {
            if let Some(ar) = BigRational::from_float(a.re) {
                out = out.with_exact(move |x, y| &ar * e(x, y));
            }
        }
        out
    }

    /// Pointwise sum; the analytic derivative exists when both have one.
    pub fn plus(&self, other: &BivariateFn) -> BivariateFn {
        let (f, g) = (self.clone(), other.clone());
        let mut out = BivariateFn::new(format!("({}+{})", self.name, other.name), move |x, y| {
            Ok(f.eval(x, y)? + g.eval(x, y)?)
        });
        out.note = self.note.clone().or_else(|| other.note.clone());
        if let (Some(d1), Some(d2)) = (self.dx.clone(), other.dx.clone()) {
            out = out.with_derivative(move || d1().plus(&d2()));
        }
        out
    }
}

pub(crate) fn fmt_complex(c: Complex64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("{}{:+}i", c.re, c.im)
    }
}
