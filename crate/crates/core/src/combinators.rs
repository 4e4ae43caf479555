//! Operations that map alternating invariants to alternating invariants,
//! plus two diagnostics (cross-modulus symmetry and the boundary probe).
//!
//! Domain notes travel with the transforms: a lattice `(x − off)/y ∈ ℤ` of
//! the input becomes the matching lattice of the output, so excluded points
//! keep being reported instead of producing garbage.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{argument, domain, Result};
use crate::function::{BivariateFn, DomainNote, Exclusion};
use crate::invariance::check_odd;
use crate::scalar::Scalar;

/// A real function of one real variable.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

fn exact_of(s: &Scalar) -> Option<BigRational> {
    s.to_rational()
}

/// `F(x, y) = a·f(b + c·x, c·y)`.
pub fn translate_scale(f: &BivariateFn, a: f64, b: &Scalar, c: &Scalar) -> Result<BivariateFn> {
    if !c.is_positive() || !c.is_finite() {
        return Err(argument(format!("translate_scale needs c > 0, got {c}")));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(argument("translate_scale needs finite a and b"));
    }
    let (g, bb, cc) = (f.clone(), b.clone(), c.clone());
    let mut out = BivariateFn::new(
        format!("{a}*{}({b}+{c}x, {c}y)", f.name()),
        move |x: &Scalar, y: &Scalar| Ok(a * g.eval(&bb.add(&cc.mul(x)), &cc.mul(y))?),
    );
    if let Some(note) = f.domain_note() {
        // (b + cx − off)/(cy) = (x − (off − b)/c)/y
        out = out.with_note(DomainNote::shifted(note.offset.sub(b).div(c), note.exclusion));
    }
    if f.has_analytic_derivative() {
        let (g, bb, cc) = (f.clone(), b.clone(), c.clone());
        let ac = a * c.to_f64();
        out = out.with_derivative(move || {
            let d = g.analytic_derivative().expect("checked above");
            translate_scale(&d, ac, &bb, &cc).expect("validated parameters")
        });
    }
    if let (true, Some(ar), Some(br), Some(cr)) = (
        f.has_exact(),
        BigRational::from_float(a),
        exact_of(b),
        exact_of(c),
    ) {
        let g = f.clone();
        out = out.with_exact(move |x, y| {
            &ar * g.eval_exact(&(&br + &cr * x), &(&cr * y)).expect("exact evaluator")
        });
    }
    Ok(out)
}

/// Step used by the finite-difference fallback of [`partial_x`].
pub fn fd_step(x: f64) -> f64 {
    1e-5f64.max(1e-5 * x.abs())
}

fn central4(f: &BivariateFn, x: f64, y: &Scalar, h: f64) -> Result<Complex64> {
    let at = |t: f64| f.eval(&Scalar::Float(t), y);
    let d1 = at(x + h)? - at(x - h)?;
    let d2 = at(x + 2.0 * h)? - at(x - 2.0 * h)?;
    Ok((d1 * 8.0 - d2) / (12.0 * h))
}

/// `∂f/∂x`: the analytic derivative when `f` carries one, otherwise a
/// fourth-order central difference with one Richardson step.
pub fn partial_x(f: &BivariateFn) -> BivariateFn {
    if let Some(d) = f.analytic_derivative() {
        return d;
    }
    numeric_partial_x(f)
}

/// The finite-difference derivative regardless of any analytic one.
pub fn numeric_partial_x(f: &BivariateFn) -> BivariateFn {
    let g = f.clone();
    let out = BivariateFn::new(format!("d/dx {}", f.name()), move |x: &Scalar, y: &Scalar| {
        let xf = x.to_f64();
        let h = fd_step(xf);
        if let Some(note) = g.domain_note() {
            if note.is_near(xf, y.to_f64(), 2.0 * h) {
                return Err(domain(format!(
                    "d/dx {}: x={x} is within the stencil of a lattice point",
                    g.name()
                )));
            }
        }
        let coarse = central4(&g, xf, y, h)?;
        let fine = central4(&g, xf, y, 0.5 * h)?;
        Ok((fine * 16.0 - coarse) / 15.0)
    });
    match f.domain_note() {
        Some(note) => out.with_note(DomainNote::shifted(note.offset.clone(), Exclusion::All)),
        None => out,
    }
}

fn reflect_exclusion(e: Exclusion) -> Exclusion {
    // k = 1 − k' between the old and new lattice indices
    match e {
        Exclusion::AtMost(b) => Exclusion::AtLeast(1 - b),
        Exclusion::AtLeast(b) => Exclusion::AtMost(1 - b),
        other => other,
    }
}

/// `F(x, y) = f(y − x, y)`.
pub fn reflect(f: &BivariateFn) -> BivariateFn {
    let g = f.clone();
    let mut out = BivariateFn::new(format!("reflect({})", f.name()), move |x: &Scalar, y: &Scalar| {
        g.eval(&y.sub(x), y)
    });
    if let Some(note) = f.domain_note() {
        out = out.with_note(DomainNote::shifted(
            note.offset.neg(),
            reflect_exclusion(note.exclusion),
        ));
    }
    if f.has_analytic_derivative() {
        let g = f.clone();
        out = out.with_derivative(move || {
            reflect(&g.analytic_derivative().expect("checked above")).scaled(Complex64::new(-1.0, 0.0))
        });
    }
    if f.has_exact() {
        let g = f.clone();
        out = out.with_exact(move |x, y| g.eval_exact(&(y - x), y).expect("exact evaluator"));
    }
    out
}

fn component(f: &BivariateFn, imag: bool) -> BivariateFn {
    let g = f.clone();
    let label = if imag { "im" } else { "re" };
    let mut out = BivariateFn::new(format!("{label}({})", f.name()), move |x: &Scalar, y: &Scalar| {
        let v = g.eval(x, y)?;
        Ok(Complex64::new(if imag { v.im } else { v.re }, 0.0))
    });
    if let Some(note) = f.domain_note() {
        out = out.with_note(note.clone());
    }
    if f.has_analytic_derivative() {
        let g = f.clone();
        out = out.with_derivative(move || component(&g.analytic_derivative().expect("checked above"), imag));
    }
    if f.has_exact() {
        // an exact evaluator implies a real-valued function
        let g = f.clone();
        out = out.with_exact(move |x, y| {
            if imag {
                BigRational::from_integer(0.into())
            } else {
                g.eval_exact(x, y).expect("exact evaluator")
            }
        });
    }
    out
}

/// Pointwise real part.
pub fn real_part(f: &BivariateFn) -> BivariateFn {
    component(f, false)
}

/// Pointwise imaginary part.
pub fn imag_part(f: &BivariateFn) -> BivariateFn {
    component(f, true)
}

/// `(−1)^⌊u⌋ f(y·{u}, y)` with `u` given. When a float `u` is detected as an
/// integer `k`, the two readings `(−1)^k f(0, y)` and `(−1)^{k−1} f(y, y)`
/// must agree, otherwise the point is branch-sensitive and rejected.
fn wrapped(f: &BivariateFn, u: &Scalar, y: &Scalar) -> Result<Complex64> {
    let sign = |k: i64| if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let (k, frac) = u.floor_fract();
    if !u.is_exact() && u.nearest_integer().is_some() {
        let low = sign(k) * f.eval(&Scalar::int(0), y)?;
        let high = sign(k - 1) * f.eval(y, y)?;
        let scale = low.norm().max(high.norm()).max(1.0);
        if (low - high).norm() > 1e-9 * scale {
            return Err(domain(format!(
                "{}: wrapped argument {u} is at an integer and the two branches differ",
                f.name()
            )));
        }
        return Ok(low);
    }
    Ok(sign(k) * f.eval(&y.mul(&frac), y)?)
}

/// The pair
/// `f₁(x, y) = (−1)^⌊(t+x)/y⌋ f(y{(t+x)/y}, y)` and
/// `f₂(x, y) = (−1)^⌊(t−x)/y⌋ f(y{(t−x)/y}, y)`.
///
/// `f` is assumed to be an alternating invariant; this is not checked.
/// Note `f₂(x, y) = −f₁(y − x, y)`.
pub fn sign_fractional_lift(f: &BivariateFn, t: &Scalar) -> Result<(BivariateFn, BivariateFn)> {
    if !t.is_finite() {
        return Err(argument("lift shift t must be finite"));
    }
    let (g, tt) = (f.clone(), t.clone());
    let mut f1 = BivariateFn::new(format!("lift+({}; t={t})", f.name()), move |x: &Scalar, y: &Scalar| {
        wrapped(&g, &tt.add(x).div(y), y)
    })
    .with_note(DomainNote::shifted(t.neg(), Exclusion::None));
    let (g, tt) = (f.clone(), t.clone());
    let mut f2 = BivariateFn::new(format!("lift-({}; t={t})", f.name()), move |x: &Scalar, y: &Scalar| {
        wrapped(&g, &tt.sub(x).div(y), y)
    })
    .with_note(DomainNote::shifted(t.clone(), Exclusion::None));
    if f.has_analytic_derivative() {
        let (g, tt) = (f.clone(), t.clone());
        f1 = f1.with_derivative(move || {
            let d = g.analytic_derivative().expect("checked above");
            sign_fractional_lift(&d, &tt).expect("finite t").0
        });
        let (g, tt) = (f.clone(), t.clone());
        f2 = f2.with_derivative(move || {
            let d = g.analytic_derivative().expect("checked above");
            sign_fractional_lift(&d, &tt)
                .expect("finite t")
                .1
                .scaled(Complex64::new(-1.0, 0.0))
        });
    }
    Ok((f1, f2))
}

fn fourier_sum(h: &RealFn, terms: u64, x: f64, y: f64) -> Complex64 {
    let u = x / y;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..terms {
        let k = (2 * m + 1) as f64;
        let w = h(k / y);
        if w == 0.0 {
            continue;
        }
        // reduce the phase k·u modulo 2 before scaling by π
        let phase = (k * u).rem_euclid(2.0) * std::f64::consts::PI;
        acc += Complex64::new(w * phase.cos(), w * phase.sin());
    }
    acc / y
}

/// Truncated odd Fourier pair
/// `f_cos(x, y) = (1/y) Σ_{m<terms} h((2m+1)/y) cos(π(2m+1)x/y)` and the
/// matching sine series.
pub fn odd_fourier_series(h: RealFn, terms: i64) -> Result<(BivariateFn, BivariateFn)> {
    if terms <= 0 {
        return Err(argument(format!("terms must be positive, got {terms}")));
    }
    let t = terms as u64;
    let mk = |imag: bool, h: RealFn| {
        let label = if imag { "fourier-sin" } else { "fourier-cos" };
        let hh = h.clone();
        let f = BivariateFn::new(format!("{label}[{t}]"), move |x: &Scalar, y: &Scalar| {
            let v = fourier_sum(&hh, t, x.to_f64(), y.to_f64());
            Ok(Complex64::new(if imag { v.im } else { v.re }, 0.0))
        });
        // d/dx cos(πku) = −(πk/y) sin(πku): the weight becomes ∓π·v·h(v)
        f.with_derivative(move || {
            let h = h.clone();
            let s = if imag { 1.0 } else { -1.0 };
            let hd: RealFn = Arc::new(move |v| s * std::f64::consts::PI * v * h(v));
            let (c, sn) = odd_fourier_series(hd, terms).expect("positive terms");
            if imag {
                c
            } else {
                sn
            }
        })
    };
    Ok((mk(false, h.clone()), mk(true, h)))
}

/// `Σ_{m≥terms} r^{(2m+1)/y} / y`, the tail of the series for `h(u) = r^u`.
pub fn geometric_tail_bound(r: f64, terms: u64, y: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(argument(format!("geometric tail needs 0 < r < 1, got {r}")));
    }
    let q = r.powf(2.0 / y);
    Ok(r.powf((2 * terms + 1) as f64 / y) / (y * (1.0 - q)))
}

/// Bound on the invariance residual of the truncated series for `h(u) = r^u`
/// at `(x, y, n)`.
///
/// The alternating sum over the `n` shifted points keeps exactly the terms
/// with `n | 2m+1` and `2m+1 ≤ 2·terms − 1`, which is the untruncated series
/// cut after `⌊((2·terms−1)/n + 1)/2⌋` terms; the residual is therefore the
/// tail past that effective count, plus floating-point rounding.
pub fn geometric_invariance_bound(r: f64, terms: u64, x: f64, y: f64, n: u32) -> Result<f64> {
    let nf = n as f64;
    let eff = (((2 * terms - 1) as f64 / nf + 1.0) / 2.0).floor() as u64;
    let tail = geometric_tail_bound(r, eff, y)?;
    let mass = |z: f64| r.powf(1.0 / z) / (z * (1.0 - r.powf(2.0 / z)));
    let phase = 1.0 + std::f64::consts::PI * (2 * terms + 1) as f64 * (x.abs() + nf * y) / y;
    let rounding = 16.0 * f64::EPSILON * (terms as f64 + phase) * (mass(y) + nf * mass(nf * y));
    Ok(tail + rounding)
}

/// `|Σ_{r<n} (−1)^r f(x + r·m·y, n·y) − Σ_{r<m} (−1)^r f(x + r·n·y, m·y)|`.
pub fn cross_symmetry_residual(f: &BivariateFn, x: &Scalar, y: &Scalar, m: i64, n: i64) -> Result<f64> {
    let m = check_odd(m, "m")? as i64;
    let n = check_odd(n, "n")? as i64;
    let side = |count: i64, stride: i64, scale: i64| -> Result<Complex64> {
        let yy = y.mul_int(scale);
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..count {
            let v = f.eval(&x.add(&y.mul_int(r * stride)), &yy)?;
            acc += if r % 2 == 0 { v } else { -v };
        }
        Ok(acc)
    };
    Ok((side(n, m, n)? - side(m, n, m)?).norm())
}

/// Finite-`a` probe of the boundary condition
/// `f(x+y, y) + f(x, y) = lim_{a→0⁺} f(x+a, a) + f(x, a)`:
/// `|f(x+y, y) + f(x, y) − f(x+a, a) − f(x, a)|`.
pub fn boundary_characterization_residual(
    f: &BivariateFn,
    x: &Scalar,
    y: &Scalar,
    a: &Scalar,
) -> Result<f64> {
    if !y.is_positive() {
        return Err(argument("y must be positive"));
    }
    if !a.is_positive() || a.total_cmp(y).is_ge() {
        return Err(argument(format!("probe width a must lie in (0, y), got {a}")));
    }
    let full = f.eval(&x.add(y), y)? + f.eval(x, y)?;
    let probe = f.eval(&x.add(a), a)? + f.eval(x, a)?;
    Ok((full - probe).norm())
}
