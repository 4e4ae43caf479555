//! Named constructors for the concrete alternating invariants.
//!
//! Ids look like `family` or `family:params`, where params are either
//! `key=value` pairs or positional values in the family's declared order,
//! e.g. `expfrac:a=2`, `expfrac:2`, `trig-expfrac:r=2,theta=1/2`.
//! Values accept decimals and exact `p/q` rationals; exact inputs make the
//! integer tests of the branch cases exact.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::combinators::{geometric_invariance_bound, odd_fourier_series, real_part, imag_part};
use crate::error::{argument, Error, Result};
use crate::euler::{euler_invfn, EULER_DEGREE_CAP};
use crate::function::{BivariateFn, DomainNote, Exclusion};
use crate::gamma_tilde::gamma_invfn;
use crate::invariance::{check_grid, check_grid_with, Grid, GridPoint, InvarianceReport};
use crate::scalar::Scalar;
use crate::zeta::zeta_invfn;

/// Tolerance class used by the family-aware verifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ToleranceClass {
    /// Closed forms and polynomials.
    ExactForm,
    /// Functions computed by series acceleration or infinite products.
    Special,
    /// Truncated odd Fourier series with geometric weights `r^u`.
    GeometricSeries { r: f64, terms: u64 },
    /// Not expected to be an invariant.
    NegativeControl,
}

/// Tolerance for closed forms.
pub const EXACT_FORM_TOL: f64 = 1e-12;
/// Tolerance for `ζ_E`- and `Γ̃`-based members.
pub const SPECIAL_TOL: f64 = 1e-8;

impl ToleranceClass {
    /// Tolerance at one grid point.
    pub fn at(&self, p: &GridPoint) -> f64 {
        match *self {
            ToleranceClass::ExactForm | ToleranceClass::NegativeControl => EXACT_FORM_TOL,
            ToleranceClass::Special => SPECIAL_TOL,
            ToleranceClass::GeometricSeries { r, terms } => {
                geometric_invariance_bound(r, terms, p.x.to_f64(), p.y.to_f64(), p.n)
                    .unwrap_or(f64::INFINITY)
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ToleranceClass::ExactForm => "exact-form",
            ToleranceClass::Special => "special",
            ToleranceClass::GeometricSeries { .. } => "series-tail",
            ToleranceClass::NegativeControl => "negative-control",
        }
    }
}

/// Static description of a family.
#[derive(Clone, Copy, Debug)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub summary: &'static str,
    pub example: &'static str,
}

/// Every family, in listing order.
pub const FAMILIES: &[FamilyInfo] = &[
    FamilyInfo { name: "euler", params: &["m"], summary: "y^m E_m(x/y), m = 0..64", example: "euler:m=3" },
    FamilyInfo { name: "zeta", params: &["s"], summary: "y^(-s) zeta_E(s, x/y), real s; x/y in Z<=0 excluded", example: "zeta:s=2" },
    FamilyInfo { name: "gamma-log", params: &[], summary: "log|Gamma~(x/y)/sqrt(y)| with double-factorial branches at x/y in Z<=0", example: "gamma-log" },
    FamilyInfo { name: "log-tan", params: &[], summary: "log|tan(pi x/2y)|; -(-1)^(x/y) log y at x/y in Z", example: "log-tan" },
    FamilyInfo { name: "csc", params: &[], summary: "csc(pi x/y)/y; 0 at x/y in Z", example: "csc" },
    FamilyInfo { name: "parity", params: &["a"], summary: "(-1)^((a-x)/y) when (a-x)/y in Z, else 0", example: "parity:a=0" },
    FamilyInfo { name: "expfrac", params: &["a"], summary: "a^x/(a^y+1), a > 0, a != 1", example: "expfrac:a=2" },
    FamilyInfo { name: "trig-expfrac", params: &["r", "theta"], summary: "w^x/(w^y+1), w = r e^(i theta), complex valued; r > 0, r != 1", example: "trig-expfrac:r=2,theta=0.5" },
    FamilyInfo { name: "trig-expfrac-cos", params: &["r", "theta"], summary: "real part of trig-expfrac in closed form", example: "trig-expfrac-cos:r=2,theta=0.5" },
    FamilyInfo { name: "trig-expfrac-sin", params: &["r", "theta"], summary: "imaginary part of trig-expfrac in closed form", example: "trig-expfrac-sin:r=2,theta=0.5" },
    FamilyInfo { name: "geom", params: &["r"], summary: "r^(1/y) e^(i pi x/y)/(y(1 - r^(2/y) e^(2 i pi x/y))), complex valued; 0 < r < 1", example: "geom:r=0.5" },
    FamilyInfo { name: "geom-cos", params: &["r"], summary: "real part of geom in closed form", example: "geom-cos:r=0.5" },
    FamilyInfo { name: "geom-sin", params: &["r"], summary: "imaginary part of geom in closed form", example: "geom-sin:r=0.5" },
    FamilyInfo { name: "fourier-cos", params: &["r", "terms"], summary: "truncated cosine series (1/y) sum r^((2m+1)/y) cos(pi(2m+1)x/y)", example: "fourier-cos:r=0.5,terms=400" },
    FamilyInfo { name: "fourier-sin", params: &["r", "terms"], summary: "truncated sine series, as fourier-cos", example: "fourier-sin:r=0.5,terms=400" },
    FamilyInfo { name: "const", params: &["c"], summary: "the constant c", example: "const:c=1" },
    FamilyInfo { name: "x", params: &[], summary: "f(x, y) = x; NOT an invariant (negative control)", example: "x" },
];

fn family(name: &str) -> Option<&'static FamilyInfo> {
    FAMILIES.iter().find(|f| f.name == name)
}

/// A parsed builtin id: family plus named parameters in declared order.
#[derive(Clone, Debug, PartialEq)]
pub struct BuiltinId {
    family: &'static FamilyInfo,
    params: Vec<Scalar>,
}

impl PartialEq for FamilyInfo {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl BuiltinId {
    pub fn family(&self) -> &'static str {
        self.family.name
    }

    pub fn param(&self, key: &str) -> Option<&Scalar> {
        self.family
            .params
            .iter()
            .position(|k| *k == key)
            .map(|i| &self.params[i])
    }

    fn need(&self, key: &str) -> &Scalar {
        self.param(key).expect("parser fills every declared parameter")
    }
}

impl fmt::Display for BuiltinId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family.name)?;
        for (i, (k, v)) in self.family.params.iter().zip(&self.params).enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ':' } else { ',' })?;
        }
        Ok(())
    }
}

impl FromStr for BuiltinId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = match s.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (s, None),
        };
        let info = family(name).ok_or_else(|| argument(format!("unknown builtin family '{name}'")))?;
        let mut slots: Vec<Option<Scalar>> = vec![None; info.params.len()];
        if let Some(rest) = rest {
            let mut next = 0usize;
            for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let (idx, raw) = match item.split_once('=') {
                    Some((k, v)) => {
                        let k = k.trim();
                        let i = info.params.iter().position(|p| *p == k).ok_or_else(|| {
                            argument(format!("'{name}' has no parameter '{k}'"))
                        })?;
                        (i, v.trim())
                    }
                    None => {
                        let i = next;
                        next += 1;
                        (i, item)
                    }
                };
                if idx >= slots.len() {
                    return Err(argument(format!("too many parameters for '{name}'")));
                }
                if slots[idx].is_some() {
                    return Err(argument(format!("parameter '{}' given twice", info.params[idx])));
                }
                let v: Scalar = raw.parse()?;
                if !v.is_finite() {
                    return Err(argument(format!("parameter '{}' must be finite", info.params[idx])));
                }
                slots[idx] = Some(v);
            }
        }
        let params = slots
            .into_iter()
            .zip(info.params)
            .map(|(v, k)| v.ok_or_else(|| argument(format!("'{name}' needs parameter '{k}'"))))
            .collect::<Result<Vec<_>>>()?;
        let id = BuiltinId { family: info, params };
        validate(&id)?;
        Ok(id)
    }
}

fn nonneg_int(v: &Scalar, key: &str) -> Result<i64> {
    match v.as_exact() {
        Some(r) if r.is_integer() && !r.is_negative() => r
            .to_integer()
            .to_i64()
            .ok_or_else(|| argument(format!("{key} too large"))),
        _ => Err(argument(format!("{key} must be a nonnegative integer, got {v}"))),
    }
}

fn validate(id: &BuiltinId) -> Result<()> {
    let one = |v: &Scalar| v.to_f64() == 1.0;
    match id.family() {
        "euler" => {
            let m = nonneg_int(id.need("m"), "m")?;
            if m as usize > EULER_DEGREE_CAP {
                return Err(argument(format!("euler degree {m} exceeds cap {EULER_DEGREE_CAP}")));
            }
        }
        "expfrac" => {
            let a = id.need("a");
            if !a.is_positive() || one(a) {
                return Err(argument(format!("expfrac needs a > 0 and a != 1, got {a}")));
            }
        }
        "trig-expfrac" | "trig-expfrac-cos" | "trig-expfrac-sin" => {
            let r = id.need("r");
            if !r.is_positive() || one(r) {
                return Err(argument(format!("{} needs r > 0 and r != 1, got {r}", id.family())));
            }
        }
        "geom" | "geom-cos" | "geom-sin" | "fourier-cos" | "fourier-sin" => {
            let r = id.need("r").to_f64();
            if !(r > 0.0 && r < 1.0) {
                return Err(argument(format!("{} needs 0 < r < 1, got {r}", id.family())));
            }
            if id.family().starts_with("fourier") {
                let t = nonneg_int(id.need("terms"), "terms")?;
                if !(1..=1_000_000).contains(&t) {
                    return Err(argument(format!("terms must lie in 1..=1000000, got {t}")));
                }
            }
        }
        _ => {}
    }
    Ok(())
}

/// `u mod period` in `[0, period)`, reduced exactly for rational `u`.
fn reduce(u: &Scalar, period: i64) -> f64 {
    match u {
        Scalar::Exact(r) => {
            let p = BigRational::from_integer(period.into());
            let q = (r / &p).floor();
            crate::scalar::rational_to_f64(&(r - q * p))
        }
        Scalar::Float(v) => v.rem_euclid(period as f64),
    }
}

fn sign_of(k: i64) -> f64 {
    if k.is_even() {
        1.0
    } else {
        -1.0
    }
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `log|tan(πx/2y)|`, with `−(−1)^{x/y} log y` on the lattice.
pub fn log_tan() -> BivariateFn {
    BivariateFn::new("log-tan", |x: &Scalar, y: &Scalar| {
        let u = x.div(y);
        Ok(re(match u.nearest_integer() {
            Some(k) => -sign_of(k) * y.to_f64().ln(),
            None => (0.5 * PI * reduce(&u, 2)).tan().abs().ln(),
        }))
    })
    .with_note(DomainNote::lattice(Exclusion::None))
    .with_derivative(|| csc().scaled(re(PI)))
}

/// `csc(πx/y)/y`, with `0` on the lattice.
pub fn csc() -> BivariateFn {
    BivariateFn::new("csc", |x: &Scalar, y: &Scalar| {
        let u = x.div(y);
        Ok(re(match u.nearest_integer() {
            Some(_) => 0.0,
            None => 1.0 / (y.to_f64() * (PI * reduce(&u, 2)).sin()),
        }))
    })
    .with_note(DomainNote::lattice(Exclusion::None))
}

/// `(−1)^{(a−x)/y}` when `(a−x)/y ∈ ℤ`, otherwise `0`.
pub fn parity(a: Scalar) -> BivariateFn {
    let off = a.clone();
    BivariateFn::new(format!("parity:a={a}"), move |x: &Scalar, y: &Scalar| {
        Ok(re(match off.sub(x).div(y).nearest_integer() {
            Some(k) => sign_of(k),
            None => 0.0,
        }))
    })
    .with_note(DomainNote::shifted(a, Exclusion::None))
}

fn expfrac_value(la: f64, x: f64, y: f64) -> f64 {
    // a^x/(a^y+1) without overflowing a^y
    if y * la > 0.0 {
        ((x - y) * la).exp() / (1.0 + (-y * la).exp())
    } else {
        (x * la).exp() / ((y * la).exp() + 1.0)
    }
}

/// `a^x/(a^y + 1)`.
pub fn expfrac(a: f64) -> BivariateFn {
    let la = a.ln();
    BivariateFn::real(format!("expfrac:a={a}"), move |x, y| expfrac_value(la, x, y))
        .with_derivative(move || expfrac(a).scaled(re(la)))
}

/// `w^x/(w^y + 1)` with `w^x = r^x e^{ixθ}`.
pub fn trig_expfrac(r: f64, theta: f64) -> BivariateFn {
    let w = Complex64::new(r.ln(), theta);
    BivariateFn::new(format!("trig-expfrac:r={r},theta={theta}"), move |x: &Scalar, y: &Scalar| {
        let (x, y) = (x.to_f64(), y.to_f64());
        let (wx, wy) = ((w * x).exp(), (w * y).exp());
        // divide through by w^y when |w^y| > 1
        Ok(if wy.norm() > 1.0 {
            (w * (x - y)).exp() / (1.0 + (-w * y).exp())
        } else {
            wx / (wy + 1.0)
        })
    })
    .with_derivative(move || trig_expfrac(r, theta).scaled(w))
}

fn trig_closed(r: f64, theta: f64, x: f64, y: f64, imag: bool) -> f64 {
    let trig = |t: f64| if imag { t.sin() } else { t.cos() };
    let (rx, ry) = (r.powf(x), r.powf(y));
    let num = rx * ry * trig((x - y) * theta) + rx * trig(x * theta);
    num / (1.0 + 2.0 * ry * (y * theta).cos() + ry * ry)
}

/// Closed form of the real (`imag = false`) or imaginary part of
/// [`trig_expfrac`].
pub fn trig_expfrac_part(r: f64, theta: f64, imag: bool) -> BivariateFn {
    let name = if imag { "trig-expfrac-sin" } else { "trig-expfrac-cos" };
    BivariateFn::real(format!("{name}:r={r},theta={theta}"), move |x, y| {
        trig_closed(r, theta, x, y, imag)
    })
    .with_derivative(move || {
        let d = trig_expfrac(r, theta).scaled(Complex64::new(r.ln(), theta));
        if imag {
            imag_part(&d)
        } else {
            real_part(&d)
        }
    })
}

fn geom_parts(r: f64, x: &Scalar, y: &Scalar) -> (f64, f64, f64, f64) {
    let yf = y.to_f64();
    let u = reduce(&x.div(y), 2);
    (r.powf(1.0 / yf), r.powf(2.0 / yf), u, yf)
}

/// `r^{1/y} e^{iπx/y} / (y(1 − r^{2/y} e^{2πix/y}))`.
pub fn geom(r: f64) -> BivariateFn {
    BivariateFn::new(format!("geom:r={r}"), move |x: &Scalar, y: &Scalar| {
        let (p, q, u, yf) = geom_parts(r, x, y);
        let z = Complex64::from_polar(1.0, PI * u);
        Ok(p * z / (yf * (1.0 - q * z * z)))
    })
    .with_derivative(move || geom_dx(r))
}

fn geom_dx(r: f64) -> BivariateFn {
    BivariateFn::new(format!("d/dx geom:r={r}"), move |x: &Scalar, y: &Scalar| {
        let (p, q, u, yf) = geom_parts(r, x, y);
        let z = Complex64::from_polar(1.0, PI * u);
        let z2 = q * z * z;
        Ok(Complex64::new(0.0, PI / yf) * p * z * (1.0 + z2) / (yf * (1.0 - z2) * (1.0 - z2)))
    })
}

/// Closed form of the real or imaginary part of [`geom`].
pub fn geom_part(r: f64, imag: bool) -> BivariateFn {
    let name = if imag { "geom-sin" } else { "geom-cos" };
    BivariateFn::new(format!("{name}:r={r}"), move |x: &Scalar, y: &Scalar| {
        let (p, q, u, yf) = geom_parts(r, x, y);
        let den = yf * (1.0 - 2.0 * q * (2.0 * PI * u).cos() + q * q);
        Ok(re(if imag {
            (PI * u).sin() * (1.0 + q) * p / den
        } else {
            (PI * u).cos() * (1.0 - q) * p / den
        }))
    })
    .with_derivative(move || if imag { imag_part(&geom_dx(r)) } else { real_part(&geom_dx(r)) })
}

/// The constant `c`, exact when `c` is.
pub fn constant(c: &Scalar) -> BivariateFn {
    let v = c.to_f64();
    let f = BivariateFn::constant(re(v)).renamed(format!("const:c={c}"));
    match c.to_rational() {
        Some(q) => f.with_exact(move |_, _| q.clone()),
        None => f,
    }
}

/// `f(x, y) = x`, which is not an alternating invariant.
pub fn negative_control() -> BivariateFn {
    BivariateFn::new("x", |x: &Scalar, _: &Scalar| Ok(re(x.to_f64())))
        .with_exact(|x, _| x.clone())
        .with_derivative(|| BivariateFn::constant(re(1.0)))
}

/// Builds the function named by `id`.
pub fn make_builtin(id: &BuiltinId) -> Result<BivariateFn> {
    let f = |k: &str| id.need(k).to_f64();
    let f = match id.family() {
        "euler" => euler_invfn(nonneg_int(id.need("m"), "m")? as usize)?,
        "zeta" => zeta_invfn(re(f("s"))),
        "gamma-log" => gamma_invfn(),
        "log-tan" => log_tan(),
        "csc" => csc(),
        "parity" => parity(id.need("a").clone()),
        "expfrac" => expfrac(f("a")),
        "trig-expfrac" => trig_expfrac(f("r"), f("theta")),
        "trig-expfrac-cos" => trig_expfrac_part(f("r"), f("theta"), false),
        "trig-expfrac-sin" => trig_expfrac_part(f("r"), f("theta"), true),
        "geom" => geom(f("r")),
        "geom-cos" => geom_part(f("r"), false),
        "geom-sin" => geom_part(f("r"), true),
        "fourier-cos" | "fourier-sin" => {
            let r = f("r");
            let terms = nonneg_int(id.need("terms"), "terms")?;
            let (c, s) = odd_fourier_series(Arc::new(move |u| r.powf(u)), terms)?;
            if id.family() == "fourier-cos" {
                c
            } else {
                s
            }
        }
        "const" => constant(id.need("c")),
        "x" => negative_control(),
        other => return Err(argument(format!("unknown builtin family '{other}'"))),
    };
    Ok(f.renamed(id.to_string()))
}

/// Parses and builds in one step.
pub fn builtin(id: &str) -> Result<BivariateFn> {
    make_builtin(&id.parse()?)
}

/// Tolerance class of a builtin.
pub fn tolerance_class(id: &BuiltinId) -> ToleranceClass {
    match id.family() {
        "zeta" | "gamma-log" => ToleranceClass::Special,
        "fourier-cos" | "fourier-sin" => ToleranceClass::GeometricSeries {
            r: id.need("r").to_f64(),
            terms: nonneg_int(id.need("terms"), "terms").unwrap_or(1) as u64,
        },
        "x" => ToleranceClass::NegativeControl,
        _ => ToleranceClass::ExactForm,
    }
}

/// The ids verified by default: every family except the negative control,
/// with representative parameters.
pub const DEFAULT_REGISTRY: &[&str] = &[
    "euler:m=0",
    "euler:m=1",
    "euler:m=3",
    "euler:m=6",
    "zeta:s=2",
    "zeta:s=1/2",
    "zeta:s=-3/2",
    "gamma-log",
    "log-tan",
    "csc",
    "parity:a=0",
    "parity:a=1/3",
    "expfrac:a=2",
    "expfrac:a=1/2",
    "trig-expfrac:r=2,theta=1/2",
    "trig-expfrac-cos:r=2,theta=1/2",
    "trig-expfrac-sin:r=2,theta=1/2",
    "trig-expfrac-cos:r=1/2,theta=11/10",
    "geom:r=1/2",
    "geom-cos:r=1/2",
    "geom-sin:r=1/2",
    "fourier-cos:r=1/2,terms=400",
    "fourier-sin:r=1/2,terms=400",
    "const:c=1",
];

/// Parsed [`DEFAULT_REGISTRY`].
pub fn default_registry() -> Vec<BuiltinId> {
    DEFAULT_REGISTRY
        .iter()
        .map(|s| s.parse().expect("default ids are valid"))
        .collect()
}

fn verify_each<T>(ids: &[BuiltinId], run: T) -> BTreeMap<String, InvarianceReport>
where
    T: Fn(&BuiltinId, &BivariateFn) -> Result<InvarianceReport> + Sync,
{
    ids.par_iter()
        .map(|id| {
            let name = id.to_string();
            let report = make_builtin(id).and_then(|f| run(id, &f));
            let report = report.unwrap_or_else(|e| InvarianceReport {
                function: name.clone(),
                entries: Vec::new(),
                skipped: Vec::new(),
                errors: vec![crate::invariance::SkippedPoint {
                    x: Scalar::int(0),
                    y: Scalar::int(1),
                    n: 1,
                    reason: e.to_string(),
                }],
                tolerance: 0.0,
                max_residual: f64::INFINITY,
                passed: false,
            });
            (name, report)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Invariance report for each id at a uniform tolerance.
pub fn registry_verify_all(ids: &[BuiltinId], grid: &Grid, tol: f64) -> BTreeMap<String, InvarianceReport> {
    verify_each(ids, |_, f| check_grid(f, grid, tol))
}

/// Invariance report for each id at its family tolerance.
pub fn registry_verify_by_family(ids: &[BuiltinId], grid: &Grid) -> BTreeMap<String, InvarianceReport> {
    verify_each(ids, |id, f| {
        let class = tolerance_class(id);
        check_grid_with(f, grid, |p| class.at(p))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::partial_x;

    fn at(id: &str, x: Scalar, y: Scalar) -> Complex64 {
        builtin(id).unwrap().eval(&x, &y).unwrap()
    }

    #[test]
    fn parse_forms() {
        let a: BuiltinId = "expfrac:a=2".parse().unwrap();
        let b: BuiltinId = "expfrac:2".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "expfrac:a=2");
        let t: BuiltinId = "trig-expfrac:theta=1/2,r=2".parse().unwrap();
        assert_eq!(t.to_string(), "trig-expfrac:r=2,theta=1/2");
        assert_eq!("csc".parse::<BuiltinId>().unwrap().to_string(), "csc");
        for bad in ["expfrac:a=1", "expfrac:a=-2", "expfrac", "geom:r=1.5", "trig-expfrac:1,0.3", "nope", "euler:m=1/2", "euler:m=65", "csc:1", "expfrac:b=2"] {
            assert!(bad.parse::<BuiltinId>().is_err(), "{bad}");
        }
    }

    #[test]
    fn spot_values() {
        let v = at("expfrac:a=2", Scalar::int(1), Scalar::int(1)).re;
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert!(at("log-tan", Scalar::ratio(1, 2), Scalar::int(1)).re.abs() < 1e-15);
        assert!((at("csc", Scalar::ratio(1, 2), Scalar::int(1)).re - 1.0).abs() < 1e-15);
        assert_eq!(at("parity:a=0", Scalar::int(3), Scalar::int(1)).re, -1.0);
        assert_eq!(at("parity:a=0", Scalar::float(0.3), Scalar::int(1)).re, 0.0);
        assert_eq!(at("csc", Scalar::int(2), Scalar::int(1)).re, 0.0);
        // x/y = 2: −(−1)^2 log y
        assert!((at("log-tan", Scalar::int(4), Scalar::int(2)).re + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn geom_matches_series() {
        let (fc, _) = odd_fourier_series(Arc::new(|u| 0.5f64.powf(u)), 400).unwrap();
        let a = at("geom:r=0.5", 0.3.into(), 1.0.into()).re;
        assert!((a - fc.eval_f64(0.3, 1.0).unwrap().re).abs() < 1e-12);
    }

    #[test]
    fn trig_closed_forms_match_generator() {
        for r in [0.5, 2.0] {
            for th in [0.3, 1.1] {
                let g = trig_expfrac(r, th);
                let (c, s) = (trig_expfrac_part(r, th, false), trig_expfrac_part(r, th, true));
                for (x, y) in [(0.3, 1.0), (-1.7, 0.5), (3.2, 2.0)] {
                    let v = g.eval_f64(x, y).unwrap();
                    assert!((v.re - c.eval_f64(x, y).unwrap().re).abs() < 1e-12);
                    assert!((v.im - s.eval_f64(x, y).unwrap().re).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn geom_closed_forms_match_generator() {
        for r in [0.5, 0.9] {
            let g = geom(r);
            for (x, y) in [(0.3, 1.0), (-1.7, 0.5), (3.2, 2.0)] {
                let v = g.eval_f64(x, y).unwrap();
                assert!((v.re - geom_part(r, false).eval_f64(x, y).unwrap().re).abs() < 1e-12);
                assert!((v.im - geom_part(r, true).eval_f64(x, y).unwrap().re).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn log_tan_derivative_is_pi_csc() {
        let d = crate::combinators::numeric_partial_x(&log_tan());
        let c = csc();
        for (x, y) in [(0.3, 1.0), (0.7, 2.0), (-1.7, 0.5)] {
            let want = PI * c.eval_f64(x, y).unwrap().re;
            assert!((d.eval_f64(x, y).unwrap().re - want).abs() < 1e-8);
            assert!((partial_x(&log_tan()).eval_f64(x, y).unwrap().re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn analytic_derivatives_agree_with_differences() {
        for id in ["expfrac:a=2", "trig-expfrac:r=2,theta=0.5", "trig-expfrac-sin:r=2,theta=0.5", "geom:r=0.5", "geom-cos:r=0.5", "zeta:s=2"] {
            let f = builtin(id).unwrap();
            let a = partial_x(&f).eval_f64(0.3, 1.0).unwrap();
            let n = crate::combinators::numeric_partial_x(&f).eval_f64(0.3, 1.0).unwrap();
            assert!((a - n).norm() < 1e-8, "{id}: {:e}", (a - n).norm());
        }
    }

    #[test]
    fn check_invariance_example() {
        let f = builtin("expfrac:a=2").unwrap();
        let xs = [Scalar::float(0.1), Scalar::float(0.9)];
        let r = crate::check_invariance(&f, &xs, &[Scalar::int(1)], &[1, 3, 5], 1e-10).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn negative_control_fails() {
        let ids = vec!["x".parse().unwrap()];
        let reports = registry_verify_all(&ids, &Grid::default_grid(), 1e-8);
        assert!(!reports["x"].passed);
        assert!(reports["x"].max_residual >= 0.5);
    }

    #[test]
    fn closed_form_families_pass_by_family() {
        let ids: Vec<BuiltinId> = default_registry()
            .into_iter()
            .filter(|id| tolerance_class(id) == ToleranceClass::ExactForm)
            .collect();
        let reports = registry_verify_by_family(&ids, &Grid::default_grid());
        for (name, r) in reports {
            assert!(r.passed, "{name}: max {:e}, errors {:?}", r.max_residual, r.errors);
            assert!(!r.entries.is_empty());
        }
    }
}
