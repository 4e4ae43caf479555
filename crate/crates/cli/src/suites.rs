//! The `verify` suites. Each returns report entries in a fixed order; a
//! failing evaluation becomes a failed entry rather than aborting the run.

use std::f64::consts::PI;

use altinv_core::builtins::{builtin, default_registry, registry_verify_all, registry_verify_by_family, EXACT_FORM_TOL, SPECIAL_TOL};
use altinv_core::convolution::{beta_function_residual, convolution_closure_report, euler_convolution_numeric_residual, normalized_euler};
use altinv_core::euler::{
    abs_f64, difference_defect, euler_convolution_identity_residual, euler_distribution_residual,
    euler_integral, euler_integral_closed_form, euler_integral_same_side, euler_invfn, euler_poly,
    reflection_defect, triangular_defect,
};
use altinv_core::gamma_tilde::{distribution_residual, log_gamma_tilde, log_gamma_tilde_derivative, recurrence_residual};
use altinv_core::poly::Poly;
use altinv_core::quadrature::QuadratureConfig;
use altinv_core::special::gamma_real;
use altinv_core::zeta::{
    digamma_tilde, zeta_convolution_identity_residual, zeta_difference_residual,
    zeta_distribution_residual, zeta_e, Regime, ZetaParams, ZETA_E_1_1,
};
use altinv_core::{check_grid, BigRational, Complex64, Grid, Result, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::Entry;

/// Shared suite options.
pub struct SuiteOptions {
    /// Overrides every per-check tolerance when set.
    pub tol: Option<f64>,
    pub grid: Grid,
    pub seed: u64,
    /// `(α, β)` pairs for the zeta convolution identity.
    pub alpha_beta: Vec<(f64, f64)>,
}

impl SuiteOptions {
    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn rationals(&self, stream: u64, count: usize, lo: i64, hi: i64) -> Vec<BigRational> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        (0..count)
            .map(|_| {
                let q: i64 = rng.gen_range(1..=30);
                let p: i64 = rng.gen_range(lo * q..=hi * q);
                BigRational::new(p.into(), q.into())
            })
            .collect()
    }
}

pub const DEFAULT_ALPHA_BETA: [(f64, f64); 3] = [(2.0, 2.0), (1.5, 2.5), (3.0, 1.2)];

/// Measured entry, or a failed one carrying the error.
fn measure(check: String, tol: f64, r: Result<f64>) -> Entry {
    match r {
        Ok(v) => Entry::measured(check, v, tol),
        Err(e) => Entry::failed(check, tol, e),
    }
}

fn poly_defect(p: Result<Poly>) -> Result<f64> {
    Ok(p?.iter().map(abs_f64).fold(0.0, f64::max))
}

fn exact_zero(r: Result<BigRational>) -> Result<f64> {
    r.map(|v| abs_f64(&v))
}

fn grid_entries(out: &mut Vec<Entry>, name: &str, f: Result<altinv_core::BivariateFn>, grid: &Grid, tol: f64) {
    match f.and_then(|f| check_grid(&f, grid, tol)) {
        Ok(report) => out.extend(Entry::from_invariance(&report)),
        Err(e) => out.push(Entry::failed(name, tol, e)),
    }
}

pub fn euler_identities(o: &SuiteOptions) -> Vec<Entry> {
    let mut out = Vec::new();
    let exact = o.tol(0.0);
    for x in o.rationals(1, 20, -5, 5) {
        for m in 0..=10 {
            for n in [1u32, 3, 5, 7, 9] {
                let r = exact_zero(euler_distribution_residual(m, &x, n as i64));
                out.push(measure(format!("euler distribution m={m}"), exact, r).at(&x, None, Some(n)));
            }
        }
    }
    for m in 0..=20 {
        out.push(measure(format!("euler reflection m={m}"), exact, poly_defect(reflection_defect(m))));
        out.push(measure(format!("euler triangular m={m}"), exact, poly_defect(triangular_defect(m))));
        out.push(measure(format!("euler difference m={m}"), exact, poly_defect(difference_defect(m))));
    }
    for m in 1..=6 {
        for n in 1..=6 {
            let closed = euler_integral(m, n).and_then(|i| Ok(abs_f64(&(i - euler_integral_closed_form(m, n)?))));
            out.push(measure(format!("euler integral m={m} n={n}"), exact, closed));
            let sign = BigRational::from_integer(if n % 2 == 0 { 1 } else { -1 }.into());
            let flip = euler_integral(m, n).and_then(|i| Ok(abs_f64(&(euler_integral_same_side(m, n)? - i * sign))));
            out.push(measure(format!("euler integral sign m={m} n={n}"), exact, flip));
        }
    }
    for x in o.rationals(2, 10, -2, 3) {
        for m in 1..=6 {
            for n in 1..=6 {
                let r = exact_zero(euler_convolution_identity_residual(m, n, &x));
                out.push(measure(format!("euler convolution m={m} n={n}"), exact, r).at(&x, None, None));
            }
        }
    }
    for m in 0..=6 {
        grid_entries(&mut out, &format!("euler:m={m}"), euler_invfn(m), &o.grid, o.tol(EXACT_FORM_TOL));
    }
    out
}

fn zeta_at(s: Complex64, x: f64, regime: Regime) -> Result<Complex64> {
    Ok(zeta_e(&ZetaParams::new(s, Complex64::new(x, 0.0)).with_regime(regime).with_tol(1e-12))?.value)
}

pub fn zeta_identities(o: &SuiteOptions) -> Vec<Entry> {
    let mut out = Vec::new();
    let re = |v: f64| Complex64::new(v, 0.0);
    let l2 = zeta_at(re(1.0), 1.0, Regime::Auto).map(|v| (v - ZETA_E_1_1).norm());
    out.push(measure("zeta_E(1,1) = log 2".into(), o.tol(1e-10), l2).at(1, Some(&Scalar::int(1)), None));
    for m in 0..=3usize {
        for x in [0.1, 0.3, 0.5, 0.7, 0.95, 1.0] {
            for regime in [Regime::Auto, Regime::Fourier] {
                let r = euler_poly(m).and_then(|e| Ok((zeta_at(re(-(m as f64)), x, regime)? - 0.5 * e.eval_f64(x)).norm()));
                out.push(measure(format!("zeta_E(-{m},x) = E_{m}(x)/2 [{regime}]"), o.tol(1e-8), r).at(x, None, None));
            }
        }
    }
    for s in [re(-2.5), re(-1.0), re(0.5), re(1.0), re(2.0), Complex64::new(3.0, 1.0)] {
        for x in [0.2, 0.7, 1.3] {
            let r = zeta_difference_residual(s, x, Regime::Auto, 1e-10);
            out.push(measure(format!("zeta difference s={s}"), o.tol(1e-8), r).at(x, None, None));
        }
    }
    for s in [2.0, -1.5, 0.5] {
        for n in [1u32, 3, 5] {
            for x in [0.2, 0.3, 0.7] {
                let r = zeta_distribution_residual(re(s), x, n as i64, 1e-12);
                out.push(measure(format!("zeta distribution s={s}"), o.tol(1e-8), r).at(x, None, Some(n)));
            }
        }
    }
    for s in [re(0.1), re(0.25), re(0.4), Complex64::new(0.3, 0.5)] {
        for x in [0.2, 0.35, 0.5, 0.65, 0.8] {
            let r = zeta_at(s, x, Regime::Series).and_then(|a| Ok((a - zeta_at(s, x, Regime::Fourier)?).norm()));
            out.push(measure(format!("zeta series vs fourier s={s}"), o.tol(1e-7), r).at(x, None, None));
        }
    }
    for id in ["zeta:s=2", "zeta:s=1/2", "zeta:s=-3/2"] {
        grid_entries(&mut out, id, builtin(id), &o.grid, o.tol(SPECIAL_TOL));
    }
    out
}

/// `log|Γ̃(x)|` from the Gamma-function closed form, as an external oracle.
fn log_gamma_tilde_oracle(x: f64) -> f64 {
    (0.5 * PI.sqrt() * gamma_real(x / 2.0) / gamma_real((x + 1.0) / 2.0)).abs().ln()
}

pub fn gamma_identities(o: &SuiteOptions) -> Vec<Entry> {
    let mut out = Vec::new();
    for x in [0.3, 0.7, 1.2] {
        for n in 1..=6u32 {
            let r = recurrence_residual(x, n, 1e-11);
            out.push(measure("gamma-tilde recurrence".into(), o.tol(1e-9), r).at(x, None, Some(n)));
        }
    }
    for x in [0.26, 0.4, 1.1] {
        for n in [1u32, 3, 5] {
            let r = distribution_residual(x, n as i64, 1e-11);
            out.push(measure("gamma-tilde distribution".into(), o.tol(1e-8), r).at(x, None, Some(n)));
        }
    }
    for x in [0.5, 1.0, 1.5, 2.3] {
        let r = log_gamma_tilde_derivative(x, 1e-3, 1e-12).and_then(|d| Ok((d - digamma_tilde(x, 1e-13)?).abs()));
        out.push(measure("psi-tilde = (log gamma-tilde)'".into(), o.tol(1e-7), r).at(x, None, None));
    }
    for x in [-2.5, -0.6, 0.3, 1.0, 2.3, 4.2] {
        let check = "gamma-tilde truncation bound".to_string();
        match log_gamma_tilde(x, 1e-10) {
            Ok(v) => {
                let err = (v.log_abs - log_gamma_tilde_oracle(x)).abs();
                out.push(Entry::measured(check, err, v.est_error).at(x, None, None));
            }
            Err(e) => out.push(Entry::failed(check, 1e-10, e).at(x, None, None)),
        }
    }
    grid_entries(&mut out, "gamma-log", builtin("gamma-log"), &o.grid, o.tol(SPECIAL_TOL));
    out
}

pub fn invariance_all(o: &SuiteOptions) -> Vec<Entry> {
    let ids = default_registry();
    let reports = match o.tol {
        Some(t) => registry_verify_all(&ids, &o.grid, t),
        None => registry_verify_by_family(&ids, &o.grid),
    };
    let mut out: Vec<Entry> = reports.values().flat_map(Entry::from_invariance).collect();
    // the negative control must fail somewhere
    let control = registry_verify_all(&["x".parse().expect("valid id")], &o.grid, 1e-8);
    let ctl = &control["x"];
    let e = Entry::must_exceed("negative control x", ctl.max_residual, 0.5);
    out.push(e);
    out
}

pub fn convolution_theorems(o: &SuiteOptions) -> Vec<Entry> {
    let mut out = Vec::new();
    let cfg = QuadratureConfig::default();
    for x in o.rationals(2, 10, -2, 3) {
        for m in 1..=6 {
            for n in 1..=6 {
                let r = exact_zero(euler_convolution_identity_residual(m, n, &x));
                out.push(measure(format!("euler convolution exact m={m} n={n}"), o.tol(0.0), r).at(&x, None, None));
            }
        }
    }
    for m in 1..=4 {
        for n in 1..=4 {
            for (x, y) in [(0.25, 1.0), (-0.6, 1.0), (2.3, 1.5)] {
                let r = euler_convolution_numeric_residual(m, n, x, y, &cfg);
                out.push(measure(format!("euler convolution quadrature m={m} n={n}"), o.tol(1e-10), r).at(x, Some(&Scalar::float(y)), None));
            }
        }
    }
    for &(a, b) in &o.alpha_beta {
        out.push(measure(format!("beta function a={a} b={b}"), o.tol(1e-9), beta_function_residual(a, b, &cfg)));
        for (x, y) in [(0.4, 1.0), (0.7, 1.0), (1.3, 2.0)] {
            let r = zeta_convolution_identity_residual(a, b, x, y, 1e-10);
            out.push(measure(format!("zeta convolution a={a} b={b}"), o.tol(1e-6), r).at(x, Some(&Scalar::float(y)), None));
        }
    }
    let tol = o.tol(1e-8);
    let closure = normalized_euler(1)
        .and_then(|g| Ok((g, normalized_euler(2)?)))
        .and_then(|(g, h)| convolution_closure_report(&g, &h, &o.grid, &cfg, tol));
    match closure {
        Ok(report) => out.extend(Entry::from_invariance(&report)),
        Err(e) => out.push(Entry::failed("convolution closure", tol, e)),
    }
    out
}
