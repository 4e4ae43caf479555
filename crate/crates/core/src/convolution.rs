//! The convolution
//! `(g∗h)(x,y) = ∫₀ˣ g(t,y) h(x−t,y) dt − ∫ₓʸ g(t,y) h(x+y−t,y) dt`,
//! with oriented integrals so that every real `x` is allowed.

use num_complex::Complex64;

use crate::error::{argument, Result};
use crate::euler::euler_invfn;
use crate::function::BivariateFn;
use crate::invariance::{check_grid_with, Grid, InvarianceReport};
pub use crate::quadrature::{Integral, QuadratureConfig};
use crate::quadrature::integrate;
use crate::scalar::Scalar;

fn lattice_breaks(f: &BivariateFn, y: f64, lo: f64, hi: f64) -> Vec<f64> {
    f.domain_note()
        .map(|n| n.breakpoints(y, lo, hi))
        .unwrap_or_default()
}

/// `(g∗h)(x, y)` with the summed error estimate of both integrals.
pub fn convolve_at(g: &BivariateFn, h: &BivariateFn, x: &Scalar, y: &Scalar, cfg: &QuadratureConfig) -> Result<Integral> {
    if !y.is_positive() {
        return Err(argument("convolution needs y > 0"));
    }
    let (xf, yf) = (x.to_f64(), y.to_f64());
    let ys = Scalar::Float(yf);

    // ∫₀ˣ g(t) h(x − t) dt; breaks where t or x − t hits a lattice point
    let mut b1 = lattice_breaks(g, yf, 0.0, xf);
    b1.extend(lattice_breaks(h, yf, 0.0, xf).into_iter().map(|p| xf - p));
    let first = integrate(
        |t| Ok(g.eval(&Scalar::Float(t), &ys)? * h.eval(&Scalar::Float(xf - t), &ys)?),
        0.0,
        xf,
        &b1,
        cfg,
    )?;

    // ∫ₓʸ g(t) h(x + y − t) dt
    let shift = xf + yf;
    let mut b2 = lattice_breaks(g, yf, xf, yf);
    b2.extend(lattice_breaks(h, yf, xf, yf).into_iter().map(|p| shift - p));
    let second = integrate(
        |t| Ok(g.eval(&Scalar::Float(t), &ys)? * h.eval(&Scalar::Float(shift - t), &ys)?),
        xf,
        yf,
        &b2,
        cfg,
    )?;
    Ok(Integral {
        value: first.value - second.value,
        est_error: first.est_error + second.est_error,
        panels: first.panels + second.panels,
    })
}

/// `g∗h` as a function of `(x, y)`.
pub fn convolve(g: &BivariateFn, h: &BivariateFn, cfg: QuadratureConfig) -> BivariateFn {
    let (g2, h2) = (g.clone(), h.clone());
    BivariateFn::new(format!("conv({},{})", g.name(), h.name()), move |x, y| {
        Ok(convolve_at(&g2, &h2, x, y, &cfg)?.value)
    })
}

/// `g∗h` restricted to a fixed `y`, as `x ↦ (value, error estimate)`.
pub fn convolve_fixed_y(
    g: &BivariateFn,
    h: &BivariateFn,
    y: f64,
    cfg: QuadratureConfig,
) -> Result<impl Fn(&Scalar) -> Result<Integral>> {
    if !(y > 0.0) {
        return Err(argument("convolution needs y > 0"));
    }
    let (g, h) = (g.clone(), h.clone());
    let ys = Scalar::Float(y);
    Ok(move |x: &Scalar| convolve_at(&g, &h, x, &ys, &cfg))
}

/// Invariance report of `g∗h`; a point with modulus `n` passes at
/// `tol + n·cfg.abs_tol`.
pub fn convolution_closure_report(
    g: &BivariateFn,
    h: &BivariateFn,
    grid: &Grid,
    cfg: &QuadratureConfig,
    tol: f64,
) -> Result<InvarianceReport> {
    cfg.validate()?;
    let conv = convolve(g, h, *cfg);
    let abs = cfg.abs_tol;
    check_grid_with(&conv, grid, move |p| tol + p.n as f64 * abs)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `y^m E_m(x/y) / (2·m!)`.
pub fn normalized_euler(m: usize) -> Result<BivariateFn> {
    Ok(euler_invfn(m)?.scaled(Complex64::new(1.0 / (2.0 * factorial(m)), 0.0)))
}

/// Quadrature residual of the Euler convolution identity
/// `(y^mE_m/(2m!)) ∗ (y^nE_n/(2n!)) = y^{m+n+1}E_{m+n+1}(x/y)/(2(m+n+1)!)`.
pub fn euler_convolution_numeric_residual(m: usize, n: usize, x: f64, y: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(argument("the convolution identity needs m, n ≥ 1"));
    }
    let lhs = convolve_at(&normalized_euler(m)?, &normalized_euler(n)?, &x.into(), &y.into(), cfg)?;
    let rhs = normalized_euler(m + n + 1)?.eval_f64(x, y)?;
    Ok((lhs.value - rhs).norm())
}

/// `|∫₀¹ t^{α−1}(1−t)^{β−1} dt − Γ(α)Γ(β)/Γ(α+β)|`.
pub fn beta_function_residual(alpha: f64, beta: f64, cfg: &QuadratureConfig) -> Result<f64> {
    use crate::special::gamma_real;
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(argument("beta function needs positive parameters"));
    }
    let i = integrate(
        |t| Ok(Complex64::new(t.powf(alpha - 1.0) * (1.0 - t).powf(beta - 1.0), 0.0)),
        0.0,
        1.0,
        &[],
        cfg,
    )?;
    let exact = gamma_real(alpha) * gamma_real(beta) / gamma_real(alpha + beta);
    Ok((i.value.re - exact).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::euler_eval;

    fn one() -> BivariateFn {
        BivariateFn::constant(Complex64::new(1.0, 0.0))
    }

    #[test]
    fn constants_give_two_x_minus_y() {
        let cfg = QuadratureConfig::default();
        for (x, y) in [(0.25, 1.0), (-1.7, 0.5), (3.2, 2.0)] {
            let v = convolve_at(&one(), &one(), &x.into(), &y.into(), &cfg).unwrap().value;
            assert!((v.re - (2.0 * x - y)).abs() < 1e-13);
        }
    }

    #[test]
    fn halved_first_euler_self_convolution() {
        let f = euler_invfn(1).unwrap().scaled(Complex64::new(0.5, 0.0));
        let v = convolve_at(&f, &f, &0.25.into(), &1.0.into(), &QuadratureConfig::default()).unwrap().value;
        let e3 = euler_eval(3, &Scalar::ratio(1, 4)).unwrap().to_f64();
        assert!((v.re - e3 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn zero_kernel() {
        let f = euler_invfn(2).unwrap();
        let v = convolve_at(&f, &BivariateFn::zero(), &0.7.into(), &1.0.into(), &QuadratureConfig::default()).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn euler_numeric_examples() {
        let cfg = QuadratureConfig::default();
        assert!(euler_convolution_numeric_residual(1, 1, 0.25, 1.0, &cfg).unwrap() <= 1e-10);
        assert!(euler_convolution_numeric_residual(3, 2, 0.8, 2.0, &cfg).unwrap() <= 1e-10);
        assert!(euler_convolution_numeric_residual(2, 3, -1.3, 1.0, &cfg).unwrap() <= 1e-9);
        assert!(euler_convolution_numeric_residual(2, 2, 0.0, 0.5, &cfg).unwrap() <= 1e-9);
    }

    #[test]
    fn beta_sanity() {
        let cfg = QuadratureConfig::default();
        for (a, b) in [(2.0, 2.0), (1.5, 2.5), (3.0, 1.2)] {
            assert!(beta_function_residual(a, b, &cfg).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn bilinear() {
        let cfg = QuadratureConfig::default();
        let g = euler_invfn(2).unwrap();
        let h = crate::zeta::zeta_invfn(Complex64::new(-1.5, 0.0));
        let a = Complex64::new(-2.5, 0.0);
        let lhs = convolve_at(&g.scaled(a), &h, &0.3.into(), &1.0.into(), &cfg).unwrap().value;
        let rhs = a * convolve_at(&g, &h, &0.3.into(), &1.0.into(), &cfg).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
