//! Property tests for the invariants that hold for every input.

use altinv_core::builtins::builtin;
use altinv_core::combinators::{reflect, translate_scale};
use altinv_core::convolution::{convolve_at, normalized_euler};
use altinv_core::euler::{euler_distribution_residual, euler_invfn, euler_poly};
use altinv_core::gamma_tilde::{distribution_residual, recurrence_residual};
use altinv_core::quadrature::QuadratureConfig;
use altinv_core::zeta::{zeta_difference_residual, Regime};
use altinv_core::{invariance_residual, BigRational, Complex64, Scalar};
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = BigRational> {
    (-200i64..200, 1i64..40).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn odd() -> impl Strategy<Value = i64> {
    (0i64..8).prop_map(|k| 2 * k + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_distribution_is_exact(m in 0usize..12, x in rational(), n in odd()) {
        prop_assert!(euler_distribution_residual(m, &x, n).unwrap().is_zero());
    }

    #[test]
    fn euler_invfn_invariance_is_exact(m in 0usize..10, x in rational(), y in rational(), n in odd()) {
        prop_assume!(y > BigRational::zero());
        let f = euler_invfn(m).unwrap();
        let r = invariance_residual(&f, &Scalar::Exact(x), &Scalar::Exact(y), n).unwrap();
        prop_assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn euler_reflection_pointwise(m in 0usize..16, x in rational()) {
        let e = euler_poly(m).unwrap();
        let one = BigRational::from_integer(1.into());
        let lhs = e.eval_exact(&(&one - &x));
        let rhs = e.eval_exact(&x) * BigRational::from_integer(if m % 2 == 0 { 1 } else { -1 }.into());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reflect_is_an_involution(x in -5.0f64..5.0, y in 0.1f64..4.0) {
        let f = builtin("expfrac:a=2").unwrap();
        let twice = reflect(&reflect(&f));
        let (a, b) = (f.eval_f64(x, y).unwrap(), twice.eval_f64(x, y).unwrap());
        prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
    }

    #[test]
    fn identity_translate_scale_is_identity(x in -5.0f64..5.0, y in 0.1f64..4.0) {
        let f = builtin("trig-expfrac:r=2,theta=1/2").unwrap();
        let g = translate_scale(&f, 1.0, &Scalar::int(0), &Scalar::int(1)).unwrap();
        let (a, b) = (f.eval_f64(x, y).unwrap(), g.eval_f64(x, y).unwrap());
        prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
    }

    #[test]
    fn translate_scale_preserves_invariance(
        a in -3.0f64..3.0, b in -2.0f64..2.0, c in 0.25f64..3.0,
        x in -2.0f64..2.0, y in 0.2f64..1.5, n in odd(),
    ) {
        let f = builtin("expfrac:a=1/2").unwrap();
        let g = translate_scale(&f, a, &Scalar::float(b), &Scalar::float(c)).unwrap();
        let r = invariance_residual(&g, &Scalar::float(x), &Scalar::float(y), n).unwrap();
        prop_assert!(r.residual <= 1e-9 * (1.0 + a.abs()) * (1.0 + r.rhs.norm()), "{r:?}");
    }

    #[test]
    fn trig_invariance_under_random_parameters(
        r in 0.3f64..3.0, theta in -2.0f64..2.0, x in -2.0f64..2.0, y in 0.2f64..1.5, n in odd(),
    ) {
        prop_assume!((r - 1.0).abs() > 0.05);
        let f = builtin(&format!("trig-expfrac:r={r},theta={theta}")).unwrap();
        let res = invariance_residual(&f, &Scalar::float(x), &Scalar::float(y), n);
        // near a pole of 1/(w^y+1) the value itself blows up; skip those
        if let Ok(res) = res {
            prop_assert!(res.residual <= 1e-9 * (1.0 + res.rhs.norm()), "{res:?}");
        }
    }

    #[test]
    fn zeta_difference_equation(s in -2.5f64..3.0, x in 0.15f64..2.5) {
        let r = zeta_difference_residual(Complex64::new(s, 0.0), x, Regime::Auto, 1e-11).unwrap();
        prop_assert!(r <= 1e-8, "s={s} x={x}: {r:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gamma_tilde_recurrence(x in 0.1f64..4.0, n in 1u32..7) {
        let r = recurrence_residual(x, n, 1e-11).unwrap();
        prop_assert!(r <= 1e-9, "x={x} n={n}: {r:e}");
    }

    #[test]
    fn gamma_tilde_distribution(x in 0.2f64..2.0, n in odd().prop_filter("small", |n| *n <= 7)) {
        let r = distribution_residual(x, n, 1e-11).unwrap();
        prop_assert!(r <= 1e-8, "x={x} n={n}: {r:e}");
    }

    #[test]
    fn convolution_is_bilinear(
        a in -2.0f64..2.0, b in -2.0f64..2.0, x in -1.5f64..2.5, y in 0.3f64..2.0,
    ) {
        let cfg = QuadratureConfig::default();
        let (g1, g2, h) = (normalized_euler(1).unwrap(), normalized_euler(2).unwrap(), normalized_euler(3).unwrap());
        let mix = g1.scaled(Complex64::new(a, 0.0)).plus(&g2.scaled(Complex64::new(b, 0.0)));
        let (xs, ys) = (Scalar::float(x), Scalar::float(y));
        let lhs = convolve_at(&mix, &h, &xs, &ys, &cfg).unwrap().value;
        let rhs = convolve_at(&g1, &h, &xs, &ys, &cfg).unwrap().value * a
            + convolve_at(&g2, &h, &xs, &ys, &cfg).unwrap().value * b;
        prop_assert!((lhs - rhs).norm() <= 1e-10, "{lhs} vs {rhs}");
    }
}
