use altinv_bench::SAMPLE_XS;
use altinv_core::builtins::{builtin, default_registry, registry_verify_by_family};
use altinv_core::convolution::{convolve_at, normalized_euler};
use altinv_core::euler::{euler_convolution_identity_residual, euler_poly};
use altinv_core::gamma_tilde::log_gamma_tilde;
use altinv_core::quadrature::QuadratureConfig;
use altinv_core::zeta::{zeta_e, Regime, ZetaParams};
use altinv_core::{check_grid, BigRational, Complex64, Grid, Scalar};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn zeta_regimes(c: &mut Criterion) {
    let mut g = c.benchmark_group("zeta_e");
    for (regime, s) in [(Regime::Series, 2.0), (Regime::Boole, 0.3), (Regime::Fourier, 0.3), (Regime::NegInt, -3.0)] {
        g.bench_with_input(BenchmarkId::new(regime.to_string(), s), &s, |b, &s| {
            b.iter(|| {
                for &x in &SAMPLE_XS {
                    let p = ZetaParams::new(Complex64::new(s, 0.0), Complex64::new(x, 0.0)).with_regime(regime);
                    black_box(zeta_e(&p).ok());
                }
            })
        });
    }
    g.finish();
}

fn gamma_tilde(c: &mut Criterion) {
    let mut g = c.benchmark_group("log_gamma_tilde");
    for tol in [1e-6, 1e-9] {
        g.bench_with_input(BenchmarkId::from_parameter(tol), &tol, |b, &tol| {
            b.iter(|| SAMPLE_XS.iter().map(|&x| log_gamma_tilde(x, tol).unwrap().log_abs).sum::<f64>())
        });
    }
    g.finish();
}

fn euler_exact(c: &mut Criterion) {
    let x = BigRational::new(7.into(), 13.into());
    c.bench_function("euler_poly_cached_32", |b| b.iter(|| euler_poly(black_box(32)).unwrap().degree()));
    c.bench_function("euler_convolution_identity_6x6", |b| {
        b.iter(|| euler_convolution_identity_residual(6, 6, black_box(&x)).unwrap())
    });
}

fn convolution(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let (g, h) = (normalized_euler(2).unwrap(), builtin("expfrac:a=2").unwrap());
    let (x, y) = (Scalar::float(0.7), Scalar::float(1.3));
    c.bench_function("convolve_at_euler_expfrac", |b| b.iter(|| convolve_at(&g, &h, black_box(&x), &y, &cfg).unwrap()));
}

fn invariance(c: &mut Criterion) {
    let grid = Grid::default_grid();
    let f = builtin("zeta:s=2").unwrap();
    c.bench_function("check_grid_zeta_default", |b| b.iter(|| check_grid(&f, &grid, 1e-8).unwrap().max_residual));
    let ids = default_registry();
    let mut g = c.benchmark_group("registry");
    g.sample_size(10);
    g.bench_function("verify_by_family", |b| b.iter(|| registry_verify_by_family(&ids, &grid).len()));
    g.finish();
}

criterion_group!(benches, zeta_regimes, gamma_tilde, euler_exact, convolution, invariance);
criterion_main!(benches);
