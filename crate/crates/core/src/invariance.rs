//! The invariance-residual engine.
//!
//! A function `f` is an alternating invariant when
//! `Σ_{r<n} (−1)^r f(x + r·y, n·y) = f(x, y)` for every odd `n ≥ 1`.
//! This module measures the defect of that identity on points and grids.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{argument, Error, Result};
use crate::function::BivariateFn;
use crate::scalar::{rational_to_f64, Scalar};

/// Left side, right side and absolute defect of one identity instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

impl Residual {
    pub fn new(lhs: Complex64, rhs: Complex64) -> Self {
        Residual {
            lhs,
            rhs,
            residual: (lhs - rhs).norm(),
        }
    }
}

pub(crate) fn check_odd(n: i64, what: &str) -> Result<u32> {
    if n <= 0 || n % 2 == 0 {
        return Err(argument(format!("{what} must be an odd positive integer, got {n}")));
    }
    u32::try_from(n).map_err(|_| argument(format!("{what} too large: {n}")))
}

/// `Σ_{r<n} (−1)^r f(x + r·y, n·y)` versus `f(x, y)`.
///
/// Shifted points are formed exactly when `x` and `y` are exact. Functions
/// with an exact evaluator (and no domain note) are summed exactly at the
/// rational value of the arguments, floats included.
pub fn invariance_residual(f: &BivariateFn, x: &Scalar, y: &Scalar, n: i64) -> Result<Residual> {
    let n = check_odd(n, "n")?;
    if !y.is_positive() {
        return Err(argument(format!("y must be positive, got {y}")));
    }
    // a finite float is an exact binary rational, so the exact path also
    // serves float grid points
    if f.has_exact() && f.domain_note().is_none() {
        if let (Some(xr), Some(yr)) = (x.to_rational(), y.to_rational()) {
            return Ok(exact_residual(f, &xr, &yr, n));
        }
    }
    let ny = y.mul_int(n as i64);
    let mut lhs = Complex64::new(0.0, 0.0);
    for r in 0..n {
        let v = f.eval(&x.add(&y.mul_int(r as i64)), &ny)?;
        if r % 2 == 0 {
            lhs += v;
        } else {
            lhs -= v;
        }
    }
    let rhs = f.eval(x, y)?;
    Ok(Residual::new(lhs, rhs))
}

fn exact_residual(f: &BivariateFn, x: &BigRational, y: &BigRational, n: u32) -> Residual {
    let ny = y * BigInt::from(n);
    let mut lhs = BigRational::zero();
    for r in 0..n {
        let v = f
            .eval_exact(&(x + y * BigInt::from(r)), &ny)
            .expect("exact evaluator present");
        if r % 2 == 0 {
            lhs += v;
        } else {
            lhs -= v;
        }
    }
    let rhs = f.eval_exact(x, y).expect("exact evaluator present");
    let c = |v: &BigRational| Complex64::new(rational_to_f64(v), 0.0);
    Residual {
        lhs: c(&lhs),
        rhs: c(&rhs),
        residual: rational_to_f64(&(lhs - rhs).abs()),
    }
}

/// One `(x, y, n)` sample of a verification grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub x: Scalar,
    pub y: Scalar,
    pub n: u32,
}

impl GridPoint {
    fn cmp_key(&self, other: &GridPoint) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
            .then_with(|| self.n.cmp(&other.n))
    }
}

/// A validated, sorted, nonempty list of grid points.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<GridPoint>,
}

/// `x` values of the default grid.
pub const DEFAULT_XS: [f64; 7] = [-1.7, -0.4, 0.3, 0.5, 0.9, 1.6, 3.2];
/// `y` values of the default grid.
pub const DEFAULT_YS: [f64; 3] = [0.5, 1.0, 2.0];
/// Moduli of the default grid.
pub const DEFAULT_NS: [u32; 4] = [1, 3, 5, 7];
/// Exact `(x, y)` pairs added to the default grid to hit integer ratios.
pub const DEFAULT_RATIONAL_PAIRS: [(i64, i64); 3] = [(1, 1), (-2, 1), (3, 2)];

impl Grid {
    /// Validates and sorts arbitrary points by `(x, y, n)`.
    pub fn from_points(mut points: Vec<GridPoint>) -> Result<Grid> {
        if points.is_empty() {
            return Err(argument("empty grid"));
        }
        for p in &points {
            check_odd(p.n as i64, "n")?;
            if !p.y.is_positive() {
                return Err(argument(format!("grid y must be positive, got {}", p.y)));
            }
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(argument("grid values must be finite"));
            }
        }
        points.sort_by(GridPoint::cmp_key);
        Ok(Grid { points })
    }

    /// Cartesian product `xs × ys × ns`.
    pub fn cartesian(xs: &[Scalar], ys: &[Scalar], ns: &[i64]) -> Result<Grid> {
        if xs.is_empty() || ys.is_empty() || ns.is_empty() {
            return Err(argument("empty grid"));
        }
        let ns = ns
            .iter()
            .map(|&n| check_odd(n, "n"))
            .collect::<Result<Vec<_>>>()?;
        let mut points = Vec::with_capacity(xs.len() * ys.len() * ns.len());
        for x in xs {
            for y in ys {
                for &n in &ns {
                    points.push(GridPoint {
                        x: x.clone(),
                        y: y.clone(),
                        n,
                    });
                }
            }
        }
        Grid::from_points(points)
    }

    /// The default grid with the given moduli: the float product of
    /// [`DEFAULT_XS`] and [`DEFAULT_YS`] plus the exact pairs
    /// [`DEFAULT_RATIONAL_PAIRS`].
    pub fn default_with_ns(ns: &[u32]) -> Grid {
        let mut points = Vec::new();
        let pairs = DEFAULT_XS
            .iter()
            .flat_map(|&x| DEFAULT_YS.iter().map(move |&y| (Scalar::Float(x), Scalar::Float(y))))
            .chain(
                DEFAULT_RATIONAL_PAIRS
                    .iter()
                    .map(|&(x, y)| (Scalar::int(x), Scalar::int(y))),
            );
        for (x, y) in pairs {
            for &n in ns {
                points.push(GridPoint {
                    x: x.clone(),
                    y: y.clone(),
                    n,
                });
            }
        }
        Grid::from_points(points).expect("default grid is valid")
    }

    pub fn default_grid() -> Grid {
        Grid::default_with_ns(&DEFAULT_NS)
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keeps only the points with modulus in `ns`.
    pub fn restrict_ns(&self, ns: &[u32]) -> Result<Grid> {
        Grid::from_points(
            self.points
                .iter()
                .filter(|p| ns.contains(&p.n))
                .cloned()
                .collect(),
        )
    }
}

/// A measured grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceEntry {
    pub x: Scalar,
    pub y: Scalar,
    pub n: u32,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// A grid point that could not be measured.
#[derive(Clone, Debug, PartialEq)]
pub struct SkippedPoint {
    pub x: Scalar,
    pub y: Scalar,
    pub n: u32,
    pub reason: String,
}

/// Residuals of a function over a grid.
///
/// Points hitting an excluded lattice point are listed in `skipped`.
/// Any other evaluation failure is listed in `errors` and forces
/// `max_residual = ∞`, so `passed ⇔ max_residual ≤ tolerance` always holds.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub function: String,
    pub entries: Vec<InvarianceEntry>,
    pub skipped: Vec<SkippedPoint>,
    pub errors: Vec<SkippedPoint>,
    pub tolerance: f64,
    pub max_residual: f64,
    pub passed: bool,
}

impl InvarianceReport {
    fn assemble(function: String, tolerance: f64, results: Vec<(GridPoint, Result<Residual>)>) -> Self {
        let mut entries = Vec::new();
        let mut skipped = Vec::new();
        let mut errors = Vec::new();
        for (p, res) in results {
            match res {
                Ok(r) => entries.push(InvarianceEntry {
                    x: p.x,
                    y: p.y,
                    n: p.n,
                    lhs: r.lhs,
                    rhs: r.rhs,
                    residual: r.residual,
                }),
                Err(Error::Domain(reason)) => skipped.push(SkippedPoint {
                    x: p.x,
                    y: p.y,
                    n: p.n,
                    reason,
                }),
                Err(e) => errors.push(SkippedPoint {
                    x: p.x,
                    y: p.y,
                    n: p.n,
                    reason: e.to_string(),
                }),
            }
        }
        let max_residual = if errors.is_empty() {
            entries.iter().map(|e| e.residual).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        InvarianceReport {
            function,
            entries,
            skipped,
            errors,
            tolerance,
            passed: max_residual <= tolerance,
            max_residual,
        }
    }
}

/// Runs [`invariance_residual`] over every grid point, in parallel, with a
/// report ordered by `(x, y, n)`.
pub fn check_grid(f: &BivariateFn, grid: &Grid, tol: f64) -> Result<InvarianceReport> {
    check_grid_with(f, grid, |_| tol)
}

/// As [`check_grid`] with a per-point tolerance; the report records the
/// largest tolerance used and passes iff every entry meets its own.
pub fn check_grid_with<T>(f: &BivariateFn, grid: &Grid, tol_for: T) -> Result<InvarianceReport>
where
    T: Fn(&GridPoint) -> f64 + Sync,
{
    if grid.is_empty() {
        return Err(argument("empty grid"));
    }
    let results: Vec<(GridPoint, Result<Residual>)> = grid
        .points()
        .par_iter()
        .map(|p| (p.clone(), invariance_residual(f, &p.x, &p.y, p.n as i64)))
        .collect();
    let tol = grid
        .points()
        .iter()
        .map(&tol_for)
        .fold(0.0, f64::max);
    if !(tol > 0.0) {
        return Err(argument("tolerance must be positive"));
    }
    let mut report = InvarianceReport::assemble(f.name().to_string(), tol, results);
    if report.errors.is_empty() {
        report.passed = report.entries.iter().all(|e| {
            e.residual
                <= tol_for(&GridPoint {
                    x: e.x.clone(),
                    y: e.y.clone(),
                    n: e.n,
                })
        });
    }
    Ok(report)
}

/// Cartesian-grid form of [`check_grid`].
pub fn check_invariance(
    f: &BivariateFn,
    xs: &[Scalar],
    ys: &[Scalar],
    ns: &[i64],
    tol: f64,
) -> Result<InvarianceReport> {
    let grid = Grid::cartesian(xs, ys, ns)?;
    check_grid(f, &grid, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin() -> BivariateFn {
        BivariateFn::real("x-y/2", |x, y| x - y / 2.0)
    }

    #[test]
    fn constant_one() {
        let f = BivariateFn::constant(Complex64::new(1.0, 0.0));
        let r = invariance_residual(&f, &0.3.into(), &1.0.into(), 5).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn first_euler_member_exact_on_rationals() {
        let f = crate::euler::euler_invfn(1).unwrap();
        let r = invariance_residual(&f, &Scalar::ratio(2, 5), &Scalar::int(1), 3).unwrap();
        assert_eq!(r.residual, 0.0);
        let r = invariance_residual(&lin(), &0.4.into(), &1.0.into(), 3).unwrap();
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn negative_control() {
        let f = BivariateFn::real("x", |x, _| x);
        let r = invariance_residual(&f, &Scalar::int(1), &Scalar::int(1), 3).unwrap();
        assert_eq!(r.lhs.re, 2.0);
        assert_eq!(r.rhs.re, 1.0);
        assert_eq!(r.residual, 1.0);
        let rep = check_invariance(&f, &[Scalar::int(1)], &[Scalar::int(1)], &[3], 1e-12).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.max_residual, 1.0);
    }

    #[test]
    fn rejects_even_and_nonpositive_n() {
        let f = lin();
        for n in [0, 2, -3] {
            assert!(matches!(
                invariance_residual(&f, &0.1.into(), &1.0.into(), n),
                Err(Error::Argument(_))
            ));
        }
    }

    #[test]
    fn zero_function_passes_with_zero_residual() {
        let rep = check_grid(&BivariateFn::zero(), &Grid::default_grid(), 1e-300).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.max_residual, 0.0);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(matches!(
            check_invariance(&lin(), &[], &[1.0.into()], &[1], 1e-9),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn report_is_sorted_and_complete() {
        let xs: Vec<Scalar> = vec![0.9.into(), 0.1.into()];
        let rep = check_invariance(&lin(), &xs, &[1.0.into()], &[5, 1, 3], 1e-12).unwrap();
        let keys: Vec<(f64, u32)> = rep.entries.iter().map(|e| (e.x.to_f64(), e.n)).collect();
        assert_eq!(keys, vec![(0.1, 1), (0.1, 3), (0.1, 5), (0.9, 1), (0.9, 3), (0.9, 5)]);
        assert!(rep.passed);
    }

    #[test]
    fn default_grid_shape() {
        let g = Grid::default_grid();
        assert_eq!(g.len(), (7 * 3 + 3) * 4);
        assert!(g.points().iter().any(|p| p.x == Scalar::int(-2) && p.y.is_exact()));
    }

    #[test]
    fn excluded_points_are_skipped() {
        use crate::function::{DomainNote, Exclusion};
        let f = lin().with_note(DomainNote::lattice(Exclusion::AtMost(0)));
        let rep = check_invariance(&f, &[Scalar::int(-2), 0.3.into()], &[Scalar::int(1)], &[1], 1e-12).unwrap();
        assert_eq!(rep.skipped.len(), 1);
        assert_eq!(rep.entries.len(), 1);
        assert!(rep.passed);
    }
}
