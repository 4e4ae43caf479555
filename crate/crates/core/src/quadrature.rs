//! Adaptive composite Gauss–Legendre quadrature for complex integrands.
//!
//! Panels adjacent to an interval end or a declared breakpoint are split
//! geometrically (at 1/4 toward that end) so algebraic endpoint behaviour
//! is resolved quickly; interior panels are bisected. The panel with the
//! largest error estimate is refined first, and the final sum is taken in
//! left-to-right panel order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{argument, Error, Result};

/// Panel rule and refinement policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per panel (4 ≤ order ≤ 64).
    pub panel_order: usize,
    /// Maximum subdivision depth of any panel.
    pub max_refinements: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            panel_order: 16,
            max_refinements: 20,
            abs_tol: 1e-10,
            rel_tol: 1e-9,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(4..=MAX_ORDER).contains(&self.panel_order) {
            return Err(argument(format!(
                "panel_order must lie in 4..={MAX_ORDER}, got {}",
                self.panel_order
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol >= 0.0) {
            return Err(argument("quadrature tolerances must be positive"));
        }
        Ok(())
    }
}

/// An integral with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub est_error: f64,
    pub panels: usize,
}

const MAX_ORDER: usize = 64;
const MAX_PANELS: usize = 200_000;

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn rule(n: usize) -> &'static Rule {
    static RULES: [OnceLock<Rule>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
    RULES[n].get_or_init(|| {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Rule { nodes, weights }
    })
}

fn gauss<F>(f: &F, a: f64, b: f64, n: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let r = rule(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        acc += f(mid + half * x)? * *w;
    }
    Ok(acc * half)
}

#[derive(Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    depth: u32,
    left: Complex64,
    right: Complex64,
    cut: f64,
    err: f64,
    sing_lo: bool,
    sing_hi: bool,
}

impl Panel {
    fn estimate(&self) -> Complex64 {
        self.left + self.right
    }
}

struct ByErr(Panel);

impl PartialEq for ByErr {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for ByErr {}
impl PartialOrd for ByErr {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for ByErr {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0
            .err
            .total_cmp(&o.0.err)
            .then_with(|| o.0.lo.total_cmp(&self.0.lo))
    }
}

fn cut_point(lo: f64, hi: f64, sing_lo: bool, sing_hi: bool) -> f64 {
    match (sing_lo, sing_hi) {
        (true, false) => lo + 0.25 * (hi - lo),
        (false, true) => hi - 0.25 * (hi - lo),
        _ => 0.5 * (lo + hi),
    }
}

fn make_panel<F>(f: &F, lo: f64, hi: f64, depth: u32, whole: Complex64, sing: (bool, bool), n: usize) -> Result<Panel>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let cut = cut_point(lo, hi, sing.0, sing.1);
    let left = gauss(f, lo, cut, n)?;
    let right = gauss(f, cut, hi, n)?;
    Ok(Panel {
        lo,
        hi,
        depth,
        left,
        right,
        cut,
        err: (whole - left - right).norm(),
        sing_lo: sing.0,
        sing_hi: sing.1,
    })
}

/// `∫_a^b f(t) dt` (oriented), split first at the given breakpoints.
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64) -> Result<Complex64>,
{
    cfg.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(argument("integration bounds must be finite"));
    }
    if a == b {
        return Ok(Integral {
            value: Complex64::new(0.0, 0.0),
            est_error: 0.0,
            panels: 0,
        });
    }
    if a > b {
        let r = integrate(f, b, a, breakpoints, cfg)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    let n = cfg.panel_order;
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|t| *t > a && *t < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let whole = gauss(&f, w[0], w[1], n)?;
        heap.push(ByErr(make_panel(&f, w[0], w[1], 0, whole, (true, true), n)?));
    }
    let mut frozen: Vec<Panel> = Vec::new();
    loop {
        let total: Complex64 = heap.iter().map(|p| p.0.estimate()).sum::<Complex64>()
            + frozen.iter().map(Panel::estimate).sum::<Complex64>();
        let err: f64 = heap.iter().map(|p| p.0.err).sum::<f64>() + frozen.iter().map(|p| p.err).sum::<f64>();
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm());
        if err <= target {
            break;
        }
        let Some(ByErr(p)) = heap.pop() else {
            return Err(Error::Quadrature(format!(
                "refinement budget exhausted on [{a}, {b}]: error estimate {err:e} > {target:e}"
            )));
        };
        if p.depth >= cfg.max_refinements || p.hi - p.lo <= 4.0 * f64::EPSILON * p.lo.abs().max(p.hi.abs()) {
            frozen.push(p);
            continue;
        }
        if heap.len() + frozen.len() > MAX_PANELS {
            return Err(Error::Quadrature(format!("panel limit reached on [{a}, {b}]")));
        }
        let l = make_panel(&f, p.lo, p.cut, p.depth + 1, p.left, (p.sing_lo, false), n)?;
        let r = make_panel(&f, p.cut, p.hi, p.depth + 1, p.right, (false, p.sing_hi), n)?;
        heap.push(ByErr(l));
        heap.push(ByErr(r));
    }
    let mut panels: Vec<Panel> = heap.into_iter().map(|p| p.0).chain(frozen).collect();
    panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    let value = panels.iter().map(Panel::estimate).sum();
    let est_error = panels.iter().map(|p| p.err).sum();
    Ok(Integral {
        value,
        est_error,
        panels: panels.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<Complex64> {
        move |t| Ok(Complex64::new(f(t), 0.0))
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        for n in [4, 9, 16, 33] {
            let r = rule(n);
            let sw: f64 = r.weights.iter().sum();
            assert!((sw - 2.0).abs() < 1e-14);
            let deg = 2 * n - 1;
            let m: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            assert!((m - 2.0 / deg as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn oriented_and_smooth() {
        let cfg = QuadratureConfig::default();
        let i = integrate(re(f64::exp), 0.0, 1.0, &[], &cfg).unwrap();
        assert!((i.value.re - (1f64.exp() - 1.0)).abs() < 1e-14);
        let j = integrate(re(f64::exp), 1.0, 0.0, &[], &cfg).unwrap();
        assert_eq!(j.value, -i.value);
    }

    #[test]
    fn endpoint_algebraic_singularity() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            ..QuadratureConfig::default()
        };
        let i = integrate(re(|t: f64| t.powf(0.2)), 0.0, 2.0, &[], &cfg).unwrap();
        let exact = 2f64.powf(1.2) / 1.2;
        let err = (i.value.re - exact).abs();
        assert!(err < 1e-12, "{err:e}");
        assert!(err <= i.est_error.max(1e-15));
    }

    #[test]
    fn jump_at_breakpoint() {
        let cfg = QuadratureConfig::default();
        let step = re(|t: f64| if t < 0.3 { 1.0 } else { -2.0 });
        let i = integrate(&step, 0.0, 1.0, &[0.3], &cfg).unwrap();
        assert!((i.value.re - (0.3 - 1.4)).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let cfg = QuadratureConfig {
            max_refinements: 2,
            abs_tol: 1e-15,
            rel_tol: 0.0,
            ..QuadratureConfig::default()
        };
        let r = integrate(re(|t: f64| (1.0 / t.abs().max(1e-300)).sqrt() * (1.0 / t).sin()), 0.0, 1.0, &[], &cfg);
        assert!(matches!(r, Err(Error::Quadrature(_))));
    }

    #[test]
    fn bad_order_rejected() {
        let cfg = QuadratureConfig {
            panel_order: 3,
            ..QuadratureConfig::default()
        };
        assert!(integrate(re(|t| t), 0.0, 1.0, &[], &cfg).is_err());
    }
}
