//! Gauss–Legendre rules and a simple adaptive integrator.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// An `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Shared rules used by the hot quadrature paths.
pub(crate) fn cached_rule(n: usize) -> &'static GaussLegendre {
    static R5: OnceLock<GaussLegendre> = OnceLock::new();
    static R8: OnceLock<GaussLegendre> = OnceLock::new();
    static R10: OnceLock<GaussLegendre> = OnceLock::new();
    match n {
        5 => R5.get_or_init(|| GaussLegendre::new(5)),
        8 => R8.get_or_init(|| GaussLegendre::new(8)),
        10 => R10.get_or_init(|| GaussLegendre::new(10)),
        _ => panic!("no cached {n}-point rule"),
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive bisection with a 10-point rule, accepting a panel when the
/// split estimate agrees with the whole-panel estimate.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let rule = cached_rule(10);
    let whole = rule.integrate(f, a, b);
    adaptive_step(f, rule, a, b, whole, abs_tol, rel_tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    let split = left + right;
    let err = (split - whole).abs();
    if depth >= 48 || err <= abs_tol.max(rel_tol * split.abs()) {
        return split;
    }
    adaptive_step(f, rule, a, m, left, 0.5 * abs_tol, rel_tol, depth + 1)
        + adaptive_step(f, rule, m, b, right, 0.5 * abs_tol, rel_tol, depth + 1)
}

/// Bisection with the same absolute tolerance on every panel, so rounding noise that shrinks with the
/// panel width is eventually accepted; total error is bounded by `tol` times the number of leaves.
pub(crate) fn adaptive_uniform<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: usize) -> f64 {
    let rule = cached_rule(10);
    let mut stack = vec![(a, b, rule.integrate(f, a, b), 0usize)];
    let mut total = 0.0;
    while let Some((a, b, whole, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let left = rule.integrate(f, a, m);
        let right = rule.integrate(f, m, b);
        if depth >= max_depth || (left + right - whole).abs() <= tol {
            total += left + right;
        } else {
            stack.push((a, m, left, depth + 1));
            stack.push((m, b, right, depth + 1));
        }
    }
    total
}
