//! Sampled invariant checks for Young functions.
//!
//! Each check returns the worst relative violation found over its samples;
//! zero means every sampled inequality held exactly.

use serde::Serialize;

use super::YoungFunction;
use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub worst_violation: f64,
    pub samples: usize,
}

impl CheckOutcome {
    pub fn passes(&self, tol: f64) -> bool {
        self.worst_violation <= tol
    }

    /// Records `lhs <= rhs` with violation measured relative to `scale`.
    pub(crate) fn le(&mut self, lhs: f64, rhs: f64, scale: f64) {
        self.samples += 1;
        let v = if lhs.is_nan() || rhs.is_nan() { f64::INFINITY } else { ((lhs - rhs) / scale).max(0.0) };
        self.worst_violation = self.worst_violation.max(v);
    }

    pub(crate) fn close(&mut self, a: f64, b: f64, scale: f64) {
        self.samples += 1;
        let v = if a.is_nan() || b.is_nan() { f64::INFINITY } else { (a - b).abs() / scale };
        self.worst_violation = self.worst_violation.max(v);
    }

    pub fn merge(self, other: CheckOutcome) -> CheckOutcome {
        CheckOutcome {
            worst_violation: self.worst_violation.max(other.worst_violation),
            samples: self.samples + other.samples,
        }
    }
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()).collect()
}

/// `t a <= G(t) + G~(a)` on `grid × grid`.
pub fn check_young_inequality(g: &YoungFunction, conj: &YoungFunction, grid: &[f64]) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    let gt: Vec<f64> = grid.iter().map(|&t| g.value(t)).collect();
    let ca: Vec<f64> = grid.iter().map(|&a| conj.value(a)).collect();
    for (i, &t) in grid.iter().enumerate() {
        for (j, &a) in grid.iter().enumerate() {
            out.le(t * a, gt[i] + ca[j], t * a);
        }
    }
    out
}

/// `t a = G(a) + G~(t)` at the maximizer `a = G~'(t)`.
pub fn check_young_equality(g: &YoungFunction, conj: &YoungFunction, grid: &[f64]) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    for &t in grid {
        let a = conj.derivative(t);
        out.close(t * a, g.value(a) + conj.value(t), t * a);
    }
    out
}

/// `G(0) = 0`, strict increase, and nondecreasing secant slopes.
pub fn check_convexity(g: &YoungFunction, grid: &[f64]) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    out.close(g.value(0.0), 0.0, 1.0);
    let vals: Vec<f64> = grid.iter().map(|&t| g.value(t)).collect();
    for w in vals.windows(2) {
        out.samples += 1;
        if !(w[1] > w[0]) {
            out.worst_violation = f64::INFINITY;
        }
    }
    for k in 1..grid.len().saturating_sub(1) {
        let left = (vals[k] - vals[k - 1]) / (grid[k] - grid[k - 1]);
        let right = (vals[k + 1] - vals[k]) / (grid[k + 1] - grid[k]);
        // cancellation in the differences costs relative accuracy ~ eps G / Δ
        let noise = 8.0 * f64::EPSILON * vals[k + 1] / (grid[k + 1] - grid[k - 1]);
        out.le(left - noise, right, right.abs());
    }
    out
}

/// `p- <= t g(t) / G(t) <= p+`.
pub fn check_index_bounds(g: &YoungFunction, grid: &[f64]) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    for &t in grid {
        let r = g.index_ratio(t);
        out.le(g.p_minus(), r, g.p_minus());
        out.le(r, g.p_plus(), g.p_plus());
    }
    out
}

/// `G(2t) <= 2^{p+} G(t)`.
pub fn check_delta2(g: &YoungFunction, grid: &[f64]) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    let c = g.doubling_constant();
    for &t in grid {
        let rhs = c * g.value(t);
        out.le(g.value(2.0 * t), rhs, rhs);
    }
    out
}

/// `G(t) min{α^{p-}, α^{p+}} <= G(αt) <= G(t) max{α^{p-}, α^{p+}}` on `alphas × grid`.
pub fn check_scaling_sandwich(g: &YoungFunction, alphas: &[f64], grid: &[f64]) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    for &t in grid {
        let gt = g.value(t);
        for &a in alphas {
            let (x, y) = (a.powf(g.p_minus()), a.powf(g.p_plus()));
            let v = g.value(a * t);
            out.le(gt * x.min(y), v, v);
            out.le(v, gt * x.max(y), v);
        }
    }
    out
}

/// The same sandwich for `G^{-1}` with exponents `1/p±`.
pub fn check_inverse_sandwich(g: &YoungFunction, alphas: &[f64], grid: &[f64]) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::default();
    for &t in grid {
        let it = g.inverse(t)?;
        for &a in alphas {
            let (x, y) = (a.powf(1.0 / g.p_minus()), a.powf(1.0 / g.p_plus()));
            let v = g.inverse(a * t)?;
            out.le(it * x.min(y), v, v);
            out.le(v, it * x.max(y), v);
        }
    }
    Ok(out)
}

/// `G(a + b) <= (𝐂/2)(G(a) + G(b))` on `grid × grid`.
pub fn check_split_sums(g: &YoungFunction, grid: &[f64]) -> CheckOutcome {
    let mut out = CheckOutcome::default();
    let half_c = 0.5 * g.doubling_constant();
    let vals: Vec<f64> = grid.iter().map(|&t| g.value(t)).collect();
    for (i, &a) in grid.iter().enumerate() {
        for (j, &b) in grid.iter().enumerate() {
            let rhs = half_c * (vals[i] + vals[j]);
            out.le(g.value(a + b), rhs, rhs);
        }
    }
    out
}

/// Pointwise relative distance between `G` and its double conjugate.
pub fn check_double_conjugacy(g: &YoungFunction, grid: &[f64]) -> Result<CheckOutcome> {
    let cc = g.conjugate()?.conjugate()?;
    let mut out = CheckOutcome::default();
    for &t in grid {
        let v = g.value(t);
        out.close(cc.value(t), v, v);
    }
    Ok(out)
}

/// `τ -> G^{-1}(τ) τ^{-s/n}` is increasing along `grid`.
pub fn check_increasing_quotient(g: &YoungFunction, s: f64, n: usize, grid: &[f64]) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::default();
    let e = s / n as f64;
    let mut prev: Option<f64> = None;
    for &t in grid {
        let q = g.inverse(t)? * t.powf(-e);
        if let Some(p) = prev {
            out.samples += 1;
            if !(q > p) {
                out.worst_violation = out.worst_violation.max((p - q) / p).max(f64::MIN_POSITIVE);
            }
        }
        prev = Some(q);
    }
    Ok(out)
}
