//! Young functions and their calculus.
//!
//! A [`YoungFunction`] is an evaluable convex function `G` with right-continuous
//! derivative `g`, declared index bounds `p- <= t g(t) / G(t) <= p+`, and a
//! record of how it was built. Closed-form families, combinators, the
//! complementary function and the critical Sobolev conjugate all share the
//! same type so they can be fed back into every other operation.

mod checks;
mod conjugate;
mod critical;
mod descriptor;
mod modular;
mod sequence;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::adaptive;
use crate::roots::solve_log_newton;

pub use checks::{
    check_convexity, check_delta2, check_double_conjugacy, check_increasing_quotient, check_index_bounds,
    check_inverse_sandwich, check_scaling_sandwich, check_split_sums, check_young_equality, check_young_inequality,
    log_grid, CheckOutcome,
};
pub use critical::{h_of, k_of, sobolev_conjugate, CriticalTable, Embedding};
pub use descriptor::{export_csv, YoungDescriptor};
pub(crate) use modular::solve_scaling;
pub use modular::{chebyshev_bound, luxemburg_norm, modular, WeightedSamples};
pub use sequence::{iterate_recursion, sequence_threshold, SEQUENCE_SAFETY_FACTOR};

/// How a Young function was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Combination,
    Conjugate,
    TabulatedInverse,
}

/// Combinators accepted by [`YoungFunction::combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combination {
    Sum,
    Max,
    Compose,
}

#[derive(Clone, Debug)]
pub(crate) enum Kind {
    Power {
        p: f64,
    },
    PowerLog {
        p: f64,
    },
    PiecewisePower {
        p: f64,
        q: f64,
    },
    Sum(Arc<[(f64, YoungFunction)]>),
    /// `breaks` are the arguments where the leading part changes.
    Max {
        parts: Arc<[YoungFunction]>,
        breaks: Arc<[f64]>,
    },
    /// `parts[0] ∘ parts[1] ∘ ...`
    Compose(Arc<[YoungFunction]>),
    /// `value * inner(argument * t)`
    Scaled {
        inner: Arc<YoungFunction>,
        value: f64,
        argument: f64,
    },
    Conjugate(Arc<YoungFunction>),
    /// `G*`, tabulated through its inverse.
    Critical(Arc<CriticalTable>),
    /// `H = G* ∘ G^{-1}`.
    CriticalOverInverse(Arc<CriticalTable>),
}

/// A Young function `G` with derivative `g`, extended evenly to `t < 0`.
#[derive(Clone, Debug)]
pub struct YoungFunction {
    kind: Kind,
    p_minus: f64,
    p_plus: f64,
    normalized: bool,
}

impl YoungFunction {
    fn from_kind(kind: Kind, p_minus: f64, p_plus: f64) -> Self {
        let mut yf = Self { kind, p_minus, p_plus, normalized: false };
        yf.normalized = (yf.value(1.0) - 1.0).abs() <= 1e-12;
        yf
    }

    /// `G(t) = t^p`.
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("power family needs p > 1, got {p}")));
        }
        Ok(Self::from_kind(Kind::Power { p }, p, p))
    }

    /// `G(t) = t^p (1 + |log t|)`.
    ///
    /// The index quotient is `p - 1/(1 - ln t)` below 1 and `p + 1/(1 + ln t)`
    /// from 1 on, so the sharp bounds are `p - 1` (approached as `t -> 1-`)
    /// and `p + 1` (attained at `t = 1`).
    pub fn power_log(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("power-log family needs p > 1, got {p}")));
        }
        let yf = Self::from_kind(Kind::PowerLog { p }, p - 1.0, p + 1.0);
        // dyadic sweep of the quotient, 64 points per octave over 2^±40
        for k in -40 * 64..=40 * 64 {
            let t = (k as f64 / 64.0).exp2();
            let r = yf.index_ratio(t);
            if !(r > 1.0 && r.is_finite()) {
                return Err(invalid(format!(
                    "power-log family with p = {p}: index quotient {r} leaves (1, inf) at t = {t:e}"
                )));
            }
        }
        Ok(yf)
    }

    /// `G(t) = t^p` on `[0, 1]` and `t^q` beyond.
    pub fn piecewise_power(p: f64, q: f64) -> Result<Self> {
        if !(p > 1.0 && q > 1.0 && p.is_finite() && q.is_finite()) {
            return Err(invalid(format!("piecewise power family needs p, q > 1, got ({p}, {q})")));
        }
        Ok(Self::from_kind(Kind::PiecewisePower { p, q }, p.min(q), p.max(q)))
    }

    /// `sum_j c_j G_j`; index bounds are the extremes over parts with `c_j > 0`.
    pub fn sum(parts: Vec<(f64, YoungFunction)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("sum of zero Young functions"));
        }
        if parts.iter().any(|(c, _)| !(*c >= 0.0 && c.is_finite())) {
            return Err(invalid("sum coefficients must be finite and nonnegative"));
        }
        let active: Vec<(f64, YoungFunction)> = parts.into_iter().filter(|(c, _)| *c > 0.0).collect();
        if active.is_empty() {
            return Err(invalid("sum needs at least one positive coefficient"));
        }
        let pm = active.iter().map(|(_, g)| g.p_minus).fold(f64::INFINITY, f64::min);
        let pp = active.iter().map(|(_, g)| g.p_plus).fold(0.0, f64::max);
        Ok(Self::from_kind(Kind::Sum(active.into()), pm, pp))
    }

    pub fn max(parts: Vec<YoungFunction>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("max of zero Young functions"));
        }
        let pm = parts.iter().map(|g| g.p_minus).fold(f64::INFINITY, f64::min);
        let pp = parts.iter().map(|g| g.p_plus).fold(0.0, f64::max);
        let breaks = leader_changes(&parts).into();
        Ok(Self::from_kind(Kind::Max { parts: parts.into(), breaks }, pm, pp))
    }

    /// `parts[0] ∘ parts[1] ∘ ...`; index bounds multiply.
    pub fn compose(parts: Vec<YoungFunction>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("composition of zero Young functions"));
        }
        let pm = parts.iter().map(|g| g.p_minus).product();
        let pp = parts.iter().map(|g| g.p_plus).product();
        Ok(Self::from_kind(Kind::Compose(parts.into()), pm, pp))
    }

    /// Dispatches to [`sum`](Self::sum), [`max`](Self::max) or
    /// [`compose`](Self::compose). `coefficients` is only read for sums.
    pub fn combine(kind: Combination, parts: Vec<YoungFunction>, coefficients: &[f64]) -> Result<Self> {
        match kind {
            Combination::Sum => {
                if coefficients.len() != parts.len() {
                    return Err(invalid(format!(
                        "sum needs one coefficient per part ({} parts, {} coefficients)",
                        parts.len(),
                        coefficients.len()
                    )));
                }
                Self::sum(coefficients.iter().copied().zip(parts).collect())
            }
            Combination::Max => Self::max(parts),
            Combination::Compose => Self::compose(parts),
        }
    }

    /// `t -> value * G(argument * t)`; index bounds are unchanged.
    pub fn rescaled(&self, value: f64, argument: f64) -> Result<Self> {
        if !(value > 0.0 && argument > 0.0 && value.is_finite() && argument.is_finite()) {
            return Err(invalid("rescaling factors must be positive and finite"));
        }
        Ok(Self::from_kind(Kind::Scaled { inner: Arc::new(self.clone()), value, argument }, self.p_minus, self.p_plus))
    }

    /// `G / G(1)`, so that the result satisfies `G(1) = 1`.
    pub fn normalized(&self) -> Result<Self> {
        if self.normalized {
            return Ok(self.clone());
        }
        let g1 = self.value(1.0);
        let mut out = self.rescaled(1.0 / g1, 1.0)?;
        out.normalized = true;
        Ok(out)
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    /// The doubling constant `2^{p+}`.
    pub fn doubling_constant(&self) -> f64 {
        self.p_plus.exp2()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn provenance(&self) -> Provenance {
        match &self.kind {
            Kind::Power { .. } | Kind::PowerLog { .. } | Kind::PiecewisePower { .. } => Provenance::ClosedForm,
            Kind::Scaled { inner, .. } => inner.provenance(),
            Kind::Sum(_) | Kind::Max { .. } | Kind::Compose(_) => Provenance::Combination,
            Kind::Conjugate(_) => Provenance::Conjugate,
            Kind::Critical(_) | Kind::CriticalOverInverse(_) => Provenance::TabulatedInverse,
        }
    }

    /// True when evaluation involves no root finding or tabulation.
    pub fn is_closed_form(&self) -> bool {
        match &self.kind {
            Kind::Power { .. } | Kind::PowerLog { .. } | Kind::PiecewisePower { .. } => true,
            Kind::Scaled { inner, .. } => inner.is_closed_form(),
            Kind::Sum(parts) => parts.iter().all(|(_, g)| g.is_closed_form()),
            Kind::Max { parts, .. } | Kind::Compose(parts) => parts.iter().all(|g| g.is_closed_form()),
            Kind::Conjugate(_) | Kind::Critical(_) | Kind::CriticalOverInverse(_) => false,
        }
    }

    /// `G(|t|)`.
    pub fn value(&self, t: f64) -> f64 {
        self.value_pos(t.abs())
    }

    /// `g(t)`, extended oddly.
    pub fn derivative(&self, t: f64) -> f64 {
        let d = self.derivative_pos(t.abs());
        if t < 0.0 {
            -d
        } else {
            d
        }
    }

    /// `(G(|t|), g(|t|))` in one pass.
    pub fn value_and_derivative(&self, t: f64) -> (f64, f64) {
        let t = t.abs();
        match &self.kind {
            &Kind::Power { p } => {
                if t == 0.0 {
                    (0.0, 0.0)
                } else {
                    let v = pow(t, p);
                    (v, p * v / t)
                }
            }
            &Kind::PiecewisePower { p, q } => {
                if t == 0.0 {
                    (0.0, 0.0)
                } else {
                    let e = if t < 1.0 { p } else { q };
                    let v = pow(t, e);
                    (v, e * v / t)
                }
            }
            Kind::Critical(table) => table.star_and_derivative(t),
            Kind::CriticalOverInverse(_) if t == 0.0 => (0.0, 0.0),
            Kind::CriticalOverInverse(table) => {
                let base = table.base();
                let x = base.inverse_or_nan(t);
                let (v, d) = table.star_and_derivative(x);
                (v, d / base.derivative_pos(x))
            }
            _ => (self.value_pos(t), self.derivative_pos(t)),
        }
    }

    /// The index quotient `t g(t) / G(t)` for `t > 0`.
    pub fn index_ratio(&self, t: f64) -> f64 {
        let (v, d) = self.value_and_derivative(t);
        t.abs() * d / v
    }

    fn value_pos(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => pow(t, *p),
            Kind::PowerLog { p } => pow(t, *p) * (1.0 + t.ln().abs()),
            Kind::PiecewisePower { p, q } => {
                if t <= 1.0 {
                    pow(t, *p)
                } else {
                    pow(t, *q)
                }
            }
            Kind::Sum(parts) => parts.iter().map(|(c, g)| c * g.value_pos(t)).sum(),
            Kind::Max { parts, .. } => parts.iter().map(|g| g.value_pos(t)).fold(0.0, f64::max),
            Kind::Compose(parts) => parts.iter().rev().fold(t, |x, g| g.value_pos(x)),
            Kind::Scaled { inner, value, argument } => value * inner.value_pos(argument * t),
            Kind::Conjugate(inner) => conjugate::value(inner, t),
            Kind::Critical(table) => table.star(t),
            Kind::CriticalOverInverse(table) => table.star(table.base().inverse_or_nan(t)),
        }
    }

    fn derivative_pos(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => p * pow(t, p - 1.0),
            Kind::PowerLog { p } => {
                let l = t.ln();
                if t < 1.0 {
                    pow(t, p - 1.0) * (p * (1.0 - l) - 1.0)
                } else {
                    pow(t, p - 1.0) * (p * (1.0 + l) + 1.0)
                }
            }
            Kind::PiecewisePower { p, q } => {
                if t < 1.0 {
                    p * pow(t, p - 1.0)
                } else {
                    q * pow(t, q - 1.0)
                }
            }
            Kind::Sum(parts) => parts.iter().map(|(c, g)| c * g.derivative_pos(t)).sum(),
            Kind::Max { parts, .. } => {
                let mut best = f64::NEG_INFINITY;
                let mut slope = 0.0;
                for g in parts.iter() {
                    let v = g.value_pos(t);
                    let d = g.derivative_pos(t);
                    if v > best || (v == best && d > slope) {
                        best = v;
                        slope = d;
                    }
                }
                slope
            }
            Kind::Compose(parts) => {
                let mut x = t;
                let mut slope = 1.0;
                for g in parts.iter().rev() {
                    slope *= g.derivative_pos(x);
                    x = g.value_pos(x);
                }
                slope
            }
            Kind::Scaled { inner, value, argument } => value * argument * inner.derivative_pos(argument * t),
            Kind::Conjugate(inner) => conjugate::derivative(inner, t),
            Kind::Critical(table) => table.star_derivative(t),
            Kind::CriticalOverInverse(table) => {
                let base = table.base();
                let x = base.inverse_or_nan(t);
                table.star_derivative(x) / base.derivative_pos(x)
            }
        }
    }

    /// `G^{-1}(y)` for `y >= 0`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return Err(invalid(format!("inverse needs y >= 0, got {y}")));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            Kind::Power { p } => Ok(y.powf(1.0 / p)),
            Kind::PiecewisePower { p, q } => Ok(if y <= 1.0 { y.powf(1.0 / p) } else { y.powf(1.0 / q) }),
            Kind::Scaled { inner, value, argument } => Ok(inner.inverse(y / value)? / argument),
            Kind::Compose(parts) => parts.iter().try_fold(y, |acc, g| g.inverse(acc)),
            Kind::Critical(table) => Ok(table.inverse_star(y)),
            Kind::CriticalOverInverse(table) => Ok(table.base().value_pos(table.inverse_star(y))),
            _ => self.numeric_inverse(y),
        }
    }

    pub(crate) fn inverse_or_nan(&self, y: f64) -> f64 {
        self.inverse(y).unwrap_or(f64::NAN)
    }

    fn numeric_inverse(&self, y: f64) -> Result<f64> {
        let c1 = self.value_pos(1.0);
        let r = y / c1;
        let a = r.powf(1.0 / self.p_plus);
        let b = r.powf(1.0 / self.p_minus.max(1.0));
        let eval = |t: f64| {
            let (v, d) = self.value_and_derivative(t);
            (v, t * d / v)
        };
        solve_log_newton(eval, y, a.min(b) * 0.999, a.max(b) * 1.001, 1e-15)
    }

    /// `Γ(z) = ∫_0^z G(w)/w dw`, the radial antiderivative used by the
    /// exterior part of the Gagliardo modular.
    pub fn log_integral(&self, z: f64) -> f64 {
        let z = z.abs();
        if z == 0.0 {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p } => pow(z, *p) / p,
            Kind::PowerLog { p } => {
                let zp = pow(z, *p);
                let l = z.ln();
                if z <= 1.0 {
                    zp / p * (1.0 - l) + zp / (p * p)
                } else {
                    zp / p * (1.0 + l) - zp / (p * p) + 2.0 / (p * p)
                }
            }
            Kind::PiecewisePower { p, q } => {
                if z <= 1.0 {
                    pow(z, *p) / p
                } else {
                    1.0 / p + (pow(z, *q) - 1.0) / q
                }
            }
            Kind::Sum(parts) => parts.iter().map(|(c, g)| c * g.log_integral(z)).sum(),
            Kind::Scaled { inner, value, argument } => value * inner.log_integral(argument * z),
            Kind::Compose(parts) => compose_log_integral(parts, z).unwrap_or_else(|| self.numeric_log_integral(z)),
            Kind::Max { parts, breaks } if parts.iter().all(|g| g.has_exact_log_integral()) => {
                max_log_integral(parts, breaks, z)
            }
            _ => self.numeric_log_integral(z),
        }
    }

    fn has_exact_log_integral(&self) -> bool {
        match &self.kind {
            Kind::Power { .. } | Kind::PowerLog { .. } | Kind::PiecewisePower { .. } => true,
            Kind::Sum(parts) => parts.iter().all(|(_, g)| g.has_exact_log_integral()),
            Kind::Scaled { inner, .. } => inner.has_exact_log_integral(),
            Kind::Max { parts, .. } => parts.iter().all(|g| g.has_exact_log_integral()),
            Kind::Compose(parts) => match &parts[..] {
                [only] => only.has_exact_log_integral(),
                [rest @ .., last] => {
                    matches!(last.kind, Kind::Power { .. })
                        && YoungFunction::compose(rest.to_vec()).is_ok_and(|g| g.has_exact_log_integral())
                }
                [] => false,
            },
            _ => false,
        }
    }

    fn numeric_log_integral(&self, z: f64) -> f64 {
        // ∫_0^∞ G(z e^{-v}) dv with G(z e^{-v}) <= G(z) e^{-p- v}; the built-in
        // kinks sit at argument 1, i.e. at v = ln z
        let decay = self.p_minus.max(1.0);
        let span = 42.0 / decay;
        let f = |v: f64| self.value_pos(z * (-v).exp());
        let kink = z.ln();
        let mut acc = if kink > 0.0 && kink < span {
            adaptive(&f, 0.0, kink, 0.0, 1e-14) + adaptive(&f, kink, span, 0.0, 1e-14)
        } else {
            adaptive(&f, 0.0, span, 0.0, 1e-14)
        };
        acc += self.value_pos(z * (-span).exp()) / decay;
        acc
    }

    /// The complementary function `sup_a { t a - G(a) }`.
    pub fn conjugate(&self) -> Result<Self> {
        conjugate::build(self)
    }
}

fn leader(parts: &[YoungFunction], t: f64) -> usize {
    let mut best = 0;
    let mut value = f64::NEG_INFINITY;
    for (i, g) in parts.iter().enumerate() {
        let v = g.value_pos(t);
        if v > value {
            best = i;
            value = v;
        }
    }
    best
}

/// Scans `t = 10^{-150} .. 10^{150}` at 12 points per decade and bisects in
/// `ln t` wherever the largest part changes.
fn leader_changes(parts: &[YoungFunction]) -> Vec<f64> {
    if parts.len() < 2 {
        return Vec::new();
    }
    let steps = 3600;
    let (lo, hi) = (-150.0 * std::f64::consts::LN_10, 150.0 * std::f64::consts::LN_10);
    let at = |k: usize| lo + (hi - lo) * k as f64 / steps as f64;
    let mut out = Vec::new();
    let mut prev = leader(parts, at(0).exp());
    for k in 1..=steps {
        let current = leader(parts, at(k).exp());
        if current != prev {
            let (mut a, mut b) = (at(k - 1), at(k));
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if leader(parts, m.exp()) == prev {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push((0.5 * (a + b)).exp());
            prev = current;
        }
    }
    out
}

/// `Γ` of a maximum, summing each part's `Γ` over the stretches where it leads.
fn max_log_integral(parts: &[YoungFunction], breaks: &[f64], z: f64) -> f64 {
    let mut total = 0.0;
    let mut start = 0.0;
    for &b in breaks.iter().chain(std::iter::once(&f64::INFINITY)) {
        let end = b.min(z);
        if end > start {
            let probe = if start == 0.0 { 0.5 * end } else { (start * end).sqrt() };
            let g = &parts[leader(parts, probe)];
            total += g.log_integral(end) - g.log_integral(start);
        }
        if b >= z {
            break;
        }
        start = b;
    }
    total
}

/// Peels inner power factors off a composition: `Γ_{A∘t^q}(z) = Γ_A(z^q) / q`.
fn compose_log_integral(parts: &[YoungFunction], z: f64) -> Option<f64> {
    match parts {
        [only] => Some(only.log_integral(z)),
        [rest @ .., last] => match last.kind {
            Kind::Power { p } => compose_log_integral(rest, z.powf(p)).map(|v| v / p),
            _ => None,
        },
        [] => None,
    }
}

/// `t^p` with cheap paths for the integer and half-integer exponents the built-in families use.
#[inline]
fn pow(t: f64, p: f64) -> f64 {
    let twice = 2.0 * p;
    if twice == twice.trunc() && (2.0..=16.0).contains(&twice) {
        let whole = t.powi(p.trunc() as i32);
        if p.fract() == 0.0 {
            whole
        } else {
            whole * t.sqrt()
        }
    } else {
        t.powf(p)
    }
}

/// The families exercised by the invariant suites, with readable labels.
pub fn builtin_families() -> Vec<(&'static str, YoungFunction)> {
    let p = |e| YoungFunction::power(e).expect("valid exponent");
    let pl = YoungFunction::power_log(3.0).expect("valid exponent");
    vec![
        ("power(2)", p(2.0)),
        ("power(1.5)", p(1.5)),
        ("power_log(3)", pl.clone()),
        ("piecewise(2,3)", YoungFunction::piecewise_power(2.0, 3.0).expect("valid")),
        ("piecewise(2.5,3)", YoungFunction::piecewise_power(2.5, 3.0).expect("valid")),
        ("sum(t^2, power_log(3)/2)", YoungFunction::sum(vec![(1.0, p(2.0)), (0.5, pl.clone())]).expect("valid")),
        ("max(t^2, t^3)", YoungFunction::max(vec![p(2.0), p(3.0)]).expect("valid")),
        ("compose(t^1.5, t^1.5)", YoungFunction::compose(vec![p(1.5), p(1.5)]).expect("valid")),
        ("scaled(power_log(3); 2, 0.5)", pl.rescaled(2.0, 0.5).expect("valid")),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn power_family_closed_forms() {
        let g = YoungFunction::power(2.0).unwrap();
        assert_eq!(g.value(3.0), 9.0);
        assert_eq!(g.derivative(3.0), 6.0);
        assert!(close(g.index_ratio(3.0), 2.0, 1e-15));
        assert_eq!(g.value(1.0), 1.0);
        assert!(g.is_normalized());
        assert_eq!(g.value(-3.0), 9.0);
        assert_eq!(g.derivative(-3.0), -6.0);

        let g = YoungFunction::power(1.5).unwrap();
        assert!(close(g.value(4.0), 8.0, 1e-15));
        assert!(close(g.derivative(4.0), 3.0, 1e-15));
        assert!(close(g.index_ratio(4.0), 1.5, 1e-15));
        assert_eq!((g.p_minus(), g.p_plus()), (1.5, 1.5));
    }

    #[test]
    fn power_rejects_small_exponents() {
        assert!(YoungFunction::power(1.0).is_err());
        assert!(YoungFunction::power(0.5).is_err());
        assert!(YoungFunction::piecewise_power(2.0, 1.0).is_err());
    }

    #[test]
    fn power_log_values_and_index_extrema() {
        let g = YoungFunction::power_log(2.0).unwrap();
        assert_eq!(g.value(1.0), 1.0);
        let e = std::f64::consts::E;
        assert!(close(g.value(e), 2.0 * e * e, 1e-14));
        assert_eq!((g.p_minus(), g.p_plus()), (1.0, 3.0));

        // dense sampling of the quotient over [1e-6, 1e6]
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for k in 0..=120_000 {
            let t = 10f64.powf(-6.0 + 12.0 * k as f64 / 120_000.0);
            let r = g.index_ratio(t);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        assert!(lo >= g.p_minus() && lo - g.p_minus() < 1e-3, "sampled min {lo}");
        assert!((hi - g.p_plus()).abs() < 1e-12, "sampled max {hi}");
    }

    #[test]
    fn power_log_rejects_quotient_below_one() {
        assert!(YoungFunction::power_log(1.5).is_err());
        assert!(YoungFunction::power_log(3.0).is_ok());
    }

    #[test]
    fn power_log_derivative_matches_finite_differences() {
        let g = YoungFunction::power_log(3.0).unwrap();
        for &t in &[0.01, 0.3, 0.9, 1.5, 7.0] {
            let h = 1e-6 * t;
            let fd = (g.value(t + h) - g.value(t - h)) / (2.0 * h);
            assert!(close(g.derivative(t), fd, 1e-7), "t={t}");
        }
    }

    #[test]
    fn piecewise_power_is_continuous_at_one() {
        let g = YoungFunction::piecewise_power(2.0, 3.0).unwrap();
        assert_eq!(g.value(0.5), 0.25);
        assert_eq!(g.value(2.0), 8.0);
        assert_eq!(g.value(1.0), 1.0);
        assert!(close(g.value(1.0 - 1e-12), 1.0, 1e-11));
        assert!(close(g.value(1.0 + 1e-12), 1.0, 1e-11));
        assert_eq!((g.p_minus(), g.p_plus()), (2.0, 3.0));
        // right-continuous derivative
        assert_eq!(g.derivative(1.0), 3.0);
    }

    #[test]
    fn combinators() {
        let t2 = YoungFunction::power(2.0).unwrap();
        let t3 = YoungFunction::power(3.0).unwrap();
        let s = YoungFunction::combine(Combination::Sum, vec![t2.clone(), t3.clone()], &[1.0, 1.0]).unwrap();
        assert_eq!(s.value(1.0), 2.0);
        assert!(!s.is_normalized());
        assert_eq!((s.p_minus(), s.p_plus()), (2.0, 3.0));

        let m = YoungFunction::combine(Combination::Max, vec![t2.clone(), t3.clone()], &[]).unwrap();
        assert_eq!(m.value(0.5), 0.25);
        assert!(m.is_normalized());

        let c = YoungFunction::combine(Combination::Compose, vec![t2.clone(), t2.clone()], &[]).unwrap();
        assert_eq!(c.value(2.0), 16.0);
        assert_eq!((c.p_minus(), c.p_plus()), (4.0, 4.0));
        assert!(close(c.derivative(2.0), 32.0, 1e-15));

        assert!(YoungFunction::combine(Combination::Max, vec![], &[]).is_err());
        assert!(YoungFunction::sum(vec![(0.0, t2)]).is_err());
    }

    #[test]
    fn normalization_rescales_value_only() {
        let t2 = YoungFunction::power(2.0).unwrap();
        let t3 = YoungFunction::power(3.0).unwrap();
        let s = YoungFunction::sum(vec![(1.0, t2), (1.0, t3)]).unwrap();
        let n = s.normalized().unwrap();
        assert!(n.is_normalized());
        assert!(close(n.value(1.0), 1.0, 1e-15));
        assert!(close(n.value(2.0), 6.0, 1e-15));
        assert_eq!((n.p_minus(), n.p_plus()), (s.p_minus(), s.p_plus()));
    }

    #[test]
    fn inverse_examples() {
        let t2 = YoungFunction::power(2.0).unwrap();
        assert_eq!(t2.inverse(9.0).unwrap(), 3.0);
        assert_eq!(t2.inverse(0.0).unwrap(), 0.0);
        let pw = YoungFunction::piecewise_power(2.0, 3.0).unwrap();
        assert!(close(pw.inverse(8.0).unwrap(), 2.0, 1e-15));
        assert!(t2.inverse(-1.0).is_err());

        let pl = YoungFunction::power_log(3.0).unwrap();
        let s = YoungFunction::sum(vec![(2.0, pl.clone()), (1.0, pw.clone())]).unwrap();
        for &y in &[1e-20, 1e-5, 0.3, 1.0, 2.0, 1e4, 1e30] {
            for g in [&pl, &s] {
                let t = g.inverse(y).unwrap();
                assert!(close(g.value(t), y, 1e-13), "y={y}");
            }
        }
        // monotone in y
        let mut prev = 0.0;
        for k in 1..200 {
            let t = s.inverse(k as f64 * 0.05).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn log_integral_closed_forms_match_quadrature() {
        let fams = [
            YoungFunction::power(2.5).unwrap(),
            YoungFunction::power_log(3.0).unwrap(),
            YoungFunction::piecewise_power(2.0, 3.0).unwrap(),
            YoungFunction::sum(vec![
                (1.0, YoungFunction::power(2.0).unwrap()),
                (0.5, YoungFunction::power_log(3.0).unwrap()),
            ])
            .unwrap(),
            YoungFunction::compose(vec![YoungFunction::power_log(3.0).unwrap(), YoungFunction::power(1.5).unwrap()])
                .unwrap(),
            YoungFunction::compose(vec![YoungFunction::power(1.5).unwrap(), YoungFunction::power(1.5).unwrap()])
                .unwrap(),
            YoungFunction::max(vec![YoungFunction::power(2.0).unwrap(), YoungFunction::power(3.0).unwrap()]).unwrap(),
            YoungFunction::max(vec![
                YoungFunction::power(2.0).unwrap().rescaled(3.0, 1.0).unwrap(),
                YoungFunction::power_log(3.0).unwrap(),
                YoungFunction::power(2.5).unwrap(),
            ])
            .unwrap(),
        ];
        for g in &fams {
            for &z in &[1e-3, 0.4, 1.0, 2.5, 40.0] {
                let closed = g.log_integral(z);
                let numeric = g.numeric_log_integral(z);
                assert!(close(closed, numeric, 1e-9), "z={z}: {closed} vs {numeric}");
            }
        }
    }
}
