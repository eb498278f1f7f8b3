//! The critical Sobolev conjugate `G*`, defined through its inverse
//! `I(y) = ∫_0^y G^{-1}(τ) τ^{-1-s/n} dτ`, and the derived functions
//! `H = G* ∘ G^{-1}` and `K(t) = t G(I(1/t))`.

use std::sync::Arc;

use super::{Kind, YoungFunction};
use crate::error::{invalid, precondition, Error, Result};
use crate::interp::MonotoneCubic;
use crate::quadrature::cached_rule;

const LN_TABLE_MIN: f64 = -40.0 * std::f64::consts::LN_10;
const DECADES: usize = 80;
const KNOTS_PER_DECADE: usize = 512;
const LN_LOWER_MIN: f64 = -300.0 * std::f64::consts::LN_10;
const LOWER_PANELS_PER_DECADE: usize = 8;

/// Log-log tabulation of `I = (G*)^{-1}` on `y ∈ [1e-40, 1e40]`.
#[derive(Clone, Debug)]
pub struct CriticalTable {
    base: YoungFunction,
    s: f64,
    n: usize,
    log_inverse: MonotoneCubic,
}

impl CriticalTable {
    pub fn build(base: &YoungFunction, s: f64, n: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(invalid(format!("fractional order must lie in (0, 1), got {s}")));
        }
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !(s * base.p_plus() < n as f64) {
            return Err(precondition(format!(
                "critical conjugate needs s p+ < n, got s = {s}, p+ = {}, n = {n}",
                base.p_plus()
            )));
        }
        let ratio = s / n as f64;
        let ginv = |y: f64| -> Result<f64> {
            let v = base.inverse(y)?;
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::RootFinding(format!("inverse of G at {y:e} returned {v}")))
            }
        };
        // integrand in z = ln τ
        let integrand = |z: f64| -> Result<f64> { Ok(ginv(z.exp())? * (-ratio * z).exp()) };

        // power-law tail below 1e-300 from the local exponent of G^{-1}
        let y_low = LN_LOWER_MIN.exp();
        let beta = (ginv(y_low * 10.0)? / ginv(y_low)?).ln() / std::f64::consts::LN_10;
        if !(beta - ratio > 0.0) {
            return Err(Error::DivergentIntegral(format!(
                "integrand of the critical inverse is not integrable at 0 (local exponent {beta})"
            )));
        }
        let mut acc = ginv(y_low)? * y_low.powf(-ratio) / (beta - ratio);

        let rule8 = cached_rule(8);
        let lower_panels = (LN_TABLE_MIN - LN_LOWER_MIN) / std::f64::consts::LN_10;
        let lower_panels = lower_panels.round() as usize * LOWER_PANELS_PER_DECADE;
        let w = (LN_TABLE_MIN - LN_LOWER_MIN) / lower_panels as f64;
        for k in 0..lower_panels {
            let a = LN_LOWER_MIN + k as f64 * w;
            for (z, wt) in rule8.mapped(a, a + w) {
                acc += wt * integrand(z)?;
            }
        }

        let rule5 = cached_rule(5);
        let intervals = DECADES * KNOTS_PER_DECADE;
        let dz = std::f64::consts::LN_10 / KNOTS_PER_DECADE as f64;
        let mut ys = Vec::with_capacity(intervals + 1);
        let mut ds = Vec::with_capacity(intervals + 1);
        for k in 0..=intervals {
            let z = LN_TABLE_MIN + k as f64 * dz;
            if k > 0 {
                let a = z - dz;
                for (zz, wt) in rule5.mapped(a, z) {
                    acc += wt * integrand(zz)?;
                }
            }
            ys.push(acc.ln());
            ds.push(integrand(z)? / acc);
        }
        if ys.iter().any(|v| !v.is_finite()) {
            return Err(Error::DivergentIntegral("critical inverse table is not finite".into()));
        }
        Ok(Self { base: base.clone(), s, n, log_inverse: MonotoneCubic::new(LN_TABLE_MIN, dz, ys, ds) })
    }

    pub fn base(&self) -> &YoungFunction {
        &self.base
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// `I(y) = (G*)^{-1}(y)`.
    pub fn inverse_star(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        self.log_inverse.eval(y.ln()).exp()
    }

    /// `G*(x)`.
    pub fn star(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return if x.is_nan() { f64::NAN } else { 0.0 };
        }
        self.log_inverse.inverse(x.ln()).exp()
    }

    /// `g*(x)`, the derivative of the tabulated `G*`.
    pub fn star_derivative(&self, x: f64) -> f64 {
        self.star_and_derivative(x).1
    }

    /// `(G*(x), g*(x))` from one table inversion; the log-log slope of the
    /// table approximates `y^{-s/n} G^{-1}(y) / I(y)`.
    pub fn star_and_derivative(&self, x: f64) -> (f64, f64) {
        if !(x > 0.0) {
            return if x.is_nan() { (f64::NAN, f64::NAN) } else { (0.0, 0.0) };
        }
        let z = self.log_inverse.inverse(x.ln());
        let y = z.exp();
        (y, y / (x * self.log_inverse.slope(z)))
    }

    fn star_indices(&self) -> (f64, f64) {
        let nf = self.n as f64;
        let (pm, pp) = (self.base.p_minus(), self.base.p_plus());
        (nf * pm / (nf - self.s * pm), nf * pp / (nf - self.s * pp))
    }
}

/// `G*`, `H` and `K` built from one shared table.
#[derive(Clone, Debug)]
pub struct Embedding {
    table: Arc<CriticalTable>,
}

impl Embedding {
    pub fn new(base: &YoungFunction, s: f64, n: usize) -> Result<Self> {
        Ok(Self { table: Arc::new(CriticalTable::build(base, s, n)?) })
    }

    pub fn table(&self) -> &CriticalTable {
        &self.table
    }

    /// `G*` with index bounds `(n p- / (n - s p-), n p+ / (n - s p+))`.
    pub fn critical(&self) -> YoungFunction {
        let (pm, pp) = self.table.star_indices();
        YoungFunction::from_kind(Kind::Critical(self.table.clone()), pm, pp)
    }

    /// `H = G* ∘ G^{-1}` with index bounds `((p-)* / p+, (p+)* / p-)`.
    pub fn h(&self) -> YoungFunction {
        let (sm, sp) = self.table.star_indices();
        let base = self.table.base();
        YoungFunction::from_kind(Kind::CriticalOverInverse(self.table.clone()), sm / base.p_plus(), sp / base.p_minus())
    }

    /// `K(t) = t G(I(1/t))` for `t > 0`.
    pub fn k(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        t * self.table.base().value(self.table.inverse_star(1.0 / t))
    }
}

pub fn sobolev_conjugate(base: &YoungFunction, s: f64, n: usize) -> Result<YoungFunction> {
    Ok(Embedding::new(base, s, n)?.critical())
}

pub fn h_of(base: &YoungFunction, s: f64, n: usize) -> Result<YoungFunction> {
    Ok(Embedding::new(base, s, n)?.h())
}

pub fn k_of(base: &YoungFunction, s: f64, n: usize, t: f64) -> Result<f64> {
    Ok(Embedding::new(base, s, n)?.k(t))
}
