//! The semilinear Dirichlet problem `(-Δ_g)^s u = f(u)` (or a fixed source),
//! solved by preconditioned descent on
//! `J(u) = Φ_{s,G}(u) - Σ h^n F(u)`, whose critical points satisfy the weak
//! equation `∇Φ_{s,G}(u) / h^n = f(u)`.

use serde::{Deserialize, Serialize};

use crate::descent::{armijo_accepts, axpy, bb_step, diff, dot, sup, Metric, Preconditioner};
use crate::eigen::initial_bump;
use crate::error::{invalid, precondition, Error, Result};
use crate::grid::{DiscreteFunction, Grid};
use crate::operator::{NonlocalOperator, OperatorParams};
use crate::young::{log_grid, Embedding, YoungFunction};

/// Right-hand side of the semilinear problem.
#[derive(Clone, Debug)]
pub enum Source {
    /// `f = F'` for a Young function `F`.
    Nonlinear(YoungFunction),
    /// A nodal source independent of `u`.
    Fixed(Vec<f64>),
}

/// Outcome of sampling `F(k t) / G*(t)` along `t = 10, ..., 10^6`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subcriticality {
    pub thresholds: Vec<f64>,
    /// `ratios[m][j]` for `k = m + 1` and `t = thresholds[j]`.
    pub ratios: Vec<Vec<f64>>,
    pub passes: bool,
}

/// Samples `F(k t) / G*(t)` for `k ∈ {1, 2}` and `t ∈ {10, ..., 10^6}`; it
/// passes when every row decreases and falls by at least three decades.
pub fn check_subcritical(f: &YoungFunction, g: &YoungFunction, s: f64, n: usize) -> Result<Subcriticality> {
    let star = Embedding::new(g, s, n)?.critical();
    let thresholds = log_grid(10.0, 1e6, 6);
    let ratios: Vec<Vec<f64>> =
        [1.0, 2.0].iter().map(|k| thresholds.iter().map(|&t| f.value(k * t) / star.value(t)).collect()).collect();
    let passes = ratios.iter().all(|row| {
        row.windows(2).all(|w| w[1] < w[0]) && row[row.len() - 1] / row[0] < 1e-3 && row.iter().all(|r| r.is_finite())
    });
    Ok(Subcriticality { thresholds, ratios, passes })
}

#[derive(Clone, Debug)]
pub struct SemilinearRhs {
    pub source: Source,
    pub eta_minus: f64,
    pub eta_plus: f64,
}

impl SemilinearRhs {
    pub fn nonlinear(f: YoungFunction) -> Self {
        Self { eta_minus: f.p_minus(), eta_plus: f.p_plus(), source: Source::Nonlinear(f) }
    }

    pub fn fixed(values: Vec<f64>) -> Self {
        Self { source: Source::Fixed(values), eta_minus: 1.0, eta_plus: 1.0 }
    }

    fn eval(&self, u: &[f64]) -> Vec<f64> {
        match &self.source {
            Source::Nonlinear(f) => u.iter().map(|&v| f.derivative(v)).collect(),
            Source::Fixed(h) => h.clone(),
        }
    }

    fn primitive(&self, u: &[f64]) -> f64 {
        match &self.source {
            Source::Nonlinear(f) => u.iter().map(|&v| f.value(v)).sum(),
            Source::Fixed(h) => dot(h, u),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemilinearOptions {
    /// Bound on `sup |∇Φ_{s,G}(u)/h^n - f(u)| / max(sup |f(u)|, sup |∇Φ_{s,G}(u)/h^n|)`.
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub preconditioner: Preconditioner,
    /// Iterations allowed without halving the best residual seen so far
    /// before the run is reported as stagnated.
    pub patience: usize,
    /// Skip the growth check against the critical conjugate.
    pub skip_subcritical_check: bool,
}

impl Default for SemilinearOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 20_000,
            armijo: 1e-4,
            preconditioner: Preconditioner::Auto,
            patience: 1000,
            skip_subcritical_check: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SemilinearResult {
    pub u: DiscreteFunction,
    pub iterations: usize,
    pub residual: f64,
    /// `J(u)` at the returned iterate.
    pub functional: f64,
    pub subcriticality: Option<Subcriticality>,
}

pub fn solve_semilinear(
    grid: &Grid,
    yf: &YoungFunction,
    rhs: &SemilinearRhs,
    params: OperatorParams,
    opts: &SemilinearOptions,
) -> Result<SemilinearResult> {
    let op = NonlocalOperator::new(grid, yf, params)?;
    let hn = grid.node_weight();
    let subcriticality = match (&rhs.source, opts.skip_subcritical_check) {
        (Source::Nonlinear(f), false) => {
            let report = check_subcritical(f, yf, params.s, grid.dim())?;
            if !report.passes {
                return Err(precondition("nonlinearity is not subcritical relative to the critical conjugate"));
            }
            Some(report)
        }
        _ => None,
    };
    let start = match &rhs.source {
        Source::Fixed(h) => {
            if h.len() != grid.len() {
                return Err(invalid(format!("source has {} values for {} nodes", h.len(), grid.len())));
            }
            if h.iter().all(|&v| v == 0.0) {
                return Ok(SemilinearResult {
                    u: DiscreteFunction::zeros(grid.clone()),
                    iterations: 0,
                    residual: 0.0,
                    functional: 0.0,
                    subcriticality,
                });
            }
            vec![0.0; grid.len()]
        }
        Source::Nonlinear(_) => initial_bump(grid).into_values(),
    };
    let metric = Metric::build(opts.preconditioner, &op)?;

    let evaluate = |u: &[f64]| {
        let (e, g) = op.energy_and_gradient(u);
        let f = rhs.eval(u);
        let j = e - hn * rhs.primitive(u);
        let grad: Vec<f64> = g.iter().zip(&f).map(|(gi, fi)| gi - hn * fi).collect();
        let scale = sup(&f).max(sup(&g) / hn);
        let res = if scale > 0.0 { sup(&grad) / (hn * scale) } else { 0.0 };
        (j, grad, res)
    };

    let mut u = start;
    let (mut j, mut grad, mut res) = evaluate(&u);
    let mut prev: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut last_step: Option<f64> = None;
    let (mut best, mut best_at) = (f64::INFINITY, 0);
    for it in 0..=opts.max_iter {
        if res < 0.5 * best {
            (best, best_at) = (res, it);
        } else if it - best_at > opts.patience && res > opts.tol {
            return Err(Error::Stagnation { iterations: it, residual: res });
        }
        if res <= opts.tol {
            return Ok(SemilinearResult {
                u: DiscreteFunction::new(grid.clone(), u)?,
                iterations: it,
                residual: res,
                functional: j,
                subcriticality,
            });
        }
        if it == opts.max_iter {
            break;
        }
        let d = metric.solve(&grad);
        let slope = dot(&grad, &d);
        if !(slope > 0.0) {
            return Err(Error::Stagnation { iterations: it, residual: res });
        }
        let mut alpha = match &prev {
            Some((s, g0, d0)) => bb_step(s, &diff(&grad, g0), &diff(&d, d0)).or(last_step),
            None => None,
        }
        .unwrap_or_else(|| {
            let su = sup(&u);
            let base = if su > 0.0 { su } else { 1.0 };
            0.1 * base / sup(&d)
        });
        let mut accepted = None;
        for _ in 0..60 {
            let trial = axpy(&u, -alpha, &d);
            let (jt, gt, rt) = evaluate(&trial);
            if armijo_accepts(j, jt, alpha, slope, opts.armijo) {
                accepted = Some((trial, jt, gt, rt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, jt, gt, rt)) = accepted else {
            return Err(Error::Stagnation { iterations: it, residual: res });
        };
        prev = Some((diff(&trial, &u), grad, d));
        last_step = Some(alpha);
        u = trial;
        j = jt;
        grad = gt;
        res = rt;
    }
    Err(Error::NotConverged { iterations: opts.max_iter, residual: res })
}
