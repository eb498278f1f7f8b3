//! Shared pieces of the preconditioned descent solvers.

use nalgebra::{Cholesky, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::operator::NonlocalOperator;

/// Inner product used to turn gradients into search directions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    Identity,
    /// The linear fractional Laplacian of the grid, factored once.
    LinearFractional,
    /// `LinearFractional` up to [`AUTO_DENSE_LIMIT`] nodes, `Identity` beyond.
    #[default]
    Auto,
}

/// Node count up to which [`Preconditioner::Auto`] factors the dense matrix.
pub const AUTO_DENSE_LIMIT: usize = 2048;

pub(crate) enum Metric {
    Identity,
    Dense(Cholesky<f64, Dyn>),
}

impl Metric {
    pub(crate) fn build(kind: Preconditioner, op: &NonlocalOperator) -> Result<Self> {
        let dense = match kind {
            Preconditioner::Identity => false,
            Preconditioner::LinearFractional => true,
            Preconditioner::Auto => op.grid().len() <= AUTO_DENSE_LIMIT,
        };
        if !dense {
            return Ok(Metric::Identity);
        }
        let chol = op
            .linear_matrix()
            .cholesky()
            .ok_or_else(|| crate::error::invalid("linear fractional matrix is not positive definite"))?;
        Ok(Metric::Dense(chol))
    }

    pub(crate) fn solve(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Metric::Identity => v.to_vec(),
            Metric::Dense(c) => c.solve(&DVector::from_column_slice(v)).iter().copied().collect(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn sup(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub(crate) fn axpy(a: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    a.iter().zip(d).map(|(x, y)| x + alpha * y).collect()
}

pub(crate) fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Barzilai–Borwein step in the preconditioned metric, from the change of
/// iterate `s`, of residual `dq`, and of search direction `dd = M^{-1} dq`.
pub(crate) fn bb_step(s: &[f64], dq: &[f64], dd: &[f64]) -> Option<f64> {
    let step = dot(s, dq) / dot(dd, dq);
    (step.is_finite() && step > 0.0).then_some(step)
}

/// Armijo acceptance with a floor at the rounding level of `e0`.
pub(crate) fn armijo_accepts(e0: f64, trial: f64, alpha: f64, slope: f64, c1: f64) -> bool {
    let predicted = c1 * alpha * slope;
    let noise = 1e-12 * e0.abs();
    trial <= e0 - predicted || (predicted < noise && trial <= e0 + noise)
}
