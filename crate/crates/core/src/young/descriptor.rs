//! Declarative description of Young functions, as used in run configs.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::YoungFunction;
use crate::error::{invalid, Result};

/// A family name with parameters, or a combinator tree of descriptors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum YoungDescriptor {
    Power { p: f64 },
    PowerLog { p: f64 },
    PiecewisePower { p: f64, q: f64 },
    Sum { parts: Vec<YoungDescriptor>, coefficients: Vec<f64> },
    Max { parts: Vec<YoungDescriptor> },
    Compose { parts: Vec<YoungDescriptor> },
    Scaled { inner: Box<YoungDescriptor>, value: f64, argument: f64 },
    Normalized { inner: Box<YoungDescriptor> },
}

impl YoungDescriptor {
    pub fn build(&self) -> Result<YoungFunction> {
        let build_all = |parts: &[YoungDescriptor]| parts.iter().map(|d| d.build()).collect::<Result<Vec<_>>>();
        match self {
            Self::Power { p } => YoungFunction::power(*p),
            Self::PowerLog { p } => YoungFunction::power_log(*p),
            Self::PiecewisePower { p, q } => YoungFunction::piecewise_power(*p, *q),
            Self::Sum { parts, coefficients } => {
                if parts.len() != coefficients.len() {
                    return Err(invalid("sum descriptor needs one coefficient per part"));
                }
                YoungFunction::sum(coefficients.iter().copied().zip(build_all(parts)?).collect())
            }
            Self::Max { parts } => YoungFunction::max(build_all(parts)?),
            Self::Compose { parts } => YoungFunction::compose(build_all(parts)?),
            Self::Scaled { inner, value, argument } => inner.build()?.rescaled(*value, *argument),
            Self::Normalized { inner } => inner.build()?.normalized(),
        }
    }
}

/// Writes `t,G` rows for strictly increasing `ts`.
pub fn export_csv<W: Write>(yf: &YoungFunction, ts: &[f64], mut out: W) -> Result<()> {
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("export abscissae must be strictly increasing"));
    }
    writeln!(out, "t,G")?;
    for &t in ts {
        writeln!(out, "{t:e},{:e}", yf.value(t))?;
    }
    Ok(())
}
