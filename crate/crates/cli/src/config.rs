//! Run configuration: one JSON document per run.

use std::fs;
use std::path::{Path, PathBuf};

use gfrac::{EigenOptions, Grid, GridSpec, SemilinearOptions, TraceScaling, YoungDescriptor, YoungFunction};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Young,
    Solve,
    Semilinear,
    Degiorgi,
    Verify,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TableSettings {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for TableSettings {
    fn default() -> Self {
        Self { lo: 1e-3, hi: 1e3, points: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeGiorgiSettings {
    pub depth: usize,
    pub scaling: TraceScaling,
}

impl Default for DeGiorgiSettings {
    fn default() -> Self {
        Self { depth: 30, scaling: TraceScaling::SupNorm }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    /// Random discrete functions drawn per randomized check.
    pub functions: usize,
    /// Refinements of the configured grid in the stability ladder.
    pub ladder: usize,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self { functions: 20, ladder: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    pub young: YoungDescriptor,
    pub s: f64,
    pub n: usize,
    pub grid: GridSpec,
    #[serde(default = "default_mu")]
    pub mu: f64,
    /// `F` in the semilinear problem `(-Δ_g)^s u = F'(u)`.
    #[serde(default)]
    pub source: Option<YoungDescriptor>,
    #[serde(default)]
    pub eigen: EigenOptions,
    #[serde(default)]
    pub semilinear: SemilinearOptions,
    #[serde(default)]
    pub degiorgi: DeGiorgiSettings,
    #[serde(default)]
    pub table: TableSettings,
    #[serde(default)]
    pub verify: VerifySettings,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub refine: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_mu() -> f64 {
    1.0
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// A configuration whose parameters have been checked and built.
#[derive(Clone, Debug)]
pub struct Validated {
    pub config: RunConfig,
    pub command: Command,
    pub young: YoungFunction,
    pub source: Option<YoungFunction>,
    pub grid: Grid,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn validate(self) -> CliResult<Validated> {
        let bad = |m: String| Err(CliError::Config(m));
        let command = match self.command {
            Some(c) => c,
            None => return bad("no command given on the command line or in the config".into()),
        };
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s must lie in (0, 1), got {}", self.s));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive and finite, got {}", self.mu));
        }
        if self.grid.bounds.len() != self.n {
            return bad(format!("n = {} does not match a grid with {} axes", self.n, self.grid.bounds.len()));
        }
        if !(self.eigen.tol > 0.0) || !(self.semilinear.tol > 0.0) {
            return bad("solver tolerances must be positive".into());
        }
        let t = &self.table;
        if !(t.lo > 0.0 && t.hi > t.lo && t.points >= 2) {
            return bad(format!("table needs 0 < lo < hi and at least 2 points, got {t:?}"));
        }
        if self.degiorgi.depth == 0 {
            return bad("De Giorgi depth must be at least 1".into());
        }
        if command == Command::Semilinear && self.source.is_none() {
            return bad("the semilinear command needs a `source` descriptor".into());
        }
        let young = self.young.build()?;
        let source = self.source.as_ref().map(|d| d.build()).transpose()?;
        let grid = self.grid.build()?;
        ensure_writable(&self.output)?;
        Ok(Validated { command, young, source, grid, config: self })
    }
}

fn ensure_writable(dir: &Path) -> CliResult<()> {
    let fail = |e: std::io::Error| CliError::Config(format!("output directory {} is not writable: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(fail)?;
    let probe = dir.join(".gfrac-write-probe");
    fs::write(&probe, b"").map_err(fail)?;
    fs::remove_file(&probe).map_err(fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"young": {"family": "power", "p": 2.0}, "s": 0.5, "n": 1,
        "grid": {"bounds": [[-1.0, 1.0]], "nodes": [16]}}"#;

    #[test]
    fn defaults_fill_in_and_round_trip() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.mu, 1.0);
        assert_eq!(c.degiorgi.depth, 30);
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn out_of_range_order_names_the_precondition() {
        let mut c = RunConfig::from_json(MINIMAL).unwrap();
        c.command = Some(Command::Solve);
        c.s = 1.5;
        let err = c.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("s must lie in (0, 1)"));
    }

    #[test]
    fn unknown_keys_are_schema_errors() {
        let text = MINIMAL.replace("\"n\": 1", "\"n\": 1, \"colour\": 3");
        assert_eq!(RunConfig::from_json(&text).unwrap_err().exit_code(), 2);
    }
}
