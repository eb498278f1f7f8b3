//! Command-line front end for gfrac: run configs, result files and the
//! batch verification harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

use config::{Command, Validated};
use error::CliResult;

/// Runs the validated command, writing its artifacts into the output directory.
pub fn run(v: &Validated) -> CliResult<()> {
    match v.command {
        Command::Young => commands::tabulate_young(v),
        Command::Solve => commands::solve(v),
        Command::Semilinear => commands::semilinear(v),
        Command::Degiorgi => commands::degiorgi(v),
        Command::Verify => verify::run_verify(v).map(|_| ()),
    }
}
