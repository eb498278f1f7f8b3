//! The non-verify commands and the files they write.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gfrac::degiorgi::level_checks;
use gfrac::regularity::{holder_seminorm, sup_norm};
use gfrac::young::{log_grid, Embedding};
use gfrac::{
    degiorgi_trace, solve_eigen, solve_semilinear, DiscreteFunction, EigenResult, Grid, NonlocalOperator,
    OperatorParams, SemilinearRhs, YoungFunction,
};
use serde::Serialize;

use crate::config::Validated;
use crate::error::{CliError, CliResult};

pub(crate) fn create(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub(crate) fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<()> {
    let mut out = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn write_function(dir: &Path, name: &str, u: &DiscreteFunction) -> CliResult<()> {
    let mut out = create(dir, name)?;
    u.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

/// Empty field when the value is unavailable.
fn field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// `young_table.csv` with `t, G, g, G̃, G*, H, K` on a log grid. The last
/// three columns stay empty when `s p+ >= n`.
pub fn tabulate_young(v: &Validated) -> CliResult<()> {
    let c = &v.config;
    let g = &v.young;
    let conj = g.conjugate()?;
    let emb = match Embedding::new(g, c.s, c.n) {
        Ok(e) => Some(e),
        Err(gfrac::Error::Precondition(msg)) => {
            eprintln!("note: {msg}; G*, H and K columns left empty");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let (star, h) = match &emb {
        Some(e) => (Some(e.critical()), Some(e.h())),
        None => (None, None),
    };
    let mut out = create(&c.output, "young_table.csv")?;
    writeln!(out, "t,G,g,Gtilde,Gstar,H,K")?;
    for t in log_grid(c.table.lo, c.table.hi, c.table.points) {
        writeln!(
            out,
            "{t:e},{:e},{:e},{:e},{},{},{}",
            g.value(t),
            g.derivative(t),
            conj.value(t),
            field(star.as_ref().map(|f| f.value(t))),
            field(h.as_ref().map(|f| f.value(t))),
            field(emb.as_ref().map(|e| e.k(t))),
        )?;
    }
    out.flush()?;
    Ok(())
}

/// The configured grid followed by `refine` halvings of its spacing.
pub fn ladder(grid: &Grid, refine: usize) -> Vec<Grid> {
    let mut out = vec![grid.clone()];
    for _ in 0..refine {
        let next = out[out.len() - 1].refined();
        out.push(next);
    }
    out
}

#[derive(Serialize)]
struct EigenSummary<'a> {
    nodes: usize,
    spacing: f64,
    lambda: f64,
    mu: f64,
    iterations: usize,
    residual: f64,
    energy: f64,
    sup_norm: f64,
    holder_seminorm: f64,
    embedding_condition: bool,
    energy_history: &'a [f64],
}

fn summarize(res: &EigenResult, s: f64) -> CliResult<EigenSummary<'_>> {
    let grid = res.u.grid();
    Ok(EigenSummary {
        nodes: grid.len(),
        spacing: grid.spacing(),
        lambda: res.lambda,
        mu: res.mu,
        iterations: res.iterations,
        residual: res.residual,
        energy: res.energy,
        sup_norm: sup_norm(&res.u),
        holder_seminorm: holder_seminorm(&res.u, 0.5 * s, s)?,
        embedding_condition: res.embedding_condition,
        energy_history: &res.energy_history,
    })
}

pub fn eigen_on(v: &Validated, grid: &Grid) -> CliResult<EigenResult> {
    let c = &v.config;
    Ok(solve_eigen(grid, &v.young, OperatorParams::new(c.s)?, c.mu, &c.eigen)?)
}

/// `eigen_result.json` and `eigenfunction.csv` for the finest grid, plus
/// `refinement.csv` when more than one grid was solved.
pub fn solve(v: &Validated) -> CliResult<()> {
    let c = &v.config;
    let grids = ladder(&v.grid, c.refine);
    let mut results = Vec::with_capacity(grids.len());
    for g in &grids {
        results.push(eigen_on(v, g)?);
    }
    let summaries = results.iter().map(|r| summarize(r, c.s)).collect::<CliResult<Vec<_>>>()?;
    let finest = &results[results.len() - 1];
    write_json(&c.output, "eigen_result.json", &summaries[summaries.len() - 1])?;
    write_function(&c.output, "eigenfunction.csv", &finest.u)?;
    if results.len() > 1 {
        let mut out = create(&c.output, "refinement.csv")?;
        writeln!(out, "level,nodes,h,lambda,sup_norm,holder_seminorm,energy,iterations,residual")?;
        for (k, r) in summaries.iter().enumerate() {
            writeln!(
                out,
                "{k},{},{:e},{:e},{:e},{:e},{:e},{},{:e}",
                r.nodes, r.spacing, r.lambda, r.sup_norm, r.holder_seminorm, r.energy, r.iterations, r.residual
            )?;
        }
        out.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SemilinearSummary<'a> {
    nodes: usize,
    spacing: f64,
    iterations: usize,
    residual: f64,
    functional: f64,
    sup_norm: f64,
    subcriticality: &'a Option<gfrac::semilinear::Subcriticality>,
}

/// `semilinear_result.json` and `semilinear_solution.csv`, plus
/// `refinement.csv` under `--refine`.
pub fn semilinear(v: &Validated) -> CliResult<()> {
    let c = &v.config;
    let f: YoungFunction = v.source.clone().ok_or_else(|| CliError::Config("missing source".into()))?;
    let rhs = SemilinearRhs::nonlinear(f);
    let params = OperatorParams::new(c.s)?;
    let mut results = Vec::new();
    for g in ladder(&v.grid, c.refine) {
        results.push(solve_semilinear(&g, &v.young, &rhs, params, &c.semilinear)?);
    }
    let summaries: Vec<_> = results
        .iter()
        .map(|r| SemilinearSummary {
            nodes: r.u.grid().len(),
            spacing: r.u.grid().spacing(),
            iterations: r.iterations,
            residual: r.residual,
            functional: r.functional,
            sup_norm: sup_norm(&r.u),
            subcriticality: &r.subcriticality,
        })
        .collect();
    write_json(&c.output, "semilinear_result.json", &summaries[summaries.len() - 1])?;
    write_function(&c.output, "semilinear_solution.csv", &results[results.len() - 1].u)?;
    if results.len() > 1 {
        let mut out = create(&c.output, "refinement.csv")?;
        writeln!(out, "level,nodes,h,functional,sup_norm,iterations,residual")?;
        for (k, r) in summaries.iter().enumerate() {
            writeln!(
                out,
                "{k},{},{:e},{:e},{:e},{},{:e}",
                r.nodes, r.spacing, r.functional, r.sup_norm, r.iterations, r.residual
            )?;
        }
        out.flush()?;
    }
    Ok(())
}

/// Solves the eigenproblem, then writes `degiorgi_trace.csv` and
/// `degiorgi_fit.json`. Fails with the verify status when a level check or
/// the recursion fit does not hold.
pub fn degiorgi(v: &Validated) -> CliResult<()> {
    let c = &v.config;
    let res = eigen_on(v, &v.grid)?;
    let depth = c.degiorgi.depth;
    let trace = degiorgi_trace(&res.u, &v.young, depth, c.degiorgi.scaling)?;
    let op = NonlocalOperator::new(&v.grid, &v.young, OperatorParams::new(c.s)?)?;
    let levels = level_checks(&res.u, &op, depth, 1.0, Some(res.lambda))?;
    let mut out = create(&c.output, "degiorgi_trace.csv")?;
    writeln!(
        out,
        "k,level,a_k,inclusion_violations,comparison_excess,pair_shortfall,pairing_margin,energy_lhs,energy_rhs,passes"
    )?;
    for (k, a) in trace.a.iter().enumerate() {
        let level = 1.0 - (-(k as f64)).exp2();
        match levels.get(k) {
            Some(r) => {
                let (l, rhs) = r.energy_bound.map_or((None, None), |(l, rr)| (Some(l), Some(rr)));
                writeln!(
                    out,
                    "{k},{level:e},{a:e},{},{:e},{:e},{:e},{},{},{}",
                    r.inclusion_violations,
                    r.comparison_excess,
                    r.pair_shortfall,
                    r.pairing_margin,
                    field(l),
                    field(rhs),
                    r.passes()
                )?;
            }
            None => writeln!(out, "{k},{level:e},{a:e},,,,,,,")?,
        }
    }
    out.flush()?;

    #[derive(Serialize)]
    struct FitReport<'a> {
        lambda: f64,
        scale: f64,
        nonincreasing: bool,
        failing_levels: Vec<usize>,
        fit: &'a gfrac::degiorgi::RecursionFit,
    }
    let failing_levels: Vec<usize> = levels.iter().filter(|r| !r.passes()).map(|r| r.k).collect();
    let report = FitReport {
        lambda: res.lambda,
        scale: trace.scale,
        nonincreasing: trace.is_nonincreasing(),
        failing_levels,
        fit: &trace.fit,
    };
    write_json(&c.output, "degiorgi_fit.json", &report)?;
    if !report.failing_levels.is_empty() || !report.nonincreasing || !trace.fit.holds {
        return Err(CliError::Verify(format!(
            "De Giorgi checks failed at levels {:?} (nonincreasing: {}, fit holds: {})",
            report.failing_levels, report.nonincreasing, trace.fit.holds
        )));
    }
    Ok(())
}
