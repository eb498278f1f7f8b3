//! Batch verification: every registered invariant runs once against the
//! configured Young function, order, dimension and grid.

use std::cell::OnceCell;

use gfrac::degiorgi::level_checks;
use gfrac::reference::{linear_weak_matrix, quadratic_form};
use gfrac::regularity::{holder_seminorm, sup_norm};
use gfrac::young::{
    chebyshev_bound, check_increasing_quotient, check_inverse_sandwich, check_scaling_sandwich, check_split_sums,
    check_young_equality, check_young_inequality, log_grid, luxemburg_norm, modular, CheckOutcome, Embedding,
};
use gfrac::{
    degiorgi_trace, DiscreteFunction, EigenResult, Grid, GridSpec, NonlocalOperator, OperatorParams, TraceScaling,
    YoungFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::{eigen_on, ladder, write_json};
use crate::config::{RunConfig, Validated};
use crate::error::{CliError, CliResult};

/// Slack for inequalities that are equalities for pure powers.
const SLACK: f64 = 1e-12;
/// Node budget for the quadratic-cost operator checks.
const PAIR_NODES: usize = 512;

/// `(name, module)` for every invariant, in report order.
pub const REGISTRY: [(&str, &str); 22] = [
    ("young_inequality", "young_calculus"),
    ("young_equality", "young_calculus"),
    ("scaling_sandwich", "young_calculus"),
    ("inverse_sandwich", "young_calculus"),
    ("split_sums", "young_calculus"),
    ("h_norm_bound", "young_calculus"),
    ("seminorm_bound", "young_calculus"),
    ("increasing_quotient", "young_calculus"),
    ("luxemburg_homogeneity", "young_calculus"),
    ("linear_equivalence", "frac_operator"),
    ("translation_reflection", "frac_operator"),
    ("energy_convexity", "frac_operator"),
    ("pair_inequality", "frac_operator"),
    ("refinement_consistency", "frac_operator"),
    ("energy_monotonicity", "eigen_solver"),
    ("eigen_identity", "eigen_solver"),
    ("energy_bound", "eigen_solver"),
    ("degiorgi_monotonicity", "eigen_solver"),
    ("level_identity", "eigen_solver"),
    ("test_function_bound", "eigen_solver"),
    ("sup_stability", "eigen_solver"),
    ("holder_stability", "eigen_solver"),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub module: &'static str,
    pub status: Status,
    pub worst_violation: Option<f64>,
    pub tolerance: Option<f64>,
    /// `tolerance - worst_violation`; negative on failure.
    pub margin: Option<f64>,
    pub samples: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub registered: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub checks: Vec<CheckReport>,
}

enum Outcome {
    Measured { worst: f64, tol: f64, samples: usize, detail: String },
    Skipped(String),
}

fn measured(worst: f64, tol: f64, samples: usize, detail: impl Into<String>) -> CliResult<Outcome> {
    Ok(Outcome::Measured { worst, tol, samples, detail: detail.into() })
}

fn from_check(c: CheckOutcome, tol: f64, detail: impl Into<String>) -> CliResult<Outcome> {
    measured(c.worst_violation, tol, c.samples, detail)
}

struct Ladder {
    results: Vec<EigenResult>,
}

struct Ctx<'a> {
    v: &'a Validated,
    params: OperatorParams,
    embedding: Option<Embedding>,
    ladder: OnceCell<Ladder>,
}

impl Ctx<'_> {
    fn g(&self) -> &YoungFunction {
        &self.v.young
    }

    fn s(&self) -> f64 {
        self.v.config.s
    }

    fn rng(&self, check: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.v.config.seed);
        rng.set_stream(check as u64);
        rng
    }

    /// The configured grid, with node counts halved until at most `limit`
    /// nodes remain (as long as every count stays even).
    fn coarse(&self, limit: usize) -> CliResult<Grid> {
        let mut spec: GridSpec = self.v.config.grid.clone();
        while spec.nodes.iter().product::<usize>() > limit && spec.nodes.iter().all(|n| n % 2 == 0 && *n >= 4) {
            spec.nodes.iter_mut().for_each(|n| *n /= 2);
        }
        Ok(spec.build()?)
    }

    fn operator(&self, grid: &Grid, g: &YoungFunction) -> CliResult<NonlocalOperator> {
        Ok(NonlocalOperator::new(grid, g, self.params)?)
    }

    fn ladder(&self) -> CliResult<&Ladder> {
        if self.ladder.get().is_none() {
            let mut results = Vec::new();
            for g in ladder(&self.v.grid, self.v.config.verify.ladder) {
                results.push(eigen_on(self.v, &g)?);
            }
            let _ = self.ladder.set(Ladder { results });
        }
        Ok(self.ladder.get().expect("set above"))
    }

    fn finest(&self) -> CliResult<&EigenResult> {
        let l = self.ladder()?;
        Ok(&l.results[l.results.len() - 1])
    }

    fn run(&self, index: usize) -> CliResult<Outcome> {
        match index {
            0 => self.young_inequality(),
            1 => self.young_equality(),
            2 => self.scaling_sandwich(),
            3 => self.inverse_sandwich(),
            4 => self.split_sums(),
            5 => self.h_norm_bound(),
            6 => self.seminorm_bound(),
            7 => self.increasing_quotient(),
            8 => self.luxemburg_homogeneity(),
            9 => self.linear_equivalence(),
            10 => self.translation_reflection(),
            11 => self.energy_convexity(),
            12 => self.pair_inequality(),
            13 => self.refinement_consistency(),
            14 => self.energy_monotonicity(),
            15 => self.eigen_identity(),
            16 => self.energy_bound(),
            17 => self.degiorgi_monotonicity(),
            18 => self.level_identity(),
            19 => self.test_function_bound(),
            20 => self.stability(|r| Ok(sup_norm(&r.u)), 0.05),
            21 => {
                let s = self.s();
                self.stability(move |r| Ok(holder_seminorm(&r.u, 0.5 * s, s)?), 0.10)
            }
            _ => unreachable!("registry has {} entries", REGISTRY.len()),
        }
    }

    /// Tolerance for paths through the numeric conjugate or inverse.
    fn conjugate_tol(&self) -> f64 {
        let g = self.g();
        if g.is_closed_form() && g.p_minus() == g.p_plus() {
            1e-8
        } else {
            1e-6
        }
    }

    fn young_inequality(&self) -> CliResult<Outcome> {
        let conj = self.g().conjugate()?;
        from_check(
            check_young_inequality(self.g(), &conj, &log_grid(1e-3, 1e3, 50)),
            self.conjugate_tol(),
            "50x50 log grid on [1e-3, 1e3]^2",
        )
    }

    fn young_equality(&self) -> CliResult<Outcome> {
        let conj = self.g().conjugate()?;
        from_check(
            check_young_equality(self.g(), &conj, &log_grid(1e-3, 1e3, 50)),
            1e-8,
            "at the conjugation maximizer",
        )
    }

    fn scaling_sandwich(&self) -> CliResult<Outcome> {
        let tol = if self.g().is_closed_form() { 1e-8 } else { 1e-6 };
        from_check(
            check_scaling_sandwich(self.g(), &log_grid(1e-2, 1e2, 21), &log_grid(1e-2, 1e2, 21)),
            tol,
            "(alpha, t) in [1e-2, 1e2]^2",
        )
    }

    fn inverse_sandwich(&self) -> CliResult<Outcome> {
        let c = check_inverse_sandwich(self.g(), &log_grid(1e-2, 1e2, 21), &log_grid(1e-2, 1e2, 21))?;
        from_check(c, 1e-6, "(alpha, t) in [1e-2, 1e2]^2")
    }

    fn split_sums(&self) -> CliResult<Outcome> {
        let tol = if self.g().is_closed_form() { 1e-8 } else { 1e-6 };
        from_check(check_split_sums(self.g(), &log_grid(1e-3, 1e3, 50)), tol, "50x50 pairs")
    }

    fn random_functions(&self, check: usize, grid: &Grid) -> CliResult<Vec<DiscreteFunction>> {
        let mut rng = self.rng(check);
        (0..self.v.config.verify.functions.max(1))
            .map(|_| DiscreteFunction::new(grid.clone(), random_profile(&mut rng, grid)).map_err(CliError::from))
            .collect()
    }

    fn h_norm_bound(&self) -> CliResult<Outcome> {
        let Some(emb) = &self.embedding else {
            return Ok(Outcome::Skipped("needs s p+ < n".into()));
        };
        let (star, h) = (emb.critical(), emb.h());
        let (pm, pp) = (self.g().p_minus(), self.g().p_plus());
        let mut worst = 0.0_f64;
        let fs = self.random_functions(5, &self.v.grid)?;
        for u in &fs {
            let samples = u.samples();
            let nu = luxemburg_norm(&star, &samples)?;
            let gu = samples.with_values(u.values().iter().map(|&x| self.g().value(x)).collect())?;
            let bound = nu.powf(pp).max(nu.powf(pm));
            worst = worst.max((luxemburg_norm(&h, &gu)? - bound) / bound);
        }
        measured(worst.max(0.0), SLACK, fs.len(), format!("random functions on {} nodes", self.v.grid.len()))
    }

    fn seminorm_bound(&self) -> CliResult<Outcome> {
        // with M = max(Φ, 1), [u] <= M^{1/p-} is equivalent to Φ(u / M^{1/p-}) <= 1
        let op = self.operator(&self.v.grid, self.g())?;
        let pm = self.g().p_minus();
        let fs = self.random_functions(6, &self.v.grid)?;
        let (mut worst, mut cheb) = (0.0_f64, 0.0_f64);
        let mut rng = self.rng(100);
        for (k, u) in fs.iter().enumerate() {
            let e = op.energy(u.values());
            let m = e.max(1.0);
            let lambda = m.powf(1.0 / pm);
            let scaled: Vec<f64> = u.values().iter().map(|x| x / lambda).collect();
            worst = worst.max(op.energy(&scaled) - 1.0);
            if k == 0 {
                worst = worst.max(op.seminorm(u.values())? / lambda - 1.0);
            }
            let pick = u.values()[rng.gen_range(0..u.values().len())].abs();
            if pick > 0.0 {
                let (above, bound) = chebyshev_bound(self.g(), &u.samples(), pick)?;
                cheb = cheb.max((above - bound) / bound);
            }
        }
        measured(
            worst.max(cheb).max(0.0),
            SLACK,
            fs.len(),
            format!("modular criterion plus one direct seminorm; Chebyshev excess {:.2e}", cheb.max(0.0)),
        )
    }

    fn increasing_quotient(&self) -> CliResult<Outcome> {
        if self.embedding.is_none() {
            return Ok(Outcome::Skipped("needs s p+ < n".into()));
        }
        let c = check_increasing_quotient(self.g(), self.s(), self.v.config.n, &log_grid(1e-6, 1e6, 2001))?;
        from_check(c, 0.0, "2001 points on [1e-6, 1e6]")
    }

    fn luxemburg_homogeneity(&self) -> CliResult<Outcome> {
        let fs = self.random_functions(8, &self.v.grid)?;
        let mut rng = self.rng(108);
        let mut worst = 0.0_f64;
        for u in &fs {
            let samples = u.samples();
            let n = luxemburg_norm(self.g(), &samples)?;
            let c = 10f64.powf(rng.gen_range(-2.0..2.0));
            let cu = samples.with_values(u.values().iter().map(|x| c * x).collect())?;
            let m = luxemburg_norm(self.g(), &cu)?;
            worst = worst.max((m - c * n).abs() / m);
            let unit = samples.with_values(u.values().iter().map(|x| x / n).collect())?;
            worst = worst.max((modular(self.g(), &unit) - 1.0).abs());
        }
        measured(worst, SLACK, fs.len(), "homogeneity and unit modular")
    }

    fn linear_equivalence(&self) -> CliResult<Outcome> {
        let grid = self.coarse(PAIR_NODES)?;
        let g = YoungFunction::power(2.0)?.rescaled(0.5, 1.0)?;
        let op = self.operator(&grid, &g)?;
        let a = linear_weak_matrix(&grid, self.s());
        let hn = grid.node_weight();
        let mut worst = 0.0_f64;
        let fs = self.random_functions(9, &grid)?;
        for u in fs.iter().take(5) {
            let u = u.values();
            let au: Vec<f64> = (0..u.len()).map(|i| (0..u.len()).map(|j| a[(i, j)] * u[j]).sum()).collect();
            let scale = au.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            let weak = op.weak_operator(u);
            let (e, grad) = op.energy_and_gradient(u);
            for i in 0..u.len() {
                worst = worst.max((weak[i] - au[i]).abs() / scale).max((grad[i] / hn - au[i]).abs() / scale);
            }
            let quad = 0.5 * hn * quadratic_form(&a, u);
            worst = worst.max((e - quad).abs() / quad);
        }
        measured(
            worst,
            1e-10,
            fs.len().min(5),
            format!("g(t) = t against the assembled matrix on {} nodes", grid.len()),
        )
    }

    fn translation_reflection(&self) -> CliResult<Outcome> {
        let grid = self.coarse(PAIR_NODES)?;
        let moved = grid.translated([0.375, -1.25]);
        let (op, op_moved) = (self.operator(&grid, self.g())?, self.operator(&moved, self.g())?);
        let fs = self.random_functions(10, &grid)?;
        let mut worst = 0.0_f64;
        for u in fs.iter().take(3) {
            let u = u.values();
            let (e, em) = (op.energy(u), op_moved.energy(u));
            worst = worst.max((e - em).abs() / e);
            let (a, am) = (op.apply(u), op_moved.apply(u));
            let scale = sup_slice(&a);
            worst = worst.max(a.iter().zip(&am).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale);

            let mirror = reflection(&grid);
            let sym: Vec<f64> = (0..u.len()).map(|i| u[i] + u[mirror[i]]).collect();
            let a = op.apply(&sym);
            let scale = sup_slice(&a);
            worst = worst.max((0..a.len()).map(|i| (a[i] - a[mirror[i]]).abs()).fold(0.0, f64::max) / scale);
        }
        measured(worst, 1e-10, fs.len().min(3), "translated grid and mirrored symmetric data")
    }

    fn energy_convexity(&self) -> CliResult<Outcome> {
        let grid = self.coarse(PAIR_NODES)?;
        let op = self.operator(&grid, self.g())?;
        let fs = self.random_functions(11, &grid)?;
        let mut worst = 0.0_f64;
        let mut pairs = 0;
        for w in fs.chunks(2).filter(|w| w.len() == 2) {
            let (u, v) = (w[0].values(), w[1].values());
            let phi = |t: f64| op.energy(&u.iter().zip(v).map(|(a, b)| a + t * b).collect::<Vec<_>>());
            let values: Vec<f64> = (0..=20).map(|k| phi(-1.0 + 0.1 * k as f64)).collect();
            let scale = values.iter().fold(0.0_f64, |m, x| m.max(*x));
            for t in values.windows(3) {
                worst = worst.max(-(t[0] - 2.0 * t[1] + t[2]) / scale);
            }
            pairs += 1;
        }
        measured(worst.max(0.0), 1e-10, pairs, "second differences along 21-point segments")
    }

    fn pair_inequality(&self) -> CliResult<Outcome> {
        let grid = self.coarse(PAIR_NODES)?;
        let xs = grid.coordinates();
        let g = self.g();
        let pm = g.p_minus();
        let s = self.s();
        let fs = self.random_functions(12, &grid)?;
        let mut worst = 0.0_f64;
        let mut record = |dv: f64, dvp: f64| {
            let rhs = pm * g.value(dvp);
            if rhs > 0.0 {
                worst = worst.max((rhs - g.derivative(dv) * dvp) / rhs);
            }
        };
        for u in fs.iter().take(3) {
            let v = u.values();
            for i in 0..v.len() {
                for j in 0..v.len() {
                    if i != j {
                        let r = (xs[i][0] - xs[j][0]).hypot(xs[i][1] - xs[j][1]).powf(s);
                        record((v[i] - v[j]) / r, (v[i].max(0.0) - v[j].max(0.0)) / r);
                    }
                }
                let r = grid.distance_to_boundary(xs[i]).powf(s);
                record(v[i] / r, v[i].max(0.0) / r);
                record(-v[i] / r, -v[i].max(0.0) / r);
            }
        }
        measured(worst.max(0.0), SLACK, fs.len().min(3), "all node pairs and one exterior point per node")
    }

    fn refinement_consistency(&self) -> CliResult<Outcome> {
        let mut grid = self.coarse(64)?;
        let (lo, hi) = (grid.lower(), grid.upper());
        let dim = grid.dim();
        let center: Vec<f64> = (0..dim).map(|a| 0.5 * (lo[a] + hi[a])).collect();
        let radius = 0.4 * (0..dim).map(|a| hi[a] - lo[a]).fold(f64::INFINITY, f64::min);
        let mut energies = Vec::new();
        for _ in 0..4 {
            let u = DiscreteFunction::from_fn(grid.clone(), |p| {
                let r2: f64 = (0..dim).map(|a| (p[a] - center[a]).powi(2)).sum::<f64>() / (radius * radius);
                if r2 < 1.0 {
                    (1.0 - r2).powi(2)
                } else {
                    0.0
                }
            })?;
            energies.push(self.operator(&grid, self.g())?.energy(u.values()));
            grid = grid.refined();
        }
        let steps: Vec<f64> = energies.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let last = energies[energies.len() - 1];
        let worst = steps.windows(2).map(|w| (w[1] - w[0]) / last).fold(0.0, f64::max);
        measured(worst, 0.0, energies.len(), format!("energies {energies:.6?}; successive differences must shrink"))
    }

    fn energy_monotonicity(&self) -> CliResult<Outcome> {
        let mut worst = 0.0_f64;
        let mut samples = 0;
        for r in &self.ladder()?.results {
            for w in r.energy_history.windows(2) {
                worst = worst.max((w[1] - w[0]) / w[0]);
                samples += 1;
            }
        }
        measured(worst.max(0.0), 1e-12, samples, "accepted steps over the refinement ladder")
    }

    fn eigen_identity(&self) -> CliResult<Outcome> {
        let mut worst = 0.0_f64;
        let results = &self.ladder()?.results;
        for r in results {
            let op = self.operator(r.u.grid(), self.g())?;
            let u = r.u.values();
            let lhs = op.pairing(u, u);
            let hn = r.u.grid().node_weight();
            let rhs: f64 = r.lambda * u.iter().map(|&x| hn * self.g().derivative(x) * x).sum::<f64>();
            worst = worst.max((lhs - rhs).abs() / lhs.abs());
        }
        measured(worst, 1e-8, results.len(), "pairing against lambda times the weighted g(u) u sum")
    }

    fn energy_bound(&self) -> CliResult<Outcome> {
        let g = self.g();
        let mut worst = f64::NEG_INFINITY;
        let results = &self.ladder()?.results;
        for r in results {
            let rhs = g.p_plus() / g.p_minus() * r.lambda * modular(g, &r.u.samples());
            worst = worst.max((r.energy - rhs) / rhs);
        }
        measured(worst.max(0.0), SLACK, results.len(), format!("largest (lhs - rhs)/rhs = {worst:.3e}"))
    }

    fn trace(&self) -> CliResult<gfrac::DeGiorgiTrace> {
        let r = self.finest()?;
        Ok(degiorgi_trace(&r.u, self.g(), self.v.config.degiorgi.depth, self.v.config.degiorgi.scaling)?)
    }

    fn degiorgi_monotonicity(&self) -> CliResult<Outcome> {
        let t = self.trace()?;
        let worst = t.a.windows(2).map(|w| if w[1] <= w[0] { 0.0 } else { (w[1] - w[0]) / w[0] }).fold(0.0, f64::max);
        measured(worst, 0.0, t.a.len(), format!("a_0 = {:.3e}, a_K = {:.3e}", t.a[0], t.a[t.a.len() - 1]))
    }

    fn level_identity(&self) -> CliResult<Outcome> {
        let r = self.finest()?;
        let op = self.operator(r.u.grid(), self.g())?;
        let depth = self.v.config.degiorgi.depth;
        let scale = match self.v.config.degiorgi.scaling {
            TraceScaling::Fixed(c) => c,
            TraceScaling::SupNorm => sup_norm(&r.u) * (1.0 + 1e-6),
        };
        let mut worst = 0.0_f64;
        let mut n = 0;
        for report in level_checks(&r.u, &op, depth, scale, None)? {
            worst = worst.max(report.comparison_excess);
            if report.inclusion_violations > 0 {
                worst = f64::INFINITY;
            }
            n += 1;
        }
        measured(worst, 4.0 * f64::EPSILON, n, "inclusion and comparison on every level set")
    }

    fn test_function_bound(&self) -> CliResult<Outcome> {
        let r = self.finest()?;
        let op = self.operator(r.u.grid(), self.g())?;
        let reports = level_checks(&r.u, &op, self.v.config.degiorgi.depth, 1.0, Some(r.lambda))?;
        let ratio = |pick: fn(&gfrac::degiorgi::LevelReport) -> Option<(f64, f64)>| {
            reports.iter().filter_map(pick).map(|(l, r)| if r > 0.0 { l / r } else { 0.0 }).fold(0.0, f64::max)
        };
        let active = reports.iter().filter(|r| r.energy_bound.is_some_and(|(l, _)| l > 0.0)).count();
        if active == 0 {
            return Ok(Outcome::Skipped("sup |u| <= 1/2, so every truncation of the eigenfunction vanishes".into()));
        }
        let (valid, literal) = (ratio(|r| r.energy_bound), ratio(|r| r.energy_bound_next_level));
        measured(
            (valid - 1.0).max(0.0),
            0.0,
            reports.len(),
            format!("{active} nonvanishing levels, worst lhs/rhs {valid:.4}; with the same-level modular {literal:.4} (reported only)"),
        )
    }

    fn stability(&self, f: impl Fn(&EigenResult) -> CliResult<f64>, tol: f64) -> CliResult<Outcome> {
        let results = &self.ladder()?.results;
        if results.len() < 2 {
            return Ok(Outcome::Skipped("needs at least one refinement".into()));
        }
        let values = results.iter().map(&f).collect::<CliResult<Vec<_>>>()?;
        let change = values.windows(2).map(|w| (w[1] - w[0]).abs() / w[0].abs()).fold(0.0, f64::max);
        let nodes: Vec<usize> = results.iter().map(|r| r.u.grid().len()).collect();
        measured(change, tol, values.len(), format!("values {values:.6?} on {nodes:?} nodes"))
    }
}

fn sup_slice(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE)
}

/// Index of each node's mirror image across the first axis.
fn reflection(grid: &Grid) -> Vec<usize> {
    let [nx, _] = grid.counts();
    (0..grid.len())
        .map(|k| {
            let [i, j] = grid.multi_index(k);
            grid.linear_index(nx - 1 - i, j)
        })
        .collect()
}

/// A smooth random profile plus noise, with amplitude spread over four decades.
fn random_profile(rng: &mut ChaCha8Rng, grid: &Grid) -> Vec<f64> {
    let (lo, hi) = (grid.lower(), grid.upper());
    let amplitude = 10f64.powf(rng.gen_range(-2.0..2.0));
    let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let noise = rng.gen_range(0.0..0.5);
    grid.coordinates()
        .iter()
        .map(|p| {
            let mut smooth = 0.0;
            for (m, c) in coeffs.iter().enumerate() {
                let mut term = *c;
                for a in 0..grid.dim() {
                    let x = (p[a] - lo[a]) / (hi[a] - lo[a]);
                    term *= ((m + 1) as f64 * std::f64::consts::PI * x).sin();
                }
                smooth += term;
            }
            amplitude * (smooth + noise * rng.gen_range(-1.0..1.0))
        })
        .collect()
}

pub fn verify(v: &Validated) -> CliResult<VerifyReport> {
    let c = &v.config;
    let embedding = match Embedding::new(&v.young, c.s, c.n) {
        Ok(e) => Some(e),
        Err(gfrac::Error::Precondition(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let ctx = Ctx { v, params: OperatorParams::new(c.s)?, embedding, ladder: OnceCell::new() };
    let mut checks = Vec::with_capacity(REGISTRY.len());
    for (index, &(name, module)) in REGISTRY.iter().enumerate() {
        let report = match ctx.run(index)? {
            Outcome::Skipped(reason) => CheckReport {
                name,
                module,
                status: Status::Skipped,
                worst_violation: None,
                tolerance: None,
                margin: None,
                samples: 0,
                detail: reason,
            },
            Outcome::Measured { worst, tol, samples, detail } => CheckReport {
                name,
                module,
                status: if worst <= tol { Status::Pass } else { Status::Fail },
                worst_violation: Some(worst),
                tolerance: Some(tol),
                margin: Some(tol - worst),
                samples,
                detail,
            },
        };
        checks.push(report);
    }
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    Ok(VerifyReport {
        config: c.clone(),
        registered: REGISTRY.len(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        checks,
    })
}

/// Writes `verify_report.json` and fails with the verify status if any check failed.
pub fn run_verify(v: &Validated) -> CliResult<VerifyReport> {
    let report = verify(v)?;
    write_json(&v.config.output, "verify_report.json", &report)?;
    if report.failed > 0 {
        let names: Vec<&str> = report.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name).collect();
        return Err(CliError::Verify(format!("{} checks failed: {}", report.failed, names.join(", "))));
    }
    Ok(report)
}
