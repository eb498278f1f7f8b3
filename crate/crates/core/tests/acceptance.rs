//! Acceptance criteria for the library, one pass/fail line each.
//!
//! Runs under a custom harness so the report is printed on every run.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gfrac::degiorgi::{level_checks, LevelReport};
use gfrac::reference::{continuous_operator_1d, linear_weak_matrix, quadratic_form, smallest_eigenpair};
use gfrac::regularity::{holder_seminorm, sup_norm};
use gfrac::semilinear::check_subcritical;
use gfrac::young::Embedding;
use gfrac::young::{builtin_families, chebyshev_bound, iterate_recursion, luxemburg_norm, sequence_threshold};
use gfrac::young::{
    check_convexity, check_delta2, check_double_conjugacy, check_increasing_quotient, check_index_bounds,
    check_inverse_sandwich, check_scaling_sandwich, check_split_sums, check_young_equality, check_young_inequality,
    log_grid, CheckOutcome,
};
use gfrac::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = std::result::Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Verdict,
}

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lib<T>(r: gfrac::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn young_suite() -> Verdict {
    let grid = log_grid(1e-3, 1e3, 121);
    let alphas = log_grid(1e-2, 1e2, 9);
    let (s, n) = (0.2, 1);
    let mut failures = Vec::new();
    let mut worst_closed = 0.0_f64;
    let mut worst_numeric = 0.0_f64;
    for (label, g) in builtin_families() {
        let conj = lib(g.conjugate())?;
        let closed = g.is_closed_form();
        let power = conj.p_minus() == conj.p_plus();
        let mut record = |check: &str, outcome: CheckOutcome, closed_path: bool| {
            let tol = if closed_path { 1e-8 } else { 1e-6 };
            if closed_path {
                worst_closed = worst_closed.max(outcome.worst_violation);
            } else {
                worst_numeric = worst_numeric.max(outcome.worst_violation);
            }
            if !outcome.passes(tol) {
                failures.push(format!("{label}/{check}={:.2e}", outcome.worst_violation));
            }
        };
        // the conjugate and the inverse rely on root finding except for pure powers
        record("young_inequality", check_young_inequality(&g, &conj, &grid), closed && power);
        record("young_equality", check_young_equality(&g, &conj, &grid), closed && power);
        record("convexity", check_convexity(&g, &grid), closed);
        record("index_bounds", check_index_bounds(&g, &grid), closed);
        record("delta2", check_delta2(&g, &grid), closed);
        record("conjugate_delta2", check_delta2(&conj, &grid), false);
        record("scaling_sandwich", check_scaling_sandwich(&g, &alphas, &grid), closed);
        record("inverse_sandwich", lib(check_inverse_sandwich(&g, &alphas, &grid))?, false);
        record("split_sums", check_split_sums(&g, &grid), closed);
        record("double_conjugacy", lib(check_double_conjugacy(&g, &grid))?, false);
        record("increasing_quotient", lib(check_increasing_quotient(&g, s, n, &grid))?, false);
    }
    ensure(
        failures.is_empty(),
        format!(
            "9 families, worst closed-form {worst_closed:.2e} (tol 1e-8), worst numeric {worst_numeric:.2e} (tol 1e-6){}",
            if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join(", ")) }
        ),
    )
}

fn k_bound() -> Verdict {
    let grid = log_grid(1e-4, 1e4, 161);
    let emb = lib(Embedding::new(&lib(YoungFunction::power(2.0))?, 0.5, 2))?;
    // G^{-1}(τ) τ^{-1-s/n} = τ^{-3/4} integrates to 4 y^{1/4}, so K(t) = t (4 t^{-1/4})^2
    let power_err = grid.iter().map(|&t| rel(emb.k(t), 16.0 * t.sqrt())).fold(0.0, f64::max);
    let mut details = vec![format!("power K rel err {power_err:.2e} (tol 1e-2)")];
    let mut ok = power_err < 1e-2;

    let (s, n) = (0.4, 2);
    let coarse = log_grid(1e-4, 1e4, 41);
    let fine = log_grid(1e-4, 1e4, 4001);
    let families = [
        ("power_log(3)", lib(YoungFunction::power_log(3.0))?),
        ("piecewise(2,3)", lib(YoungFunction::piecewise_power(2.0, 3.0))?),
        ("piecewise(2.5,3)", lib(YoungFunction::piecewise_power(2.5, 3.0))?),
    ];
    for (label, g) in families {
        let emb = lib(Embedding::new(&g, s, n))?;
        let q = 0.95 * g.p_minus();
        let ratio = |t: f64| emb.k(t) / t.max(t.powf(s * q / n as f64));
        let c = coarse.iter().map(|&t| ratio(t)).fold(0.0, f64::max);
        let worst = fine.iter().map(|&t| ratio(t)).fold(0.0, f64::max);
        let holds = c.is_finite() && worst <= 1.05 * c;
        ok &= holds;
        details.push(format!("{label} C={c:.4} fine/coarse={:.4}", worst / c));
    }
    ensure(ok, details.join("; "))
}

fn random_profile(rng: &mut ChaCha8Rng, xs: &[[f64; 2]]) -> Vec<f64> {
    let amplitude = 10f64.powf(rng.gen_range(-2.0..2.0));
    let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let noise = rng.gen_range(0.0..0.5);
    xs.iter()
        .map(|p| {
            let x = p[0];
            let smooth: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c * ((m + 1) as f64 * std::f64::consts::FRAC_PI_2 * (x + 1.0)).sin())
                .sum();
            amplitude * (smooth + noise * rng.gen_range(-1.0..1.0))
        })
        .collect()
}

fn norm_bounds() -> Verdict {
    // identities hold with equality for pure powers, so compare at the root solver's accuracy
    const SLACK: f64 = 1e-12;
    let grid = lib(Grid::interval(-1.0, 1.0, 1000))?;
    let xs = grid.coordinates();
    let (s, n) = (0.2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut checked, mut violations, mut direct) = (0usize, Vec::new(), 0usize);
    for (label, g) in builtin_families() {
        let emb = lib(Embedding::new(&g, s, n))?;
        let (star, h) = (emb.critical(), emb.h());
        let op = lib(NonlocalOperator::new(&grid, &g, lib(OperatorParams::new(s))?))?;
        let (pm, pp) = (g.p_minus(), g.p_plus());
        for trial in 0..200 {
            let u = lib(DiscreteFunction::new(grid.clone(), random_profile(&mut rng, &xs)))?;
            let samples = u.samples();

            let nu = lib(luxemburg_norm(&star, &samples))?;
            let gu = lib(samples.with_values(u.values().iter().map(|&v| g.value(v)).collect()))?;
            let nh = lib(luxemburg_norm(&h, &gu))?;
            if nh > nu.powf(pp).max(nu.powf(pm)) * (1.0 + SLACK) {
                violations.push(format!("{label}#{trial} H-norm"));
            }

            // with M = max(Φ, 1), [u] <= M^{1/p-} is equivalent to Φ(u / M^{1/p-}) <= 1
            let e = op.energy(u.values());
            let m = e.max(1.0);
            let lambda = m.powf(1.0 / pm);
            let scaled_energy =
                if e > 1.0 { op.energy(&u.values().iter().map(|v| v / lambda).collect::<Vec<_>>()) } else { e };
            if scaled_energy > 1.0 + SLACK {
                violations.push(format!("{label}#{trial} seminorm"));
            }
            if trial < 2 {
                direct += 1;
                if lib(op.seminorm(u.values()))? > lambda * (1.0 + SLACK) {
                    violations.push(format!("{label}#{trial} seminorm (direct)"));
                }
            }

            for _ in 0..5 {
                let pick = u.values()[rng.gen_range(0..u.values().len())].abs();
                let t = pick * rng.gen_range(0.5..1.5);
                if t > 0.0 {
                    let (above, bound) = lib(chebyshev_bound(&g, &samples, t))?;
                    if above > bound * (1.0 + SLACK) {
                        violations.push(format!("{label}#{trial} chebyshev"));
                    }
                }
            }
            checked += 1;
        }
    }
    ensure(
        violations.is_empty(),
        format!(
            "{checked} functions on 1000 nodes, {direct} direct seminorms, {} violations{}",
            violations.len(),
            violations.iter().take(5).map(|v| format!(" {v}")).collect::<String>()
        ),
    )
}

fn sequence_decay() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_k = 0;
    let mut failures = Vec::new();
    for _ in 0..50 {
        let c_bar = rng.gen_range(1.0..10.0);
        let c_tilde = rng.gen_range(1.0..10.0);
        let delta = rng.gen_range(0.1..0.9);
        let a = iterate_recursion(c_bar, c_tilde, delta, sequence_threshold(c_bar, c_tilde, delta), 100);
        match a.iter().position(|&v| v < 1e-12) {
            Some(k) => worst_k = worst_k.max(k),
            None => failures.push(format!("({c_bar:.2}, {c_tilde:.2}, {delta:.2}) ends at {:.2e}", a[a.len() - 1])),
        }
    }
    ensure(failures.is_empty(), format!("50 triples, slowest reaches 1e-12 at k={worst_k}{}", failures.join("; ")))
}

fn linear_oracle() -> Verdict {
    let s = 0.5;
    let grid = lib(Grid::interval(-1.0, 1.0, 64))?;
    let yf = lib(lib(YoungFunction::power(2.0))?.rescaled(0.5, 1.0))?;
    let params = lib(OperatorParams::new(s))?;
    let op = lib(NonlocalOperator::new(&grid, &yf, params))?;
    let a = linear_weak_matrix(&grid, s);
    let hn = grid.node_weight();

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut agreement = 0.0_f64;
    for _ in 0..5 {
        let u: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let au: Vec<f64> = (a.clone() * nalgebra::DVector::from_column_slice(&u)).iter().copied().collect();
        let scale = au.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let weak = op.weak_operator(&u);
        let grad = op.gradient(&u);
        let (e, fused) = op.energy_and_gradient(&u);
        for i in 0..u.len() {
            agreement = agreement.max((weak[i] - au[i]).abs() / scale);
            agreement = agreement.max((grad[i] / hn - au[i]).abs() / scale);
            agreement = agreement.max((fused[i] / hn - au[i]).abs() / scale);
        }
        let quad = 0.5 * hn * quadratic_form(&a, &u);
        agreement = agreement.max(rel(op.energy(&u), quad)).max(rel(e, quad));
    }

    let (lambda_ref, v) = smallest_eigenpair(&a);
    let opts = EigenOptions { tol: 1e-10, ..Default::default() };
    let res = lib(solve_eigen(&grid, &yf, params, 1.0, &opts))?;
    let lambda_err = rel(res.lambda, lambda_ref);
    let unit = |w: &[f64]| {
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter().map(|x| x / n).collect::<Vec<_>>()
    };
    let (uu, vv) = (unit(res.u.values()), unit(&v));
    let peak = vv.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let vector_err = uu.iter().zip(&vv).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / peak;
    ensure(
        lambda_err < 1e-6 && vector_err < 1e-6 && agreement <= 1e-10,
        format!(
            "λ rel err {lambda_err:.2e}, eigenvector rel err {vector_err:.2e} (tol 1e-6, {} iterations); three-way {agreement:.2e} (tol 1e-10)",
            res.iterations
        ),
    )
}

fn gradient_fd() -> Verdict {
    let grid = lib(Grid::interval(-1.0, 1.0, 32))?;
    let xs = grid.coordinates();
    let params = lib(OperatorParams::new(0.4))?;
    let u: Vec<f64> = xs.iter().map(|p| 1.3 * (1.0 - p[0] * p[0]) + 0.4 * p[0] + 0.2 * (5.0 * p[0]).sin()).collect();
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for (label, g) in builtin_families() {
        let op = lib(NonlocalOperator::new(&grid, &g, params))?;
        let grad = op.gradient(&u);
        let mut family_worst = 0.0_f64;
        for i in 0..u.len() {
            let eps = 1e-5 * u[i].abs().max(1e-2);
            let mut w = u.clone();
            w[i] = u[i] + eps;
            let up = op.energy(&w);
            w[i] = u[i] - eps;
            let down = op.energy(&w);
            family_worst = family_worst.max(rel((up - down) / (2.0 * eps), grad[i]));
        }
        if family_worst >= 1e-5 {
            failures.push(format!("{label}={family_worst:.2e}"));
        }
        worst = worst.max(family_worst);
    }
    ensure(failures.is_empty(), format!("worst per-node rel err {worst:.2e} (tol 1e-5){}", failures.join(", ")))
}

struct Ladder {
    sups: Vec<f64>,
    holders: Vec<f64>,
    detail: String,
    trace_ok: bool,
    levels_ok: bool,
}

fn eigen_ladder() -> std::result::Result<Ladder, String> {
    let yf = lib(YoungFunction::piecewise_power(2.5, 3.0))?;
    let s = 0.4;
    let mu = 2.0;
    let params = lib(OperatorParams::new(s))?;
    let opts = EigenOptions { tol: 1e-8, ..Default::default() };
    let (mut sups, mut holders) = (Vec::new(), Vec::new());
    let mut last = None;
    for nodes in [64, 128, 256] {
        let grid = lib(Grid::interval(-1.0, 1.0, nodes))?;
        let res = lib(solve_eigen(&grid, &yf, params, mu, &opts))?;
        sups.push(sup_norm(&res.u));
        holders.push(lib(holder_seminorm(&res.u, s / 2.0, s))?);
        last = Some(res);
    }
    let res = last.expect("three grids");
    let op = lib(NonlocalOperator::new(res.u.grid(), &yf, params))?;
    let depth = 30;
    let trace = lib(degiorgi_trace(&res.u, &yf, depth, TraceScaling::SupNorm))?;
    let a_k = trace.a[depth];
    let trace_ok = trace.is_nonincreasing() && a_k < 1e-8 && trace.a[0] > 0.0;

    let scaled = lib(level_checks(&res.u, &op, depth, trace.scale, None))?;
    let unscaled = lib(level_checks(&res.u, &op, depth, 1.0, Some(res.lambda)))?;
    let failing = |reports: &[LevelReport]| reports.iter().filter(|r| !r.passes()).map(|r| r.k).collect::<Vec<_>>();
    let (bad_scaled, bad_unscaled) = (failing(&scaled), failing(&unscaled));
    let worst_ratio = |pick: fn(&LevelReport) -> Option<(f64, f64)>| {
        unscaled.iter().filter_map(pick).map(|(l, r)| if r > 0.0 { l / r } else { 0.0 }).fold(0.0, f64::max)
    };
    let margin = worst_ratio(|r| r.energy_bound);
    let literal = worst_ratio(|r| r.energy_bound_next_level);
    let levels_ok = bad_scaled.is_empty() && bad_unscaled.is_empty();
    let detail = format!(
        "λ={:.6}, a_0={:.3e}, a_30={a_k:.1e}, fit δ={:.3} holds={}; failing levels scaled {bad_scaled:?} unscaled {bad_unscaled:?}; worst energy-bound ratio {margin:.3} (same-level variant {literal:.3}, not required)",
        res.lambda, trace.a[0], trace.fit.delta, trace.fit.holds
    );
    Ok(Ladder { sups, holders, detail, trace_ok, levels_ok })
}

fn spread(v: &[f64]) -> f64 {
    v.windows(2).map(|w| rel(w[1], w[0])).fold(0.0, f64::max)
}

thread_local! {
    static LADDER: std::cell::RefCell<Option<std::result::Result<Ladder, String>>> = const { std::cell::RefCell::new(None) };
}

fn with_ladder<T>(f: impl FnOnce(&Ladder) -> T) -> std::result::Result<T, String> {
    LADDER.with(|cell| {
        let mut slot = cell.borrow_mut();
        if slot.is_none() {
            *slot = Some(eigen_ladder());
        }
        match slot.as_ref().expect("filled above") {
            Ok(l) => Ok(f(l)),
            Err(e) => Err(e.clone()),
        }
    })
}

fn boundedness() -> Verdict {
    with_ladder(|l| {
        let change = spread(&l.sups);
        ensure(
            change < 0.05 && l.trace_ok && l.levels_ok,
            format!("sup norms {:.5?} change {:.2}% (tol 5%); {}", l.sups, 100.0 * change, l.detail),
        )
    })?
}

fn holder_stability() -> Verdict {
    with_ladder(|l| {
        let change = spread(&l.holders);
        ensure(change < 0.10, format!("Hölder seminorms {:.5?} change {:.2}% (tol 10%)", l.holders, 100.0 * change))
    })?
}

fn semilinear() -> Verdict {
    let f = lib(YoungFunction::power(2.2))?;
    let g = lib(YoungFunction::piecewise_power(2.5, 3.0))?;
    let s = 0.3;
    let params = lib(OperatorParams::new(s))?;
    let sub = lib(check_subcritical(&f, &g, s, 1))?;
    let mut details = vec![format!("subcritical={}", sub.passes)];
    let mut ok = sub.passes;
    let opts = SemilinearOptions { tol: 1e-8, ..Default::default() };
    for nodes in [32, 64, 128] {
        let grid = lib(Grid::interval(-1.0, 1.0, nodes))?;
        match solve_semilinear(&grid, &g, &SemilinearRhs::nonlinear(f.clone()), params, &opts) {
            Ok(r) => {
                let positive = r.u.values().iter().all(|&v| v > 0.0);
                ok &= positive && r.functional < 0.0;
                details.push(format!("n={nodes}: {} it, J={:.4e}, res {:.1e}", r.iterations, r.functional, r.residual));
            }
            Err(e) => {
                ok = false;
                details.push(format!("n={nodes}: {e}"));
            }
        }
    }

    // manufactured solution with the source computed from the continuous operator
    let gm = lib(YoungFunction::power(2.5))?;
    let exact = |x: f64| if x.abs() < 1.0 { (1.0 - x * x).powi(2) } else { 0.0 };
    let mut errors = Vec::new();
    for nodes in [32, 64, 128, 256] {
        let grid = lib(Grid::interval(-1.0, 1.0, nodes))?;
        let xs = grid.coordinates();
        let mut source = Vec::with_capacity(xs.len());
        for p in &xs {
            source.push(2.0 * lib(continuous_operator_1d(&exact, -1.0, 1.0, &gm, s, p[0]))?);
        }
        let opts = SemilinearOptions { tol: 1e-10, ..Default::default() };
        let r = lib(solve_semilinear(&grid, &gm, &SemilinearRhs::fixed(source), params, &opts))?;
        errors.push(r.u.values().iter().zip(&xs).map(|(v, p)| (v - exact(p[0])).abs()).fold(0.0, f64::max));
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    ok &= decreasing;
    details.push(format!(
        "manufactured sup errors [{}]",
        errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
    ));
    ensure(ok, details.join("; "))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "young_calculus_suite", budget: Duration::from_secs(10), run: young_suite },
        Criterion { name: "k_growth_bound", budget: Duration::from_secs(30), run: k_bound },
        Criterion { name: "norm_and_chebyshev_bounds", budget: Duration::from_secs(60), run: norm_bounds },
        Criterion { name: "recursive_sequence_decay", budget: Duration::from_secs(1), run: sequence_decay },
        Criterion { name: "linear_case_oracle", budget: Duration::from_secs(30), run: linear_oracle },
        Criterion { name: "gradient_finite_differences", budget: Duration::from_secs(10), run: gradient_fd },
        Criterion { name: "eigenfunction_boundedness", budget: Duration::from_secs(300), run: boundedness },
        Criterion { name: "eigenfunction_holder_stability", budget: Duration::from_secs(300), run: holder_stability },
        Criterion { name: "semilinear_convergence", budget: Duration::from_secs(300), run: semilinear },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let verdict = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.budget;
        let (pass, detail) = match verdict {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {}: {} [{:.2} s of {} s]",
            if pass { "PASS" } else { "FAIL" },
            c.name,
            detail,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
