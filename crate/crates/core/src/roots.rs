//! Bracketed scalar root finding on positive half-lines.
//!
//! Everything here works in logarithmic coordinates: Young functions and the
//! modular maps built from them have elasticities bounded by their index
//! bounds, so Newton steps in `ln x` are well conditioned.

use crate::error::{Error, Result};

const MAX_ITER: usize = 300;

/// Solves `phi(x) = target` for `x > 0` when `phi` is strictly monotone.
///
/// `eval` returns `(phi(x), d ln phi / d ln x)`. The initial bracket
/// `[lo, hi]` is a guess; it is widened geometrically if it does not
/// straddle the target.
pub(crate) fn solve_log_newton<F>(eval: F, target: f64, lo: f64, hi: f64, rtol: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    debug_assert!(target > 0.0);
    let ln_target = target.ln();
    let residual = |z: f64| -> (f64, f64) {
        let (v, e) = eval(z.exp());
        (v.ln() - ln_target, e)
    };

    let (mut zl, mut zh) = (lo.min(hi).ln(), lo.max(hi).ln());
    if zl == zh {
        zl -= 1.0;
        zh += 1.0;
    }
    let (mut fl, _) = residual(zl);
    let (mut fh, _) = residual(zh);
    let mut widen = 0;
    while fl.signum() == fh.signum() && fl != 0.0 && fh != 0.0 {
        widen += 1;
        if widen > 200 {
            return Err(Error::Bracket(format!("could not bracket target {target:e} (ln-bracket [{zl}, {zh}])")));
        }
        let width = (zh - zl).max(1.0);
        // move the endpoint that is on the wrong side
        let increasing = fh > fl;
        if (increasing && fl > 0.0) || (!increasing && fl < 0.0) {
            zl -= width;
            fl = residual(zl).0;
        } else {
            zh += width;
            fh = residual(zh).0;
        }
        if !fl.is_finite() && !fh.is_finite() && fl.signum() == fh.signum() {
            return Err(Error::Bracket(format!("non-finite values while bracketing {target:e}")));
        }
    }
    if fl == 0.0 {
        return Ok(zl.exp());
    }
    if fh == 0.0 {
        return Ok(zh.exp());
    }
    let increasing = fh > fl;

    let mut z = 0.5 * (zl + zh);
    for _ in 0..MAX_ITER {
        let (f, e) = residual(z);
        if f == 0.0 || f.abs() <= rtol {
            return Ok(z.exp());
        }
        if (f > 0.0) == increasing {
            zh = z;
        } else {
            zl = z;
        }
        if zh - zl <= 4.0 * f64::EPSILON * zl.abs().max(zh.abs()).max(1.0) {
            return Ok(z.exp());
        }
        let newton = if e.is_finite() && e != 0.0 && f.is_finite() { z - f / e } else { f64::NAN };
        z = if newton.is_finite() && newton > zl && newton < zh { newton } else { 0.5 * (zl + zh) };
    }
    Err(Error::RootFinding(format!("log-Newton did not converge for target {target:e}")))
}

/// Right-continuous generalized inverse `inf { a > 0 : g(a) > t }` of a
/// nondecreasing function with `g(0) = 0` and `g(a) -> inf`.
pub(crate) fn generalized_inverse<F>(g: F, t: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if t <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 1.0_f64;
    let mut hi = 1.0_f64;
    if g(1.0) > t {
        let mut steps = 0;
        while g(lo) > t {
            lo *= 0.5;
            steps += 1;
            if steps > 1100 || lo == 0.0 {
                return Ok(0.0);
            }
        }
        hi = lo * 2.0;
    } else {
        let mut steps = 0;
        while g(hi) <= t {
            hi *= 2.0;
            steps += 1;
            if steps > 1100 || !hi.is_finite() {
                return Err(Error::RootFinding(format!("derivative never exceeds {t:e}")));
            }
        }
        lo = hi * 0.5;
    }
    // invariant: g(lo) <= t < g(hi)
    for _ in 0..MAX_ITER {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
        if g(mid) > t {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
