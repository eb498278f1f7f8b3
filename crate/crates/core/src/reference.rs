//! Independent reference computations: a dense assembly of the linear
//! fractional Laplacian straight from node coordinates, its dense
//! eigen/linear solves, and the continuous 1D operator of a smooth function.
//!
//! Nothing here reuses the tables of [`crate::operator`], so the two can be
//! compared against each other.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::grid::Grid;
use crate::quadrature::adaptive;
use crate::young::YoungFunction;

/// `∫_{R^n \ Ω} |x - y|^{-n-2s} dy` for a node `x` of the grid.
fn exterior_kernel_mass(grid: &Grid, x: [f64; 2], s: f64) -> f64 {
    let lo = grid.lower();
    let hi = grid.upper();
    if grid.dim() == 1 {
        let (dl, dr) = (x[0] - lo[0], hi[0] - x[0]);
        return (dl.powf(-2.0 * s) + dr.powf(-2.0 * s)) / (2.0 * s);
    }
    // polar coordinates about x: ∫ dθ ∫_{ρ(θ)}^∞ r^{-1-2s} dr = ∫ ρ(θ)^{-2s} / (2s) dθ
    let exit = |theta: f64| {
        let (c, sn) = (theta.cos(), theta.sin());
        let tx = if c > 0.0 {
            (hi[0] - x[0]) / c
        } else if c < 0.0 {
            (lo[0] - x[0]) / c
        } else {
            f64::INFINITY
        };
        let ty = if sn > 0.0 {
            (hi[1] - x[1]) / sn
        } else if sn < 0.0 {
            (lo[1] - x[1]) / sn
        } else {
            f64::INFINITY
        };
        tx.min(ty)
    };
    let f = |theta: f64| exit(theta).powf(-2.0 * s) / (2.0 * s);
    let mut corners: Vec<f64> = [(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])]
        .iter()
        .map(|&(cx, cy)| (cy - x[1]).atan2(cx - x[0]).rem_euclid(std::f64::consts::TAU))
        .collect();
    corners.push(0.0);
    corners.push(std::f64::consts::TAU);
    corners.sort_by(f64::total_cmp);
    corners.windows(2).map(|w| if w[1] > w[0] { adaptive(&f, w[0], w[1], 0.0, 1e-14) } else { 0.0 }).sum()
}

/// Dense weak matrix `A` of the linear problem: `A u = ∇Φ_{s,G}(u) / h^n`
/// for `G(t) = t² / 2` with exterior values zero.
pub fn linear_weak_matrix(grid: &Grid, s: f64) -> DMatrix<f64> {
    let n = grid.len();
    let hn = grid.node_weight();
    let dim = grid.dim() as f64;
    let xs = grid.coordinates();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let r = (xs[i][0] - xs[j][0]).hypot(xs[i][1] - xs[j][1]);
                a[(i, j)] = -2.0 * hn * r.powf(-dim - 2.0 * s);
            }
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| -a[(i, j)]).sum();
        a[(i, i)] = off + 2.0 * exterior_kernel_mass(grid, xs[i], s);
    }
    a
}

/// Smallest eigenpair of a symmetric matrix, with the eigenvector oriented
/// to have positive sum and unit Euclidean norm.
pub fn smallest_eigenpair(a: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(a.clone());
    let (k, _) = eig.eigenvalues.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).expect("nonempty matrix");
    let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    (eig.eigenvalues[k], v)
}

/// Solves `A u = b` for symmetric positive definite `A`.
pub fn spd_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let chol = a.clone().cholesky().ok_or_else(|| invalid("matrix is not positive definite"))?;
    Ok(chol.solve(&DVector::from_column_slice(b)).iter().copied().collect())
}

/// `u^T A u`.
pub fn quadratic_form(a: &DMatrix<f64>, u: &[f64]) -> f64 {
    let v = DVector::from_column_slice(u);
    v.dot(&(a * &v))
}

/// The strong operator `p.v. ∫ g((u(x) - u(y)) / |x - y|^s) |x - y|^{-1-s} dy`
/// of a function on the line supported in `[lo, hi]`, evaluated at `x`.
pub fn continuous_operator_1d<F>(u: &F, lo: f64, hi: f64, yf: &YoungFunction, s: f64, x: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(s > 0.0 && s < 1.0) || !(hi > lo) {
        return Err(invalid("continuous operator needs 0 < s < 1 and a nonempty support"));
    }
    let ux = u(x);
    // pair y = x ± r so the principal value becomes an absolutely convergent integral in r
    let integrand = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let rs = r.powf(s);
        (yf.derivative((ux - u(x + r)) / rs) + yf.derivative((ux - u(x - r)) / rs)) * r.powf(-1.0 - s)
    };
    let reach = (x - lo).abs().max((hi - x).abs());
    // split at the support edges seen from x, and grade dyadically toward r = 0
    let mut cuts = vec![(x - lo).abs(), (hi - x).abs(), reach];
    let mut r = cuts[0].min(cuts[1]).min(reach);
    for _ in 0..40 {
        r *= 0.5;
        cuts.push(r);
    }
    cuts.push(0.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let rule = crate::quadrature::GaussLegendre::new(10);
    let crude: f64 = cuts.windows(2).map(|w| rule.integrate(integrand, w[0], w[1]).abs()).sum();
    let tol = 1e-15 * crude.max(f64::MIN_POSITIVE);
    let total: f64 = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| crate::quadrature::adaptive_uniform(&integrand, w[0], w[1], tol, 40))
        .sum();
    let tail = if ux == 0.0 { 0.0 } else { 2.0 * ux.signum() * yf.value(ux.abs() * reach.powf(-s)) / (s * ux.abs()) };
    let out = total + tail;
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::DivergentIntegral(format!("continuous operator at {x} is not finite")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exterior_mass_of_square_center() {
        // the complement of [-1,1]² seen from 0 with s = 1/2: ∫ ρ(θ)^{-1} dθ
        let g = Grid::rectangle([-1.0, 1.0], [-1.0, 1.0], 3, 3).unwrap();
        let m = exterior_kernel_mass(&g, [0.0, 0.0], 0.5);
        // ρ(θ) = 1 / cos θ on |θ| < π/4, so ∫ cos θ dθ over 8 half-sectors = 8 sin(π/4)
        assert!((m - 8.0 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn linear_matrix_is_symmetric_positive() {
        let g = Grid::interval(0.0, 1.0, 12).unwrap();
        let a = linear_weak_matrix(&g, 0.5);
        assert!((&a - a.transpose()).amax() < 1e-12);
        let (lam, v) = smallest_eigenpair(&a);
        assert!(lam > 0.0);
        assert!(v.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn continuous_operator_of_linear_bump() {
        // for g(t) = t and s = 1/2 the operator of u = (1 - x²)_+ is finite and positive at 0
        let yf = YoungFunction::power(2.0).unwrap().rescaled(0.5, 1.0).unwrap();
        let u = |x: f64| (1.0 - x * x).max(0.0);
        let v = continuous_operator_1d(&u, -1.0, 1.0, &yf, 0.5, 0.0).unwrap();
        assert!(v > 0.0 && v.is_finite());
    }
}
