//! Grid discretization of the fractional g-Laplacian and the Gagliardo modular.
//!
//! With `D u(x, y) = (u(x) - u(y)) / |x - y|^s` and `dμ = dx dy / |x - y|^n`:
//!
//! * the modular `Φ_{s,G}(u) = ∬ G(|D u|) dμ` is an ordered double sum over
//!   distinct node pairs (weight `h^{2n}`) plus the interior-exterior part,
//!   where `u = 0`;
//! * the operator `(-Δ_g)^s u(x) = p.v. ∫ g(D u) |x - y|^{-n-s} dy` is the
//!   row sum over nodes `y != x` (weight `h^n`) plus the exterior part;
//! * the gradient of the discrete modular is exactly `2 h^n` times the
//!   discrete operator.
//!
//! The exterior parts are integrated exactly along rays from each node. For
//! a ray leaving the domain at distance `ρ`,
//! `∫_ρ^∞ g(u r^{-s}) r^{-1-s} dr = sign(u) G(|u| ρ^{-s}) / (s |u|)` and
//! `∫_ρ^∞ G(|u| r^{-s}) r^{-1} dr = Γ(|u| ρ^{-s}) / s` with
//! `Γ(z) = ∫_0^z G(w) / w dw`. In 1D the two rays carry unit weight; in 2D
//! the angle is integrated side by side with `ξ = d sinh v` along each
//! side at perpendicular distance `d`.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::grid::{DiscreteFunction, Grid};
use crate::parallel::{map_indices, tree_sum, Execution};
use crate::quadrature::cached_rule;
use crate::young::YoungFunction;

/// Largest angular panel, in the `v` variable of the side parametrization.
const ANGULAR_PANEL: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorParams {
    pub s: f64,
    pub execution: Execution,
}

impl OperatorParams {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(invalid(format!("fractional order s must lie in (0, 1), got {s}")));
        }
        Ok(Self { s, execution: Execution::default() })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Precomputed discretization of `(-Δ_g)^s` and `Φ_{s,G}` on one grid.
#[derive(Clone, Debug)]
pub struct NonlocalOperator {
    grid: Grid,
    yf: YoungFunction,
    s: f64,
    execution: Execution,
    /// lattice indices per node, left empty on an interval
    ix: Vec<usize>,
    iy: Vec<usize>,
    /// per lattice offset: `r^{-s}`, `h^{2n} r^{-n}`, `h^n r^{-n-s}`
    inv_rs: Vec<f64>,
    w_energy: Vec<f64>,
    w_operator: Vec<f64>,
    /// per node exterior rays `(ρ^{-s}, angular weight)` in CSR layout
    ext_start: Vec<usize>,
    ext_scale: Vec<f64>,
    ext_weight: Vec<f64>,
}

impl NonlocalOperator {
    pub fn new(grid: &Grid, yf: &YoungFunction, params: OperatorParams) -> Result<Self> {
        let s = OperatorParams::new(params.s)?.s;
        let n = grid.dim() as f64;
        let h = grid.spacing();
        let hn = grid.node_weight();
        let [nx, ny] = grid.counts();
        let mut inv_rs = vec![0.0; nx * ny];
        let mut w_energy = vec![0.0; nx * ny];
        let mut w_operator = vec![0.0; nx * ny];
        for dj in 0..ny {
            for di in 0..nx {
                if di == 0 && dj == 0 {
                    continue;
                }
                let r = h * ((di * di + dj * dj) as f64).sqrt();
                let k = di + dj * nx;
                inv_rs[k] = r.powf(-s);
                w_energy[k] = hn * hn * r.powf(-n);
                w_operator[k] = hn * r.powf(-n - s);
            }
        }
        // on an interval the offset is just |i - j|, signalled by empty index tables
        let (ix, iy) = if grid.dim() == 1 {
            (Vec::new(), Vec::new())
        } else {
            (0..grid.len()).map(|k| grid.multi_index(k)).map(|[i, j]| (i, j)).unzip()
        };

        let mut ext_start = Vec::with_capacity(grid.len() + 1);
        let mut ext_scale = Vec::new();
        let mut ext_weight = Vec::new();
        ext_start.push(0);
        for k in 0..grid.len() {
            for (rho, w) in exterior_rays(grid, grid.coordinate(k)) {
                ext_scale.push(rho.powf(-s));
                ext_weight.push(w);
            }
            ext_start.push(ext_scale.len());
        }
        Ok(Self {
            grid: grid.clone(),
            yf: yf.clone(),
            s,
            execution: params.execution,
            ix,
            iy,
            inv_rs,
            w_energy,
            w_operator,
            ext_start,
            ext_scale,
            ext_weight,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn young(&self) -> &YoungFunction {
        &self.yf
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    /// The same discretization with another Young function.
    pub fn with_young(&self, yf: &YoungFunction) -> Self {
        let mut out = self.clone();
        out.yf = yf.clone();
        out
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        if self.iy.is_empty() {
            i.abs_diff(j)
        } else {
            self.ix[i].abs_diff(self.ix[j]) + self.iy[i].abs_diff(self.iy[j]) * self.grid.counts()[0]
        }
    }

    /// Exterior rays of node `i` as `(ρ^{-s}, weight)`.
    pub fn exterior_rays(&self, i: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
        let r = self.ext_start[i]..self.ext_start[i + 1];
        self.ext_scale[r.clone()].iter().copied().zip(self.ext_weight[r].iter().copied())
    }

    /// Exterior part of the operator at a node with value `u`.
    fn exterior_operator(&self, i: usize, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let a = u.abs();
        let sum: f64 = self.exterior_rays(i).map(|(c, w)| w * self.yf.value(a * c)).sum();
        u.signum() * sum / (self.s * a)
    }

    /// Exterior part of the modular for a node with value `u`.
    fn exterior_energy(&self, i: usize, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let a = u.abs();
        let sum: f64 = self.exterior_rays(i).map(|(c, w)| w * self.yf.log_integral(a * c)).sum();
        2.0 * self.grid.node_weight() * sum / self.s
    }

    fn check_len(&self, u: &[f64]) {
        assert_eq!(u.len(), self.grid.len(), "nodal vector does not match the grid");
    }

    /// The discrete `(-Δ_g)^s u` at every node.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.check_len(u);
        map_indices(self.execution, u.len(), |i| {
            let ui = u[i];
            let mut acc = 0.0;
            for (j, &uj) in u.iter().enumerate() {
                if j == i {
                    continue;
                }
                let k = self.offset(i, j);
                acc += self.yf.derivative((ui - uj) * self.inv_rs[k]) * self.w_operator[k];
            }
            acc + self.exterior_operator(i, ui)
        })
    }

    /// `2 (-Δ_g)^s u`, the operator in the weak normalization `∇Φ_{s,G} / h^n`.
    pub fn weak_operator(&self, u: &[f64]) -> Vec<f64> {
        self.apply(u).into_iter().map(|v| 2.0 * v).collect()
    }

    /// The discrete modular `Φ_{s,G}(u)`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.check_len(u);
        let rows = map_indices(self.execution, u.len(), |i| {
            let ui = u[i];
            let mut acc = 0.0;
            if self.iy.is_empty() {
                let tables = self.inv_rs[1..].iter().zip(&self.w_energy[1..]);
                for (&uj, (&c, &w)) in u[i + 1..].iter().zip(tables) {
                    acc += self.yf.value((ui - uj) * c) * w;
                }
            } else {
                for (j, &uj) in u.iter().enumerate().skip(i + 1) {
                    let k = self.offset(i, j);
                    acc += self.yf.value((ui - uj) * self.inv_rs[k]) * self.w_energy[k];
                }
            }
            (acc, self.exterior_energy(i, ui))
        });
        let (pair, ext): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        2.0 * tree_sum(&pair) + tree_sum(&ext)
    }

    /// `Φ_{s,G}(u)` and its gradient `2 h^n (-Δ_g)^s u` from one pass over the pairs.
    pub fn energy_and_gradient(&self, u: &[f64]) -> (f64, Vec<f64>) {
        self.check_len(u);
        let two_hn = 2.0 * self.grid.node_weight();
        let rows = map_indices(self.execution, u.len(), |i| {
            let ui = u[i];
            let (mut e, mut op) = (0.0, 0.0);
            for (j, &uj) in u.iter().enumerate() {
                if j == i {
                    continue;
                }
                let k = self.offset(i, j);
                let d = (ui - uj) * self.inv_rs[k];
                let (gv, gd) = self.yf.value_and_derivative(d);
                e += gv * self.w_energy[k];
                op += gd.copysign(d) * self.w_operator[k];
            }
            (e + self.exterior_energy(i, ui), two_hn * (op + self.exterior_operator(i, ui)))
        });
        let (e, g): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        (tree_sum(&e), g)
    }

    /// `∇Φ_{s,G}(u) = 2 h^n (-Δ_g)^s u`.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let two_hn = 2.0 * self.grid.node_weight();
        self.apply(u).into_iter().map(|v| two_hn * v).collect()
    }

    /// `⟨(-Δ_g)^s u, v⟩ = ∬ g(D u) D v dμ`, summed pair by pair.
    pub fn pairing(&self, u: &[f64], v: &[f64]) -> f64 {
        self.check_len(u);
        self.check_len(v);
        let two_hn = 2.0 * self.grid.node_weight();
        let rows = map_indices(self.execution, u.len(), |i| {
            let mut acc = 0.0;
            for j in 0..u.len() {
                if j == i {
                    continue;
                }
                let k = self.offset(i, j);
                let c = self.inv_rs[k];
                acc += self.yf.derivative((u[i] - u[j]) * c) * (v[i] - v[j]) * c * self.w_energy[k];
            }
            acc + two_hn * v[i] * self.exterior_operator(i, u[i])
        });
        tree_sum(&rows)
    }

    /// `(Φ_{s,G}(w), ⟨(-Δ_g)^s w, w⟩)`.
    fn energy_and_slope(&self, w: &[f64]) -> (f64, f64) {
        let two_hn = 2.0 * self.grid.node_weight();
        let rows = map_indices(self.execution, w.len(), |i| {
            let wi = w[i];
            let (mut e, mut sl) = (0.0, 0.0);
            for (j, &wj) in w.iter().enumerate() {
                if j == i {
                    continue;
                }
                let k = self.offset(i, j);
                let d = ((wi - wj) * self.inv_rs[k]).abs();
                let (gv, gd) = self.yf.value_and_derivative(d);
                e += gv * self.w_energy[k];
                sl += gd * d * self.w_energy[k];
            }
            (e + self.exterior_energy(i, wi), sl + two_hn * wi * self.exterior_operator(i, wi))
        });
        let (e, sl): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        (tree_sum(&e), tree_sum(&sl))
    }

    /// `[u]_{s,G} = inf { λ > 0 : Φ_{s,G}(u / λ) <= 1 }`.
    pub fn seminorm(&self, u: &[f64]) -> Result<f64> {
        self.check_len(u);
        let m = self.energy(u);
        if m == 0.0 {
            return Ok(0.0);
        }
        let eval = |lambda: f64| {
            let w: Vec<f64> = u.iter().map(|v| v / lambda).collect();
            let (e, sl) = self.energy_and_slope(&w);
            (e, -sl / e)
        };
        crate::young::solve_scaling(m, 1.0, self.yf.p_minus(), self.yf.p_plus(), eval)
    }

    /// The matrix `A` with `A u = ∇Φ_{s,G}(u) / h^n` for `G(t) = t²/2`, i.e.
    /// the weak linear fractional Laplacian on this grid.
    pub fn linear_matrix(&self) -> DMatrix<f64> {
        let n = self.grid.len();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let k = self.offset(i, j);
                let w = 2.0 * self.inv_rs[k] * self.w_operator[k];
                a[(i, j)] = -w;
                diag += w;
            }
            let ext: f64 = self.exterior_rays(i).map(|(c, w)| w * c * c).sum();
            a[(i, i)] = diag + ext / self.s;
        }
        a
    }
}

/// Directions leaving the domain from `p`, as `(exit distance, angular weight)`.
fn exterior_rays(grid: &Grid, p: [f64; 2]) -> Vec<(f64, f64)> {
    let lo = grid.lower();
    let hi = grid.upper();
    if grid.dim() == 1 {
        return vec![(p[0] - lo[0], 1.0), (hi[0] - p[0], 1.0)];
    }
    // each side: perpendicular distance and the signed corner positions along it
    let sides = [
        (p[0] - lo[0], lo[1] - p[1], hi[1] - p[1]),
        (hi[0] - p[0], lo[1] - p[1], hi[1] - p[1]),
        (p[1] - lo[1], lo[0] - p[0], hi[0] - p[0]),
        (hi[1] - p[1], lo[0] - p[0], hi[0] - p[0]),
    ];
    let rule = cached_rule(8);
    let mut rays = Vec::new();
    for (d, a, b) in sides {
        let (va, vb) = ((a / d).asinh(), (b / d).asinh());
        let panels = ((vb - va) / ANGULAR_PANEL).ceil().max(1.0) as usize;
        let w = (vb - va) / panels as f64;
        for m in 0..panels {
            let v0 = va + m as f64 * w;
            for (v, wt) in rule.mapped(v0, v0 + w) {
                let c = v.cosh();
                rays.push((d * c, wt / c));
            }
        }
    }
    rays
}

/// `D_s u(x, y) = (u(x) - u(y)) / |x - y|^s`, with `u` read cellwise and zero outside.
pub fn s_quotient(u: &DiscreteFunction, x: [f64; 2], y: [f64; 2], s: f64) -> Result<f64> {
    let r = (x[0] - y[0]).hypot(x[1] - y[1]);
    if r == 0.0 {
        return Err(invalid("the difference quotient needs distinct points"));
    }
    Ok((u.value_at(x) - u.value_at(y)) / r.powf(s))
}

pub fn apply_operator(u: &DiscreteFunction, yf: &YoungFunction, params: OperatorParams) -> Result<Vec<f64>> {
    Ok(NonlocalOperator::new(u.grid(), yf, params)?.apply(u.values()))
}

pub fn energy(u: &DiscreteFunction, yf: &YoungFunction, params: OperatorParams) -> Result<f64> {
    Ok(NonlocalOperator::new(u.grid(), yf, params)?.energy(u.values()))
}

pub fn energy_gradient(u: &DiscreteFunction, yf: &YoungFunction, params: OperatorParams) -> Result<Vec<f64>> {
    Ok(NonlocalOperator::new(u.grid(), yf, params)?.gradient(u.values()))
}

pub fn gagliardo_seminorm(u: &DiscreteFunction, yf: &YoungFunction, params: OperatorParams) -> Result<f64> {
    NonlocalOperator::new(u.grid(), yf, params)?.seminorm(u.values())
}
