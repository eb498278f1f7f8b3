//! Sup norm and Hölder seminorm of grid functions extended by zero.

use crate::error::{invalid, Result};
use crate::grid::DiscreteFunction;
use crate::parallel::{map_indices, Execution};

pub fn sup_norm(u: &DiscreteFunction) -> f64 {
    u.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Virtual exterior nodes one spacing across every boundary face of a cell.
fn ghost_nodes(u: &DiscreteFunction) -> Vec<[f64; 2]> {
    let g = u.grid();
    let h = g.spacing();
    let mut out = Vec::new();
    for k in 0..g.len() {
        let p = g.coordinate(k);
        let [i, j] = g.multi_index(k);
        let [nx, ny] = g.counts();
        if i == 0 {
            out.push([p[0] - h, p[1]]);
        }
        if i + 1 == nx {
            out.push([p[0] + h, p[1]]);
        }
        if g.dim() == 2 {
            if j == 0 {
                out.push([p[0], p[1] - h]);
            }
            if j + 1 == ny {
                out.push([p[0], p[1] + h]);
            }
        }
    }
    out
}

/// `sup |u(x) - u(y)| / |x - y|^α` over node pairs and node/ghost pairs,
/// where ghosts sit one spacing outside the domain and carry the value 0.
pub fn holder_seminorm(u: &DiscreteFunction, alpha: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= s && s < 1.0) {
        return Err(invalid(format!("Hölder exponent must satisfy 0 < alpha <= s < 1, got alpha = {alpha}, s = {s}")));
    }
    let g = u.grid();
    let xs = g.coordinates();
    let vals = u.values();
    let ghosts = ghost_nodes(u);
    let rows = map_indices(Execution::default(), vals.len(), |i| {
        let mut m = 0.0_f64;
        let p = xs[i];
        for j in i + 1..vals.len() {
            let r = (p[0] - xs[j][0]).hypot(p[1] - xs[j][1]);
            m = m.max((vals[i] - vals[j]).abs() / r.powf(alpha));
        }
        for q in &ghosts {
            let r = (p[0] - q[0]).hypot(p[1] - q[1]);
            m = m.max(vals[i].abs() / r.powf(alpha));
        }
        m
    });
    Ok(rows.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn constant_function() {
        let g = Grid::interval(0.0, 1.0, 20).unwrap();
        let c = DiscreteFunction::from_fn(g.clone(), |_| -3.0).unwrap();
        assert_eq!(sup_norm(&c), 3.0);
        let h: f64 = g.spacing();
        let expect = 3.0 / h.powf(0.25);
        assert!((holder_seminorm(&c, 0.25, 0.5).unwrap() - expect).abs() < 1e-12 * expect);
        assert!(holder_seminorm(&c, 0.6, 0.5).is_err());
    }

    #[test]
    fn distance_power_has_unit_seminorm() {
        let alpha = 0.4;
        let mut prev: Option<f64> = None;
        for n in [64, 128, 256] {
            let g = Grid::interval(0.0, 1.0, n).unwrap();
            let u = DiscreteFunction::from_fn(g.clone(), |p| g.distance_to_boundary(p).powf(alpha)).unwrap();
            let v = holder_seminorm(&u, alpha, 0.5).unwrap();
            assert!(v <= 1.0 + 1e-12 && v > 0.9, "n={n}: {v}");
            if let Some(p) = prev {
                assert!((v - p).abs() < 0.05);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn rectangle_ghosts() {
        let g = Grid::rectangle([0.0, 1.0], [0.0, 1.0], 4, 4).unwrap();
        let u = DiscreteFunction::from_fn(g, |_| 1.0).unwrap();
        assert_eq!(ghost_nodes(&u).len(), 16);
    }
}
