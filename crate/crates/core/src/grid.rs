//! Uniform cell-centered lattices over intervals and rectangles, and nodal
//! functions on them that vanish outside the domain.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::young::WeightedSamples;

/// Uniform lattice of cell midpoints with a common spacing in every direction.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    lower: [f64; 2],
    upper: [f64; 2],
    counts: [usize; 2],
    h: f64,
}

impl Grid {
    pub fn interval(a: f64, b: f64, nodes: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(invalid(format!("interval bounds must satisfy a < b, got [{a}, {b}]")));
        }
        if nodes < 2 {
            return Err(invalid("a grid needs at least 2 nodes"));
        }
        Ok(Self { dim: 1, lower: [a, 0.0], upper: [b, 0.0], counts: [nodes, 1], h: (b - a) / nodes as f64 })
    }

    /// A rectangle `[x0, x1] × [y0, y1]` split into `nx × ny` square cells.
    pub fn rectangle(x: [f64; 2], y: [f64; 2], nx: usize, ny: usize) -> Result<Self> {
        for (lo, hi) in [(x[0], x[1]), (y[0], y[1])] {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(invalid(format!("rectangle sides must satisfy lo < hi, got [{lo}, {hi}]")));
            }
        }
        if nx == 0 || ny == 0 || nx * ny < 2 {
            return Err(invalid("a grid needs at least 2 nodes"));
        }
        let hx = (x[1] - x[0]) / nx as f64;
        let hy = (y[1] - y[0]) / ny as f64;
        if (hx - hy).abs() > 1e-12 * hx {
            return Err(invalid(format!("rectangle cells must be square, got spacings {hx} and {hy}")));
        }
        Ok(Self { dim: 2, lower: [x[0], y[0]], upper: [x[1], y[1]], counts: [nx, ny], h: hx })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn counts(&self) -> [usize; 2] {
        self.counts
    }

    pub fn lower(&self) -> [f64; 2] {
        self.lower
    }

    pub fn upper(&self) -> [f64; 2] {
        self.upper
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight `h^n` of every node.
    pub fn node_weight(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        self.node_weight() * self.len() as f64
    }

    pub fn diameter(&self) -> f64 {
        let dx = self.upper[0] - self.lower[0];
        let dy = if self.dim == 2 { self.upper[1] - self.lower[1] } else { 0.0 };
        dx.hypot(dy)
    }

    /// Lattice indices `(i, j)` of node `k` (lexicographic, first axis fastest).
    pub fn multi_index(&self, k: usize) -> [usize; 2] {
        [k % self.counts[0], k / self.counts[0]]
    }

    pub fn linear_index(&self, i: usize, j: usize) -> usize {
        i + j * self.counts[0]
    }

    pub fn coordinate(&self, k: usize) -> [f64; 2] {
        let [i, j] = self.multi_index(k);
        let x = self.lower[0] + (i as f64 + 0.5) * self.h;
        let y = if self.dim == 2 { self.lower[1] + (j as f64 + 0.5) * self.h } else { 0.0 };
        [x, y]
    }

    pub fn coordinates(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|k| self.coordinate(k)).collect()
    }

    /// Halves the spacing.
    pub fn refined(&self) -> Self {
        let mut g = self.clone();
        g.counts[0] *= 2;
        if self.dim == 2 {
            g.counts[1] *= 2;
        }
        g.h *= 0.5;
        g
    }

    pub fn translated(&self, shift: [f64; 2]) -> Self {
        let mut g = self.clone();
        for (a, d) in shift.iter().enumerate().take(self.dim) {
            g.lower[a] += d;
            g.upper[a] += d;
        }
        g
    }

    /// Distance from a point to the complement of the domain.
    pub fn distance_to_boundary(&self, p: [f64; 2]) -> f64 {
        (0..self.dim).map(|a| (p[a] - self.lower[a]).min(self.upper[a] - p[a])).fold(f64::INFINITY, f64::min).max(0.0)
    }
}

/// JSON description of a grid: one `[lo, hi]` pair and one node count per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub bounds: Vec<[f64; 2]>,
    pub nodes: Vec<usize>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        match (self.bounds.as_slice(), self.nodes.as_slice()) {
            ([b], [n]) => Grid::interval(b[0], b[1], *n),
            ([bx, by], [nx, ny]) => Grid::rectangle(*bx, *by, *nx, *ny),
            _ => Err(invalid(format!(
                "grid needs 1 or 2 axes with matching node counts, got {} bounds and {} counts",
                self.bounds.len(),
                self.nodes.len()
            ))),
        }
    }

    /// The same grid description with `factor` times as many nodes per axis.
    pub fn scaled_nodes(&self, factor: usize) -> Self {
        Self { bounds: self.bounds.clone(), nodes: self.nodes.iter().map(|n| n * factor).collect() }
    }
}

/// Nodal values on a grid, identically zero outside the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("nodal values must be finite"));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> f64>(grid: Grid, f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(grid.coordinate(k))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub(crate) fn with_values_unchecked(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self { grid: self.grid.clone(), values }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.with_values_unchecked(self.values.iter().map(|v| c * v).collect())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        self.with_values_unchecked(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Value of the cell containing `p`; zero outside the domain.
    pub fn value_at(&self, p: [f64; 2]) -> f64 {
        let g = &self.grid;
        let mut idx = [0usize; 2];
        for a in 0..g.dim {
            if !(p[a] >= g.lower[a] && p[a] <= g.upper[a]) {
                return 0.0;
            }
            idx[a] = (((p[a] - g.lower[a]) / g.h) as usize).min(g.counts[a] - 1);
        }
        self.values[g.linear_index(idx[0], idx[1])]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Values paired with the node weights `h^n`.
    pub fn samples(&self) -> WeightedSamples {
        WeightedSamples::uniform(self.values.clone(), self.grid.node_weight()).expect("grid functions are finite")
    }

    /// Writes `x,value` (1D) or `x,y,value` (2D) rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        if self.grid.dim == 1 {
            writeln!(out, "x,value")?;
        } else {
            writeln!(out, "x,y,value")?;
        }
        for (k, v) in self.values.iter().enumerate() {
            let [x, y] = self.grid.coordinate(k);
            if self.grid.dim == 1 {
                writeln!(out, "{x:e},{v:e}")?;
            } else {
                writeln!(out, "{x:e},{y:e},{v:e}")?;
            }
        }
        Ok(())
    }

    /// Reads rows written by [`write_csv`](Self::write_csv) for the given grid.
    pub fn read_csv<R: BufRead>(grid: Grid, input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.ok_or_else(|| Error::Parse("empty CSV".into()))?;
        let expected = if grid.dim == 1 { "x,value" } else { "x,y,value" };
        if header.trim() != expected {
            return Err(Error::Parse(format!("expected header '{expected}', got '{header}'")));
        }
        let tol = 1e-9 * grid.h;
        let mut values = Vec::with_capacity(grid.len());
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {}: {e}", k + 2))))
                .collect::<Result<_>>()?;
            if fields.len() != grid.dim + 1 || k >= grid.len() {
                return Err(Error::Parse(format!("row {} does not match the grid", k + 2)));
            }
            let c = grid.coordinate(k);
            if (0..grid.dim).any(|a| (fields[a] - c[a]).abs() > tol) {
                return Err(Error::Parse(format!("row {} has coordinates off the grid", k + 2)));
            }
            values.push(fields[grid.dim]);
        }
        Self::new(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_geometry() {
        let g = Grid::interval(-1.0, 1.0, 4).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.node_weight(), 0.5);
        let xs: Vec<f64> = g.coordinates().iter().map(|c| c[0]).collect();
        assert_eq!(xs, vec![-0.75, -0.25, 0.25, 0.75]);
        assert_eq!(g.measure(), 2.0);
        assert!(Grid::interval(0.0, 1.0, 1).is_err());
        assert!(Grid::interval(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn rectangle_geometry() {
        let g = Grid::rectangle([0.0, 2.0], [0.0, 1.0], 4, 2).unwrap();
        assert_eq!(g.len(), 8);
        assert_eq!(g.node_weight(), 0.25);
        assert_eq!(g.coordinate(5), [0.75, 0.75]);
        assert_eq!(g.multi_index(5), [1, 1]);
        assert!(Grid::rectangle([0.0, 2.0], [0.0, 1.0], 4, 4).is_err());
        let r = g.refined();
        assert_eq!(r.counts(), [8, 4]);
        assert_eq!(r.spacing(), 0.25);
    }

    #[test]
    fn spec_builds_grids() {
        let s: GridSpec = serde_json::from_str(r#"{"bounds":[[0,1]],"nodes":[8]}"#).unwrap();
        assert_eq!(s.build().unwrap().len(), 8);
        let bad = GridSpec { bounds: vec![[0.0, 1.0]], nodes: vec![4, 4] };
        assert!(bad.build().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = Grid::rectangle([0.0, 1.0], [0.0, 1.0], 3, 3).unwrap();
        let u = DiscreteFunction::from_fn(g.clone(), |p| (p[0] * 7.1).sin() + p[1] / 3.0).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let back = DiscreteFunction::read_csv(g.clone(), buf.as_slice()).unwrap();
        assert_eq!(back, u);
        assert!(DiscreteFunction::read_csv(g.refined(), buf.as_slice()).is_err());
    }
}
