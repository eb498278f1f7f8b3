//! Monotone cubic Hermite interpolation on a uniform knot sequence.

/// Piecewise cubic Hermite interpolant of increasing data with
/// Fritsch–Carlson limited slopes, extrapolated linearly past the ends.
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    x0: f64,
    dx: f64,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant from knot values and slope estimates. The
    /// slopes are limited so the interpolant is monotone whenever the data are.
    pub fn new(x0: f64, dx: f64, ys: Vec<f64>, mut ds: Vec<f64>) -> Self {
        assert!(ys.len() >= 2 && ys.len() == ds.len() && dx > 0.0);
        for k in 0..ys.len() - 1 {
            let secant = (ys[k + 1] - ys[k]) / dx;
            if secant == 0.0 {
                ds[k] = 0.0;
                ds[k + 1] = 0.0;
                continue;
            }
            let a = (ds[k] / secant).max(0.0);
            let b = (ds[k + 1] / secant).max(0.0);
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                ds[k] = tau * a * secant;
                ds[k + 1] = tau * b * secant;
            } else {
                ds[k] = a * secant;
                ds[k + 1] = b * secant;
            }
        }
        Self { x0, dx, ys, ds }
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.dx * (self.ys.len() - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    fn hermite(&self, k: usize, t: f64) -> f64 {
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.ds[k] * self.dx, self.ds[k + 1] * self.dx);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
    }

    fn hermite_slope(&self, k: usize, t: f64) -> f64 {
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.ds[k] * self.dx, self.ds[k + 1] * self.dx);
        let t2 = t * t;
        ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / self.dx
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.ys.len() - 1;
        if x <= self.x0 {
            return self.ys[0] + self.ds[0] * (x - self.x0);
        }
        let xm = self.x_max();
        if x >= xm {
            return self.ys[last] + self.ds[last] * (x - xm);
        }
        let u = (x - self.x0) / self.dx;
        let k = (u.floor() as usize).min(last - 1);
        self.hermite(k, u - k as f64)
    }

    /// Derivative of the interpolant, extended linearly like [`eval`](Self::eval).
    pub fn slope(&self, x: f64) -> f64 {
        let last = self.ys.len() - 1;
        if x <= self.x0 {
            return self.ds[0];
        }
        if x >= self.x_max() {
            return self.ds[last];
        }
        let u = (x - self.x0) / self.dx;
        let k = (u.floor() as usize).min(last - 1);
        self.hermite_slope(k, u - k as f64)
    }

    /// Inverse of an increasing interpolant.
    pub fn inverse(&self, y: f64) -> f64 {
        let last = self.ys.len() - 1;
        if y <= self.ys[0] {
            return self.x0 + (y - self.ys[0]) / self.ds[0];
        }
        if y >= self.ys[last] {
            return self.x_max() + (y - self.ys[last]) / self.ds[last];
        }
        // ys[k] <= y < ys[k+1]
        let k = self.ys.partition_point(|&v| v <= y) - 1;
        let k = k.min(last - 1);
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut t = if self.ys[k + 1] > self.ys[k] { (y - self.ys[k]) / (self.ys[k + 1] - self.ys[k]) } else { 0.5 };
        for _ in 0..100 {
            let f = self.hermite(k, t) - y;
            if f == 0.0 {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            if hi - lo < 1e-16 {
                break;
            }
            let slope = self.hermite_slope(k, t) * self.dx;
            let mut next = if slope > 0.0 { t - f / slope } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() < 1e-17 {
                t = next;
                break;
            }
            t = next;
        }
        self.x0 + self.dx * (k as f64 + t)
    }
}
