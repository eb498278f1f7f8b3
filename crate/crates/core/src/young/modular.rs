//! Modulars, Luxemburg norms and the Chebyshev-type bound.

use super::YoungFunction;
use crate::error::{invalid, Result};
use crate::roots::solve_log_newton;

/// Sample values of a function with matching positive quadrature weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSamples {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSamples {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(invalid(format!("{} values but {} weights", values.len(), weights.len())));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(invalid("weights must be positive and finite"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sample values must be finite"));
        }
        Ok(Self { values, weights })
    }

    /// Every sample carries the same weight.
    pub fn uniform(values: Vec<f64>, weight: f64) -> Result<Self> {
        let n = values.len();
        Self::new(values, vec![weight; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// The same weights with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(values, self.weights.clone())
    }
}

/// `Φ_G(u) = Σ w G(|u|)`.
pub fn modular(yf: &YoungFunction, u: &WeightedSamples) -> f64 {
    u.values.iter().zip(&u.weights).map(|(v, w)| w * yf.value(*v)).sum()
}

/// `(Φ_G(u / λ), d ln Φ / d ln λ)`.
fn scaled_modular(yf: &YoungFunction, u: &WeightedSamples, lambda: f64) -> (f64, f64) {
    let mut phi = 0.0;
    let mut dphi = 0.0;
    for (v, w) in u.values.iter().zip(&u.weights) {
        let x = v.abs() / lambda;
        let (gv, gd) = yf.value_and_derivative(x);
        phi += w * gv;
        dphi += w * gd * x;
    }
    (phi, -dphi / phi)
}

/// Solves `Φ(u / λ) = target` for `λ`, starting from the power-growth bracket.
pub(crate) fn solve_scaling<F>(phi_at_one: f64, target: f64, p_minus: f64, p_plus: f64, eval: F) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let r = phi_at_one / target;
    let a = r.powf(1.0 / p_plus);
    let b = r.powf(1.0 / p_minus);
    solve_log_newton(eval, target, a.min(b) * 0.999, a.max(b) * 1.001, 1e-14)
}

/// `inf { λ > 0 : Φ_G(u / λ) <= 1 }`.
pub fn luxemburg_norm(yf: &YoungFunction, u: &WeightedSamples) -> Result<f64> {
    let phi = modular(yf, u);
    if phi == 0.0 {
        return Ok(0.0);
    }
    solve_scaling(phi, 1.0, yf.p_minus(), yf.p_plus(), |lambda| scaled_modular(yf, u, lambda))
}

/// Returns `(|{|u| >= t}|, Φ_G(u) / G(t))`; the first never exceeds the second.
pub fn chebyshev_bound(yf: &YoungFunction, u: &WeightedSamples, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(invalid(format!("threshold must be positive, got {t}")));
    }
    let above = u.values.iter().zip(&u.weights).filter(|(v, _)| v.abs() >= t).map(|(_, w)| w).sum();
    Ok((above, modular(yf, u) / yf.value(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(values: Vec<f64>) -> WeightedSamples {
        let n = values.len();
        WeightedSamples::uniform(values, 1.0 / n as f64).unwrap()
    }

    #[test]
    fn modular_examples() {
        let g = YoungFunction::power(2.0).unwrap();
        assert_eq!(modular(&g, &unit(vec![0.0; 4])), 0.0);
        assert_eq!(modular(&g, &unit(vec![1.0; 4])), 1.0);
        assert_eq!(modular(&g, &unit(vec![2.0; 4])), 4.0);
        assert_eq!(modular(&g, &unit(vec![-2.0; 4])), 4.0);
    }

    #[test]
    fn samples_validate() {
        assert!(WeightedSamples::new(vec![1.0], vec![]).is_err());
        assert!(WeightedSamples::new(vec![1.0], vec![0.0]).is_err());
        assert!(WeightedSamples::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn luxemburg_norm_of_constant_and_l2() {
        let pl = YoungFunction::power_log(3.0).unwrap();
        let c = 2.7;
        let n = luxemburg_norm(&pl, &unit(vec![c; 10])).unwrap();
        assert!((n - c).abs() < 1e-13 * c);

        let g = YoungFunction::power(2.0).unwrap();
        let u = WeightedSamples::new(vec![0.3, -1.2, 2.0, 0.0], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let direct: f64 = u.values().iter().zip(u.weights()).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
        let n = luxemburg_norm(&g, &u).unwrap();
        assert!((n - direct).abs() < 1e-13 * direct);
        assert!((modular(&g, &u.with_values(u.values().iter().map(|v| v / n).collect()).unwrap()) - 1.0).abs() < 1e-12);
        assert_eq!(luxemburg_norm(&g, &unit(vec![0.0; 3])).unwrap(), 0.0);
    }

    #[test]
    fn chebyshev_examples() {
        let g = YoungFunction::power(2.0).unwrap();
        let u = unit(vec![1.0; 5]);
        let (m, b) = chebyshev_bound(&g, &u, 1.0).unwrap();
        assert!((m - 1.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15);
        let (m, b) = chebyshev_bound(&g, &u, 2.0).unwrap();
        assert_eq!(m, 0.0);
        assert_eq!(b, 0.25);
        assert!(chebyshev_bound(&g, &u, 0.0).is_err());
    }
}
