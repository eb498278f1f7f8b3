//! Smallness threshold for superlinear recursions `a_{k+1} <= C̄ C̃^{k+1} a_k^{1+δ}`.

/// Factor applied beneath the sharp threshold.
pub const SEQUENCE_SAFETY_FACTOR: f64 = 0.5;

/// Largest `a_0` (times [`SEQUENCE_SAFETY_FACTOR`]) for which the recursion
/// is forced to zero.
///
/// With `r = C̃^{-1/δ}`, the induction hypothesis `a_k <= a_0 r^k` propagates
/// as soon as `C̄ C̃^{1 + 1/δ} a_0^δ <= 1`, which gives
/// `a_0 <= C̄^{-1/δ} C̃^{-(1+δ)/δ²}`. A factor `C̃ < 1` is replaced by 1,
/// since the recursion then also holds with `C̃ = 1`. The safety factor makes
/// every step shrink by at least `2^{-δ}` even when `C̃ = 1`.
pub fn sequence_threshold(c_bar: f64, c_tilde: f64, delta: f64) -> f64 {
    let ct = c_tilde.max(1.0);
    let ln = -c_bar.ln() / delta - (1.0 + delta) * ct.ln() / (delta * delta);
    SEQUENCE_SAFETY_FACTOR * ln.exp()
}

/// Iterates the recursion with equality: `a_{k+1} = C̄ C̃^{k+1} a_k^{1+δ}`.
/// Returns `a_0..=a_steps`.
pub fn iterate_recursion(c_bar: f64, c_tilde: f64, delta: f64, a0: f64, steps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut a = a0;
    out.push(a);
    for k in 0..steps {
        let ln_ct_power = (k + 1) as f64 * c_tilde.ln();
        a = if a > 0.0 { (c_bar.ln() + ln_ct_power + (1.0 + delta) * a.ln()).exp() } else { 0.0 };
        out.push(a);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_for_doubling_constants() {
        assert!((sequence_threshold(2.0, 2.0, 1.0) - 1.0 / 16.0).abs() < 1e-15);
        let a = iterate_recursion(2.0, 2.0, 1.0, 1.0 / 16.0, 50);
        assert!(a[50] < 1e-12);
    }

    #[test]
    fn zero_start_stays_zero() {
        assert!(iterate_recursion(3.0, 5.0, 0.3, 0.0, 10).iter().all(|&a| a == 0.0));
    }

    #[test]
    fn unit_constants_decay_monotonically() {
        let a = iterate_recursion(1.0, 1.0, 0.5, 0.25, 40);
        assert!(a.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0));
        assert!(a[40] < 1e-12);
    }

    #[test]
    fn product_threshold_can_blow_up() {
        // (C̄ C̃)^{-1/δ} without the C̃^{-1/δ²} correction diverges here
        let (cb, ct, d) = (1.0_f64, 10.0_f64, 0.1_f64);
        let naive = (1.0 / (cb * ct)).powf(1.0 / d);
        let a = iterate_recursion(cb, ct, d, naive, 100);
        assert!(a.iter().any(|v| *v > naive));
        let safe = iterate_recursion(cb, ct, d, sequence_threshold(cb, ct, d), 100);
        assert!(safe[100] < 1e-12);
    }
}
