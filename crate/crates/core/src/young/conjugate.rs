//! The complementary Young function `G~(t) = sup_a { t a - G(a) }`.

use std::sync::Arc;

use super::{Kind, YoungFunction};
use crate::error::{invalid, Result};
use crate::roots::generalized_inverse;

fn holder_conjugate(r: f64) -> f64 {
    if r.is_infinite() {
        1.0
    } else {
        r / (r - 1.0)
    }
}

pub(super) fn build(g: &YoungFunction) -> Result<YoungFunction> {
    if !(g.p_minus > 1.0) {
        return Err(invalid(format!("complementary function needs p- > 1, got {}", g.p_minus)));
    }
    let pm = holder_conjugate(g.p_plus);
    let pp = holder_conjugate(g.p_minus);
    Ok(YoungFunction::from_kind(Kind::Conjugate(Arc::new(g.clone())), pm, pp))
}

/// The maximizer `a = inf { a : g(a) > t }`, which is also `G~'(t)`.
fn maximizer(g: &YoungFunction, t: f64) -> f64 {
    if let Kind::Power { p } = g.kind {
        return (t / p).powf(1.0 / (p - 1.0));
    }
    generalized_inverse(|a| g.derivative_pos(a), t).unwrap_or(f64::NAN)
}

pub(super) fn value(g: &YoungFunction, t: f64) -> f64 {
    let a = maximizer(g, t);
    (t * a - g.value_pos(a)).max(0.0)
}

pub(super) fn derivative(g: &YoungFunction, t: f64) -> f64 {
    maximizer(g, t)
}
