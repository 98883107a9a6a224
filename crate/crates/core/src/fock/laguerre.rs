//! Generalized Laguerre polynomials by upward three-term recurrence.

use crate::dd::Dd;

/// `L_k^{(alpha)}(x)` for `k = 0..=k_max`.
pub fn laguerre_sequence(k_max: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    if k_max == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for k in 1..k_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `L_k^{(alpha)}(x)` for a single degree.
pub fn laguerre(k: usize, alpha: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * cur - (jf + alpha) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_k^{(1)}(x)` in double-double precision; `x` is itself passed as a
/// double-double so the caller can keep the rounding error of `eta^2`.
pub(crate) fn laguerre1_dd(k: usize, x: Dd) -> Dd {
    let mut prev = Dd::ONE;
    let mut cur = Dd::from(2.0) - x;
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let jf = j as f64;
        let a = Dd::from(2.0 * jf + 2.0) - x;
        let next = (a * cur - prev * (jf + 1.0)) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}
