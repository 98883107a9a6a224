use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::laguerre::laguerre_sequence;

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

/// Boson block of `D(beta) = exp(beta a† - beta* a)` on levels `0..=n_max`.
///
/// Uses the closed form
/// `<m|D|n> = sqrt(n!/m!) beta^(m-n) e^{-|beta|^2/2} L_n^{(m-n)}(|beta|^2)` for
/// `m >= n` and its mirror with `-beta*` for `m < n`. These are elements of the
/// untruncated operator, so the block is unitary only away from the edge.
pub fn displacement_block(n_max: usize, beta: C64) -> DMatrix<C64> {
    let dim = n_max + 1;
    let r = beta.norm();
    if r == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let x = r * r;
    let ln_r = r.ln();
    let lnf = ln_factorials(n_max);
    let up = beta / r; // phase of beta
    let down = -beta.conj() / r; // phase of -beta*
    let mut d = DMatrix::<C64>::zeros(dim, dim);
    let mut up_pow = C64::new(1.0, 0.0);
    let mut down_pow = C64::new(1.0, 0.0);
    for k in 0..dim {
        let lag = laguerre_sequence(n_max - k, k as f64, x);
        for (low, &l) in lag.iter().enumerate() {
            let high = low + k;
            if l == 0.0 {
                continue;
            }
            let mag =
                (0.5 * (lnf[low] - lnf[high]) + k as f64 * ln_r - 0.5 * x + l.abs().ln()).exp();
            let mag = mag * l.signum();
            d[(high, low)] = up_pow * mag;
            if k > 0 {
                d[(low, high)] = down_pow * mag;
            }
        }
        up_pow *= up;
        down_pow *= down;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    /// exp(A) by scaling and squaring of a Taylor series.
    fn expm_taylor(a: &DMatrix<C64>) -> DMatrix<C64> {
        let norm: f64 = a.iter().map(|z| z.norm()).sum();
        let s = norm.log2().ceil().max(0.0) as i32 + 1;
        let scaled = a / C64::new(2f64.powi(s), 0.0);
        let n = a.nrows();
        let mut result = DMatrix::<C64>::identity(n, n);
        let mut term = DMatrix::<C64>::identity(n, n);
        for k in 1..40 {
            term = &term * &scaled / C64::new(k as f64, 0.0);
            result += &term;
        }
        for _ in 0..s {
            result = &result * &result;
        }
        result
    }

    #[test]
    fn zero_is_identity() {
        let d = displacement_block(10, C64::new(0.0, 0.0));
        assert_eq!(d, DMatrix::identity(11, 11));
    }

    #[test]
    fn vacuum_overlap() {
        let beta = C64::new(0.3, -0.7);
        let d = displacement_block(20, beta);
        let want = (-beta.norm_sqr() / 2.0).exp();
        assert!((d[(0, 0)] - C64::new(want, 0.0)).norm() < 1e-15);
        // <1|D|0> = beta e^{-|beta|^2/2}
        assert!((d[(1, 0)] - beta * want).norm() < 1e-15);
        // <0|D|1> = -beta* e^{-|beta|^2/2}
        assert!((d[(0, 1)] + beta.conj() * want).norm() < 1e-15);
    }

    #[test]
    fn matches_matrix_exponential() {
        // Truncated generator exponentiated on a larger space; only the inner
        // block is insensitive to the truncation edge.
        let n_max = 40;
        let beta = C64::new(0.0, 0.3);
        let big = n_max + 40;
        let mut gen = DMatrix::<C64>::zeros(big + 1, big + 1);
        for n in 1..=big {
            let s = (n as f64).sqrt();
            gen[(n, n - 1)] += beta * s; // beta a†
            gen[(n - 1, n)] -= beta.conj() * s; // -beta* a
        }
        let oracle = expm_taylor(&gen);
        let d = displacement_block(n_max, beta);
        let mut dev = 0.0f64;
        for i in 0..30 {
            for j in 0..30 {
                dev = dev.max((d[(i, j)] - oracle[(i, j)]).norm());
            }
        }
        assert!(dev < 1e-8, "deviation {dev}");
    }

    #[test]
    fn unitary_away_from_edge() {
        // D|n> spreads over ~sqrt(2n+1)|beta| levels, so the usable columns
        // need that much headroom below n_max on top of a fixed margin.
        let n_max = 60;
        for (beta, last) in [(C64::new(0.6, 0.8), 20), (C64::new(0.0, 0.3), 40)] {
            let d = displacement_block(n_max, beta);
            let dd = d.adjoint() * &d;
            for i in 0..=last {
                for j in 0..=last {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dd[(i, j)] - C64::new(want, 0.0)).norm() < 1e-8,
                        "({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn large_truncation_stays_finite() {
        let d = displacement_block(200, C64::new(0.0, 1.0));
        assert!(d.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
}
