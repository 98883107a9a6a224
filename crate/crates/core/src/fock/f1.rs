//! The first-sideband nonlinear coupling function f1(n, eta).
//!
//! On Fock state |n> the operator series for f1 terminates at order n:
//!
//! ```text
//! f1(n, eta) = exp(-eta^2/2) * sum_{l=0}^{n} (-eta^2)^l n! / (l! (l+1)! (n-l)!)
//!            = exp(-eta^2/2) * L_n^{(1)}(eta^2) / (n + 1)
//! ```
//!
//! Both forms are implemented independently and evaluated in double-double
//! arithmetic so they agree to the last bit of an `f64` even next to zeros.

use serde::{Deserialize, Serialize};

use super::laguerre::laguerre1_dd;
use crate::dd::Dd;
use crate::error::{Error, Result};

fn check_eta(eta: f64) -> Result<()> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::invalid(format!(
            "eta must be finite and non-negative, got {eta}"
        )));
    }
    Ok(())
}

/// f1(n, eta) from the finite operator series.
pub fn f1(n: usize, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    Ok(f1_series_unchecked(n, eta))
}

pub(crate) fn f1_series_unchecked(n: usize, eta: f64) -> f64 {
    let x = Dd::square_of(eta);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for l in 0..n {
        // t_{l+1} = t_l * (-x) (n - l) / ((l + 1)(l + 2))
        let num = (n - l) as f64;
        let den = ((l + 1) * (l + 2)) as f64;
        term = -(term * x * num) / den;
        sum = sum + term;
    }
    sum.to_f64() * (-0.5 * eta * eta).exp()
}

/// f1(n, eta) from the associated Laguerre closed form.
pub fn f1_closed_form(n: usize, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let x = Dd::square_of(eta);
    let l = laguerre1_dd(n, x) / (n as f64 + 1.0);
    Ok(l.to_f64() * (-0.5 * eta * eta).exp())
}

/// Cached table `f1(0..=n_max, eta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearCoupling {
    eta: f64,
    values: Vec<f64>,
}

impl NonlinearCoupling {
    pub fn new(eta: f64, n_max: usize) -> Result<Self> {
        check_eta(eta)?;
        let values = (0..=n_max).map(|n| f1_series_unchecked(n, eta)).collect();
        Ok(Self { eta, values })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// f1(n); panics if `n > n_max`.
    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Default η bracket for [`barrier_eta`].
pub const BARRIER_BRACKET: (f64, f64) = (1e-3, 1.0);
const SCAN_STEP: f64 = 1e-3;

/// Smallest Lamb-Dicke parameter in the default bracket for which
/// `f1(n, eta) = 0`, i.e. the η that blocks the |n> -> |n+1> transfer.
pub fn barrier_eta(n: usize) -> Result<f64> {
    barrier_eta_in(n, BARRIER_BRACKET)
}

/// [`barrier_eta`] on an explicit bracket. The bracket is scanned on a 1e-3
/// grid for the first sign change, which is then bisected down to adjacent
/// floating-point values.
pub fn barrier_eta_in(n: usize, bracket: (f64, f64)) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid(format!("bad eta bracket [{lo}, {hi}]")));
    }
    let f = |eta: f64| f1_series_unchecked(n, eta);
    let steps = ((hi - lo) / SCAN_STEP).ceil() as usize;
    let mut a = lo;
    let mut fa = f(a);
    if fa == 0.0 {
        return Ok(a);
    }
    for k in 1..=steps {
        let b = (lo + k as f64 * SCAN_STEP).min(hi);
        let fb = f(b);
        if fb == 0.0 {
            return Ok(b);
        }
        if fa.signum() != fb.signum() {
            return Ok(bisect(f, a, fa, b));
        }
        a = b;
        fa = fb;
    }
    Err(Error::NoSignChange { n, lo, hi })
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut fa: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// Which first-order sideband drives the transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sideband {
    /// |↓,n> <-> |↑,n-1>
    Red,
    /// |↓,n> <-> |↑,n+1>
    Blue,
}

/// Effective sideband Rabi rate out of |↓, n> including the f1 dressing.
pub fn rabi_rate(n: usize, sideband: Sideband, omega: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    match sideband {
        Sideband::Red => {
            if n == 0 {
                return Err(Error::invalid("red sideband needs n >= 1"));
            }
            Ok(eta * omega * (n as f64).sqrt() * f1_series_unchecked(n - 1, eta).abs())
        }
        Sideband::Blue => {
            Ok(eta * omega * ((n + 1) as f64).sqrt() * f1_series_unchecked(n, eta).abs())
        }
    }
}
