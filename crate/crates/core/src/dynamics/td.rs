//! Fixed-step RK4 for time-dependent Schrödinger evolution.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::state::QuantumState;
use super::trajectory::{Diagnostics, Record, Reference, Snapshot, Trajectory};
use crate::error::{Error, Result};
use crate::fock::{HilbertSpace, Operator};

/// Norm drift over a run beyond which the step is rejected as too large.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// A Hamiltonian that can act on a state at time `t`.
pub trait TimeDependentHamiltonian: Sync {
    fn space(&self) -> HilbertSpace;
    /// `out = H(t) psi`.
    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>);
}

impl TimeDependentHamiltonian for Operator {
    fn space(&self) -> HilbertSpace {
        Operator::space(self)
    }

    fn apply(&self, _t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) {
        out.gemv(C64::new(1.0, 0.0), self.matrix(), psi, C64::new(0.0, 0.0));
    }
}

/// Adapts a closure returning a dense operator.
pub struct FnHamiltonian<F> {
    space: HilbertSpace,
    build: F,
}

impl<F: Fn(f64) -> Operator + Sync> FnHamiltonian<F> {
    pub fn new(space: HilbertSpace, build: F) -> Self {
        Self { space, build }
    }
}

impl<F: Fn(f64) -> Operator + Sync> TimeDependentHamiltonian for FnHamiltonian<F> {
    fn space(&self) -> HilbertSpace {
        self.space
    }

    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) {
        let h = (self.build)(t);
        out.gemv(C64::new(1.0, 0.0), h.matrix(), psi, C64::new(0.0, 0.0));
    }
}

#[derive(Clone, Debug)]
pub struct TdOptions {
    pub dt_max: f64,
    pub snapshots: Vec<usize>,
    /// Rerun at half the step and report the largest state difference.
    pub estimate_error: bool,
}

impl TdOptions {
    pub fn new(dt_max: f64) -> Self {
        Self {
            dt_max,
            snapshots: Vec::new(),
            estimate_error: false,
        }
    }
}

pub(crate) struct TdRun {
    pub states: Vec<DVector<C64>>,
    pub max_drift: f64,
    pub steps: usize,
}

fn substeps(span: f64, dt_max: f64) -> usize {
    ((span / dt_max).ceil() as usize).max(1)
}

/// States at every grid time; `times` must be non-decreasing and start the
/// evolution at `times[0]`.
pub(crate) fn integrate<H: TimeDependentHamiltonian + ?Sized>(
    h: &H,
    psi0: &DVector<C64>,
    times: &[f64],
    dt_max: f64,
) -> Result<TdRun> {
    if !(dt_max > 0.0) {
        return Err(Error::invalid("dt_max must be positive"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("time grid must be non-decreasing"));
    }
    let n = psi0.len();
    let minus_i = C64::new(0.0, -1.0);
    let mut psi = psi0.clone();
    let mut k1 = DVector::zeros(n);
    let mut k2 = DVector::zeros(n);
    let mut k3 = DVector::zeros(n);
    let mut k4 = DVector::zeros(n);
    let mut tmp = DVector::zeros(n);
    let mut states = Vec::with_capacity(times.len());
    let mut max_drift = 0.0f64;
    let mut steps = 0usize;
    let norm0 = psi0.norm_squared();
    if let Some(&t0) = times.first() {
        states.push(psi.clone());
        let mut t = t0;
        for &target in &times[1..] {
            let m = if target > t {
                substeps(target - t, dt_max)
            } else {
                0
            };
            let dt = if m > 0 { (target - t) / m as f64 } else { 0.0 };
            for _ in 0..m {
                let h_dt = C64::new(dt, 0.0);
                h.apply(t, &psi, &mut k1);
                k1 *= minus_i;
                tmp.copy_from(&psi);
                tmp.axpy(h_dt * 0.5, &k1, C64::new(1.0, 0.0));
                h.apply(t + 0.5 * dt, &tmp, &mut k2);
                k2 *= minus_i;
                tmp.copy_from(&psi);
                tmp.axpy(h_dt * 0.5, &k2, C64::new(1.0, 0.0));
                h.apply(t + 0.5 * dt, &tmp, &mut k3);
                k3 *= minus_i;
                tmp.copy_from(&psi);
                tmp.axpy(h_dt, &k3, C64::new(1.0, 0.0));
                h.apply(t + dt, &tmp, &mut k4);
                k4 *= minus_i;
                let w = h_dt / 6.0;
                psi.axpy(w, &k1, C64::new(1.0, 0.0));
                psi.axpy(w * 2.0, &k2, C64::new(1.0, 0.0));
                psi.axpy(w * 2.0, &k3, C64::new(1.0, 0.0));
                psi.axpy(w, &k4, C64::new(1.0, 0.0));
                t += dt;
                steps += 1;
            }
            t = target;
            let drift = (psi.norm_squared() - norm0).abs();
            max_drift = max_drift.max(drift);
            if drift > NORM_DRIFT_LIMIT || !drift.is_finite() {
                return Err(Error::StepTooLarge {
                    drift,
                    limit: NORM_DRIFT_LIMIT,
                });
            }
            states.push(psi.clone());
        }
    }
    Ok(TdRun {
        states,
        max_drift,
        steps,
    })
}

/// Schrödinger evolution under `H(t)` by fixed-step RK4. The state is not
/// renormalized; norm drift is monitored and rejected above
/// [`NORM_DRIFT_LIMIT`].
pub fn evolve_unitary_td<H: TimeDependentHamiltonian + ?Sized>(
    h: &H,
    psi0: &QuantumState,
    times: &[f64],
    opts: &TdOptions,
) -> Result<Trajectory> {
    h.space().ensure_same(&psi0.space())?;
    let v0 = psi0
        .vector()
        .ok_or_else(|| Error::invalid("unitary evolution needs a pure initial state"))?;
    let run = integrate(h, v0, times, opts.dt_max)?;
    let error_estimate = if opts.estimate_error {
        let fine = integrate(h, v0, times, 0.5 * opts.dt_max)?;
        Some(
            run.states
                .iter()
                .zip(&fine.states)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    let space = psi0.space();
    let reference = Reference::Pure(v0);
    let mut records = Vec::with_capacity(times.len());
    let mut snapshots = Vec::new();
    for (i, psi) in run.states.into_iter().enumerate() {
        let state = QuantumState::pure_unchecked(space, psi);
        records.push(Record::measure(&state, &reference));
        if opts.snapshots.contains(&i) {
            snapshots.push(Snapshot {
                index: i,
                time: times[i],
                state,
            });
        }
    }
    Ok(Trajectory {
        space,
        times: times.to_vec(),
        records,
        snapshots,
        diagnostics: Diagnostics {
            method: "rk4".into(),
            max_norm_drift: run.max_drift,
            steps: run.steps,
            dt: Some(opts.dt_max),
            error_estimate,
            min_eigenvalue: None,
        },
    })
}
