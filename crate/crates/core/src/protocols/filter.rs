use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_unitary, linspace, QuantumState, RecordOptions, Trajectory};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{barrier_eta_in, f1};
use crate::models::ModelSpec;

/// Largest distance between the requested η and a refined f1 root for the
/// root to be taken as the intended barrier.
pub const SNAP_TOL: f64 = 5e-4;

/// Lowest Fock level `n < n_max` whose f1 root lies within [`SNAP_TOL`] of
/// `eta`, with the refined root.
pub fn find_barrier(eta: f64, n_max: usize) -> Option<(usize, f64)> {
    if !(eta > 0.0) {
        return None;
    }
    let lo = (eta - SNAP_TOL).max(f64::MIN_POSITIVE);
    let hi = eta + SNAP_TOL;
    (1..n_max).find_map(|n| {
        if f1(n, eta).ok()? == 0.0 {
            return Some((n, eta));
        }
        barrier_eta_in(n, (lo, hi)).ok().map(|root| (n, root))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhononSnapshot {
    pub time: f64,
    pub phonons: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub barrier_n: usize,
    pub eta_requested: f64,
    pub eta_used: f64,
    pub times: Vec<f64>,
    /// `Σ_{n > barrier} P_n(t)`.
    pub leakage: Vec<f64>,
    pub leakage_max: f64,
    pub initial_leakage: f64,
    pub fidelity: Vec<f64>,
    pub snapshots: Vec<PhononSnapshot>,
}

impl FilterReport {
    /// Largest rise of the leakage above its initial value.
    pub fn leakage_growth(&self) -> f64 {
        self.leakage_max - self.initial_leakage
    }
}

#[derive(Clone, Debug)]
pub struct FilterOptions {
    pub n_points: usize,
    /// Snap η onto the nearby f1 root before evolving.
    pub refine_eta: bool,
    pub exec: Execution,
}

impl Default for FilterOptions {
    fn default() -> Self {
        Self {
            n_points: 2001,
            refine_eta: true,
            exec: Execution::default(),
        }
    }
}

/// Evolves `initial` under a nonlinear model whose η sits on an f1 zero and
/// tracks the population above that barrier. `t_end` and `snapshot_times`
/// are in model time units.
pub fn run_filter_analysis(
    spec: &ModelSpec,
    initial: &QuantumState,
    t_end: f64,
    snapshot_times: &[f64],
    opts: &FilterOptions,
) -> Result<FilterReport> {
    if !spec.kind.is_nonlinear() {
        return Err(Error::invalid(format!("{:?} has no f1 barrier", spec.kind)));
    }
    let n_max = initial.space().n_max();
    let (barrier_n, root) = find_barrier(spec.eta, n_max).ok_or(Error::NoBarrier {
        eta: spec.eta,
        n_max,
    })?;
    let mut used = spec.clone();
    if opts.refine_eta {
        used.eta = root;
    }
    if f1(barrier_n, used.eta)?.abs() > 1e-10 {
        return Err(Error::NoBarrier {
            eta: used.eta,
            n_max,
        });
    }
    let mut report = leakage_run(&used, initial, t_end, snapshot_times, barrier_n, opts)?;
    report.eta_requested = spec.eta;
    Ok(report)
}

/// Same bookkeeping as [`run_filter_analysis`] for an arbitrary model and
/// level, without requiring a barrier.
pub fn run_leakage_control(
    spec: &ModelSpec,
    initial: &QuantumState,
    t_end: f64,
    snapshot_times: &[f64],
    level: usize,
    opts: &FilterOptions,
) -> Result<FilterReport> {
    leakage_run(spec, initial, t_end, snapshot_times, level, opts)
}

fn leakage_run(
    spec: &ModelSpec,
    initial: &QuantumState,
    t_end: f64,
    snapshot_times: &[f64],
    level: usize,
    opts: &FilterOptions,
) -> Result<FilterReport> {
    if opts.n_points < 2 || !(t_end > 0.0) {
        return Err(Error::invalid(
            "filter run needs t_end > 0 and at least 2 points",
        ));
    }
    spec.validate()?;
    let h = spec.hamiltonian(initial.space())?;
    let record = RecordOptions {
        snapshots: Vec::new(),
        exec: opts.exec,
    };
    let trajectory = evolve_unitary(&h, initial, &linspace(t_end, opts.n_points), &record)?;
    let snaps = if snapshot_times.is_empty() {
        Vec::new()
    } else {
        evolve_unitary(&h, initial, snapshot_times, &record)?
            .records
            .into_iter()
            .zip(snapshot_times)
            .map(|(r, &time)| PhononSnapshot {
                time,
                phonons: r.phonons,
            })
            .collect()
    };
    Ok(report_from(spec, level, trajectory, snaps))
}

fn report_from(
    spec: &ModelSpec,
    level: usize,
    tr: Trajectory,
    snapshots: Vec<PhononSnapshot>,
) -> FilterReport {
    let leakage = tr.population_above(level);
    let leakage_max = leakage.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    FilterReport {
        barrier_n: level,
        eta_requested: spec.eta,
        eta_used: spec.eta,
        initial_leakage: leakage[0],
        leakage_max,
        fidelity: tr.fidelity(),
        leakage,
        times: tr.times,
        snapshots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::barrier_eta;

    #[test]
    fn snaps_to_the_nearby_root() {
        let (n, root) = find_barrier(0.67898, 60).unwrap();
        assert_eq!(n, 7);
        assert!((root - barrier_eta(7).unwrap()).abs() < 1e-15);
        let (n, _) = find_barrier(0.57838, 60).unwrap();
        assert_eq!(n, 10);
        assert_eq!(find_barrier(0.4518, 60).unwrap().0, 17);
        assert_eq!(find_barrier(0.4518, 17), None);
        assert_eq!(find_barrier(0.0, 60), None);
    }

    #[test]
    fn linear_models_have_no_barrier() {
        let s = crate::fock::HilbertSpace::new(10).unwrap();
        let psi = QuantumState::fock(s, 0, crate::fock::Qubit::Down).unwrap();
        let spec = ModelSpec::qrm(1.0, 0.5, 0.0);
        assert!(run_filter_analysis(&spec, &psi, 1.0, &[], &FilterOptions::default()).is_err());
        let off = ModelSpec::nonlinear_qrm(1.0, 0.3, 0.5, 0.0);
        assert!(matches!(
            run_filter_analysis(&off, &psi, 1.0, &[], &FilterOptions::default()),
            Err(Error::NoBarrier { .. })
        ));
    }
}
