//! State preparation, propagation, and observables.
//!
//! Time-independent Hamiltonians go through a one-time eigendecomposition;
//! time-dependent ones and the master equation use fixed-step RK4.

mod lindblad;
mod observables;
mod rwa;
mod state;
mod td;
mod trajectory;
mod unitary;

pub use lindblad::{
    evolve_lindblad, lindblad_rhs, stable_step, LindbladOptions, LindbladSpec, POSITIVITY_LIMIT,
    STEP_BOUND, TRACE_DRIFT_LIMIT,
};
pub use observables::{expectation, mean_phonons, overlap_fidelity, phonon_distribution};
pub use rwa::{rwa_crosscheck, RwaOptions, RwaReport};
pub use state::{
    coherent_required_n_max, poisson_tail, thermal_required_n_max, thermal_tail, InitialState,
    QuantumState, StateData, TAIL_TOL,
};
pub use td::{
    evolve_unitary_td, FnHamiltonian, TdOptions, TimeDependentHamiltonian, NORM_DRIFT_LIMIT,
};
pub use trajectory::{linspace, Diagnostics, Record, Snapshot, Trajectory};
pub use unitary::{evolve_unitary, Propagator, RecordOptions};
