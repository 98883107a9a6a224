//! Trapped-ion spin-boson models beyond the Lamb-Dicke regime.
//!
//! * [`fock`]: operators on qubit ⊗ truncated Fock space and the nonlinear
//!   coupling function f1.
//! * [`models`]: (nonlinear) Jaynes-Cummings, anti-Jaynes-Cummings, Rabi
//!   and two-tone Hamiltonians.
//! * [`dynamics`]: state preparation, unitary and Lindblad propagation,
//!   observables.
//! * [`protocols`]: Fock-state preparation, motional filter analysis,
//!   collapse/revival, f1 landscapes.
//! * [`io`]: scenario files, CSV/JSON output, run and sweep drivers.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod dd;
pub mod error;
pub mod exec;
pub mod fock;

pub use error::{Error, ErrorClass, Result};
pub use exec::Execution;
pub mod dynamics;
pub mod io;
pub mod models;
pub mod protocols;
