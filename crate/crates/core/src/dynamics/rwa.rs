//! Checks the vibrational RWA: evolves the same initial state under the full
//! two-tone drive and under the nonlinear Rabi model it reduces to, and
//! compares them in a common frame.
//!
//! The two-tone Hamiltonian lives in the interaction picture of the bare ion.
//! After the RWA it equals the nonlinear Rabi model in the interaction picture
//! of `H_free = (ω₀ᴿ/2) σ_z + ωᴿ a†a`, so the reference state is
//! `e^{i H_free t} e^{-i H_nQRM t} ψ₀`.

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::state::QuantumState;
use super::td::integrate;
use super::trajectory::linspace;
use super::unitary::Propagator;
use crate::error::{Error, Result};
use crate::fock::HilbertSpace;
use crate::models::{ModelKind, ModelSpec, TwoToneHamiltonian};

#[derive(Clone, Debug)]
pub struct RwaOptions {
    pub n_points: usize,
    /// Defaults to `2π / (200 ν)`.
    pub dt_max: Option<f64>,
}

impl Default for RwaOptions {
    fn default() -> Self {
        Self {
            n_points: 301,
            dt_max: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RwaReport {
    pub times: Vec<f64>,
    /// `1 - |<ψ_full|ψ_nQRM>|²` at each time.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub valid: bool,
    pub dt: f64,
    pub steps: usize,
}

pub fn rwa_crosscheck(
    spec: &ModelSpec,
    psi0: &QuantumState,
    t_end: f64,
    tolerance: f64,
    opts: &RwaOptions,
) -> Result<RwaReport> {
    if spec.kind != ModelKind::TwoTone {
        return Err(Error::invalid("RWA cross-check needs a TwoTone spec"));
    }
    if spec.phi_r != 0.0 || spec.phi_b != 0.0 {
        return Err(Error::invalid("RWA cross-check assumes zero laser phases"));
    }
    let space = psi0.space();
    let v0 = psi0
        .vector()
        .ok_or_else(|| Error::invalid("RWA cross-check needs a pure initial state"))?;
    let full = TwoToneHamiltonian::new(spec, space)?;
    let effective = spec.hamiltonian(space)?;
    let prop = Propagator::new(&effective)?;

    let times = linspace(t_end, opts.n_points.max(2));
    let dt = opts
        .dt_max
        .unwrap_or(std::f64::consts::TAU / (200.0 * spec.nu));
    let run = integrate(&full, v0, &times, dt)?;

    let coeffs = prop.to_eigenbasis(v0);
    let deviations: Vec<f64> = times
        .iter()
        .zip(&run.states)
        .map(|(&t, psi_full)| {
            let psi = prop.evolve_coefficients(&coeffs, t);
            let rotated = to_free_frame(space, spec, &psi, t);
            1.0 - psi_full.dotc(&rotated).norm_sqr()
        })
        .collect();
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(RwaReport {
        times,
        deviations,
        max_deviation,
        tolerance,
        valid: max_deviation < tolerance,
        dt,
        steps: run.steps,
    })
}

/// `e^{i H_free t} psi` with `H_free = (ω₀ᴿ/2) σ_z + ωᴿ a†a`.
fn to_free_frame(
    space: HilbertSpace,
    spec: &ModelSpec,
    psi: &DVector<C64>,
    t: f64,
) -> DVector<C64> {
    let nb = space.dim_boson();
    DVector::from_iterator(
        psi.len(),
        psi.iter().enumerate().map(|(i, z)| {
            let sz = if i < nb { -1.0 } else { 1.0 };
            let e = 0.5 * spec.omega0_r * sz + spec.omega_r * (i % nb) as f64;
            z * C64::from_polar(1.0, e * t)
        }),
    )
}
