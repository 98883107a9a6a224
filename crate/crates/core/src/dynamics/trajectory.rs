use serde::{Deserialize, Serialize};

use super::observables::{fidelity_with, phonons_from_populations, sigma_z_from_populations};
use super::state::QuantumState;
use crate::fock::HilbertSpace;

/// Observables recorded at one time point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub sigma_z: f64,
    pub fidelity: f64,
    pub n_mean: f64,
    pub phonons: Vec<f64>,
}

/// What the fidelity column is measured against.
#[derive(Clone, Debug)]
pub(crate) enum Reference<'a> {
    Pure(&'a nalgebra::DVector<num_complex::Complex64>),
    /// `Tr(ρ₀ ρ)`; equals `<ψ₀|ρ|ψ₀>` when `ρ₀ = |ψ₀><ψ₀|`.
    Mixed(&'a nalgebra::DMatrix<num_complex::Complex64>),
}

impl Record {
    pub(crate) fn measure(state: &QuantumState, reference: &Reference<'_>) -> Self {
        let nb = state.space().dim_boson();
        let pops = state.populations();
        let phonons = phonons_from_populations(&pops, nb);
        let fidelity = match reference {
            Reference::Pure(v) => fidelity_with(v, state),
            Reference::Mixed(r0) => (*r0 * state.density_matrix()).trace().re,
        };
        Record {
            sigma_z: sigma_z_from_populations(&pops, nb),
            fidelity,
            n_mean: phonons.iter().enumerate().map(|(n, p)| n as f64 * p).sum(),
            phonons,
        }
    }

    pub fn phonon_sum(&self) -> f64 {
        self.phonons.iter().sum()
    }

    /// Population on Fock levels strictly above `n`.
    pub fn population_above(&self, n: usize) -> f64 {
        self.phonons.iter().skip(n + 1).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub index: usize,
    pub time: f64,
    pub state: QuantumState,
}

/// Integrator bookkeeping.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub method: String,
    /// Largest `|‖ψ‖² - 1|` or `|Tr ρ - 1|` seen.
    pub max_norm_drift: f64,
    pub steps: usize,
    pub dt: Option<f64>,
    /// Step-halving estimate of the integration error, when requested.
    pub error_estimate: Option<f64>,
    /// Smallest density-matrix eigenvalue seen at record points.
    pub min_eigenvalue: Option<f64>,
}

/// Time grid plus per-time records.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub space: HilbertSpace,
    pub times: Vec<f64>,
    pub records: Vec<Record>,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn sigma_z(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.sigma_z).collect()
    }

    pub fn fidelity(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.fidelity).collect()
    }

    pub fn n_mean(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.n_mean).collect()
    }

    pub fn population_above(&self, n: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.population_above(n)).collect()
    }

    pub fn last(&self) -> &Record {
        self.records
            .last()
            .expect("trajectory has at least one record")
    }

    /// Largest change of any recorded observable between two runs on the
    /// same time grid, possibly with different truncations. Phonon levels
    /// present in only one run compare against zero.
    pub fn max_deviation(&self, other: &Trajectory) -> f64 {
        assert_eq!(self.times.len(), other.times.len(), "time grids differ");
        let mut dev = 0.0f64;
        for (a, b) in self.records.iter().zip(&other.records) {
            dev = dev
                .max((a.sigma_z - b.sigma_z).abs())
                .max((a.fidelity - b.fidelity).abs())
                .max((a.n_mean - b.n_mean).abs());
            let len = a.phonons.len().max(b.phonons.len());
            for n in 0..len {
                let pa = a.phonons.get(n).copied().unwrap_or(0.0);
                let pb = b.phonons.get(n).copied().unwrap_or(0.0);
                dev = dev.max((pa - pb).abs());
            }
        }
        dev
    }
}

/// `n` evenly spaced points on `[0, t_end]`.
pub fn linspace(t_end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect(),
    }
}
