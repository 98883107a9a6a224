use serde::{Deserialize, Serialize};

use super::periods_to_time;
use crate::dynamics::{
    evolve_lindblad, linspace, thermal_required_n_max, thermal_tail, LindbladOptions, LindbladSpec,
    QuantumState, Trajectory,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{barrier_eta, qubit_ops, HilbertSpace, Qubit};
use crate::models::build_nonlinear_anti_jc;

/// Thermal population above the target beyond which the protocol
/// assumption is flagged.
const TAIL_WARNING: f64 = 1e-3;

/// Dissipative preparation of `|target_n>` with the nonlinear anti-JC drive
/// and qubit decay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockPrepPlan {
    pub target_n: usize,
    /// Lamb-Dicke parameter; `None` picks `barrier_eta(target_n)`.
    pub eta: Option<f64>,
    pub g: f64,
    /// `Γ_m / g`.
    pub gamma_ratio: f64,
    pub initial_nbar: f64,
    /// In units of `2π/g`.
    pub duration: f64,
    pub n_points: usize,
    pub n_max: Option<usize>,
    pub dt_max: Option<f64>,
}

impl FockPrepPlan {
    pub fn new(target_n: usize) -> Self {
        Self {
            target_n,
            eta: None,
            g: 1.0,
            gamma_ratio: 2.0,
            initial_nbar: 1.0,
            duration: 100.0,
            n_points: 201,
            n_max: None,
            dt_max: None,
        }
    }

    pub fn resolved_eta(&self) -> Result<f64> {
        match self.eta {
            Some(e) => Ok(e),
            None => barrier_eta(self.target_n),
        }
    }

    /// `max(2·target, 40)`, raised until the thermal tail is negligible.
    pub fn resolved_n_max(&self) -> usize {
        self.n_max.unwrap_or_else(|| {
            (2 * self.target_n)
                .max(40)
                .max(thermal_required_n_max(self.initial_nbar))
        })
    }

    /// Hard checks plus advisory warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.target_n == 0 {
            return Err(Error::invalid("target_n must be at least 1"));
        }
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(Error::invalid("g must be positive"));
        }
        if !(self.gamma_ratio >= 0.0) || !(self.initial_nbar >= 0.0) || !(self.duration > 0.0) {
            return Err(Error::invalid(
                "gamma_ratio, initial_nbar must be >= 0 and duration > 0",
            ));
        }
        if self.n_points < 2 {
            return Err(Error::invalid("n_points must be at least 2"));
        }
        let n_max = self.resolved_n_max();
        if n_max < 2 * self.target_n {
            return Err(Error::TruncationTooSmall {
                n_max,
                required: 2 * self.target_n,
            });
        }
        let mut warnings = Vec::new();
        let tail = thermal_tail(self.initial_nbar, self.target_n);
        if tail > TAIL_WARNING {
            let w = format!(
                "initial thermal population above n={} is {tail:.3e}; it will not be funneled",
                self.target_n
            );
            log::warn!("{w}");
            warnings.push(w);
        }
        Ok(warnings)
    }
}

#[derive(Clone, Debug)]
pub struct FockPrepResult {
    pub plan: FockPrepPlan,
    pub eta: f64,
    pub n_max: usize,
    pub trajectory: Trajectory,
    pub final_phonons: Vec<f64>,
    pub target_population: f64,
    /// Final population below and above the target.
    pub residual_below: f64,
    pub residual_above: f64,
    pub warnings: Vec<String>,
}

pub fn run_fock_prep(plan: &FockPrepPlan, exec: Execution) -> Result<FockPrepResult> {
    let warnings = plan.validate()?;
    let eta = plan.resolved_eta()?;
    let n_max = plan.resolved_n_max();
    let space = HilbertSpace::new(n_max)?;
    let h = build_nonlinear_anti_jc(space, plan.g, eta)?;
    let mut spec = LindbladSpec::new();
    if plan.gamma_ratio > 0.0 {
        spec.push(plan.gamma_ratio * plan.g, qubit_ops(space).sigma_minus)?;
    }
    let rho0 = if plan.initial_nbar == 0.0 {
        QuantumState::fock(space, 0, Qubit::Down)?.to_density()
    } else {
        QuantumState::thermal(space, plan.initial_nbar, Qubit::Down)?
    };
    let times = linspace(periods_to_time(plan.duration, plan.g), plan.n_points);
    let opts = LindbladOptions {
        dt_max: plan.dt_max,
        exec,
        ..Default::default()
    };
    let trajectory = evolve_lindblad(&h, &spec, &rho0, &times, &opts)?;
    let final_phonons = trajectory.last().phonons.clone();
    let t = plan.target_n;
    Ok(FockPrepResult {
        plan: plan.clone(),
        eta,
        n_max,
        target_population: final_phonons[t],
        residual_below: final_phonons[..t].iter().sum(),
        residual_above: final_phonons[t + 1..].iter().sum(),
        final_phonons,
        trajectory,
        warnings,
    })
}
