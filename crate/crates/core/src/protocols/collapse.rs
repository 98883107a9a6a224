use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::periods_to_time;
use crate::dynamics::{
    coherent_required_n_max, evolve_unitary, linspace, QuantumState, RecordOptions, Trajectory,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fock::{HilbertSpace, Qubit};
use crate::models::{build_jc, build_nonlinear_jc, default_truncation, ModelKind, ModelSpec};

/// Coherent field `|α>` with the qubit in `|↓>`, under JC or nonlinear JC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseRevivalPlan {
    pub model: ModelKind,
    pub alpha: f64,
    pub g: f64,
    pub eta: f64,
    /// In units of `2π/g`. `None` gives 1.5 revival times, tripled for the
    /// nonlinear model.
    pub duration: Option<f64>,
    pub n_points: usize,
    pub n_max: Option<usize>,
}

impl CollapseRevivalPlan {
    pub fn new(model: ModelKind, alpha: f64, g: f64, eta: f64) -> Self {
        Self {
            model,
            alpha,
            g,
            eta,
            duration: None,
            n_points: 4001,
            n_max: None,
        }
    }

    /// `t_r = 2π √n̄ / g`.
    pub fn revival_time(&self) -> f64 {
        TAU * self.alpha.abs() / self.g
    }

    pub fn duration_factor(&self) -> f64 {
        if self.model == ModelKind::NonlinearJC {
            3.0
        } else {
            1.0
        }
    }

    pub fn resolved_duration(&self) -> f64 {
        self.duration
            .unwrap_or(1.5 * self.alpha.abs() * self.duration_factor())
    }

    /// Covers the coherent tail and at least `4 n̄`.
    pub fn resolved_n_max(&self) -> usize {
        let nbar = self.alpha * self.alpha;
        self.n_max.unwrap_or_else(|| {
            let spec = ModelSpec::jc(self.g);
            default_truncation(&spec, self.alpha, None)
                .max(coherent_required_n_max(nbar))
                .max((4.0 * nbar).ceil() as usize)
        })
    }
}

/// Time interval and the largest `|<σ_z>|` inside it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug)]
pub struct CollapseRevivalReport {
    pub plan: CollapseRevivalPlan,
    pub n_max: usize,
    pub trajectory: Trajectory,
    pub revival_time: f64,
    pub window_width: f64,
    /// Centered on `t_r / 2`.
    pub collapse: Window,
    /// Centered on `t_r`; `None` when the run ends earlier.
    pub revival: Option<Window>,
    /// Windows of the same width sliding by half a width from the start of
    /// the collapse window to the end of the run.
    pub windows: Vec<Window>,
}

impl CollapseRevivalReport {
    /// `A_r / A_c`.
    pub fn revival_ratio(&self) -> Option<f64> {
        self.revival.map(|r| r.amplitude / self.collapse.amplitude)
    }

    /// Largest window amplitude relative to `A_c`.
    pub fn max_window_ratio(&self) -> f64 {
        self.windows.iter().map(|w| w.amplitude).fold(0.0, f64::max) / self.collapse.amplitude
    }
}

pub fn run_collapse_revival(
    plan: &CollapseRevivalPlan,
    exec: Execution,
) -> Result<CollapseRevivalReport> {
    if !matches!(plan.model, ModelKind::JC | ModelKind::NonlinearJC) {
        return Err(Error::invalid(format!(
            "collapse/revival needs JC or NonlinearJC, got {:?}",
            plan.model
        )));
    }
    if !(plan.alpha > 0.0) || plan.n_points < 2 {
        return Err(Error::invalid(
            "alpha must be positive and n_points at least 2",
        ));
    }
    let n_max = plan.resolved_n_max();
    let required = coherent_required_n_max(plan.alpha * plan.alpha);
    if n_max < required {
        return Err(Error::TruncationTooSmall { n_max, required });
    }
    let space = HilbertSpace::new(n_max)?;
    let h = match plan.model {
        ModelKind::JC => build_jc(space, plan.g)?,
        _ => build_nonlinear_jc(space, plan.g, plan.eta)?,
    };
    let psi0 = QuantumState::coherent(space, plan.alpha.into(), Qubit::Down)?;
    let t_end = periods_to_time(plan.resolved_duration(), plan.g);
    let times = linspace(t_end, plan.n_points);
    let trajectory = evolve_unitary(
        &h,
        &psi0,
        &times,
        &RecordOptions {
            exec,
            ..Default::default()
        },
    )?;

    let t_r = plan.revival_time();
    let w = t_r / 4.0;
    let sz = trajectory.sigma_z();
    let window = |start: f64| window_amplitude(&trajectory.times, &sz, start, start + w);
    let collapse = window(t_r / 2.0 - w / 2.0);
    let revival = (t_r + w / 2.0 <= t_end * (1.0 + 1e-12)).then(|| window(t_r - w / 2.0));
    let mut windows = Vec::new();
    let mut k = 0usize;
    loop {
        let start = collapse.start + k as f64 * w / 2.0;
        if start + w > t_end * (1.0 + 1e-12) {
            break;
        }
        windows.push(window(start));
        k += 1;
    }
    Ok(CollapseRevivalReport {
        plan: plan.clone(),
        n_max,
        trajectory,
        revival_time: t_r,
        window_width: w,
        collapse,
        revival,
        windows,
    })
}

fn window_amplitude(times: &[f64], values: &[f64], start: f64, end: f64) -> Window {
    let amplitude = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= start && **t <= end)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    Window {
        start,
        end,
        amplitude,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = CollapseRevivalPlan::new(ModelKind::JC, 30f64.sqrt(), 1.0, 0.0);
        assert_eq!(p.resolved_n_max(), 120);
        assert!((p.revival_time() - TAU * 30f64.sqrt()).abs() < 1e-12);
        let nl = CollapseRevivalPlan::new(ModelKind::NonlinearJC, 30f64.sqrt(), 1.0, 0.5);
        assert!((nl.resolved_duration() - 3.0 * p.resolved_duration()).abs() < 1e-12);
    }

    #[test]
    fn weak_coupling_stays_down() {
        let mut p = CollapseRevivalPlan::new(ModelKind::JC, 2.0, 1e-9, 0.0);
        p.duration = Some(1e-8);
        p.n_points = 11;
        let r = run_collapse_revival(&p, Execution::Sequential).unwrap();
        assert!(r
            .trajectory
            .sigma_z()
            .iter()
            .all(|s| (s + 1.0).abs() < 1e-12));
    }

    #[test]
    fn rejects_other_models() {
        let p = CollapseRevivalPlan::new(ModelKind::QRM, 1.0, 1.0, 0.0);
        assert!(run_collapse_revival(&p, Execution::Sequential).is_err());
        let mut p = CollapseRevivalPlan::new(ModelKind::JC, 5.0, 1.0, 0.0);
        p.n_max = Some(30);
        assert!(matches!(
            run_collapse_revival(&p, Execution::Sequential),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn window_amplitude_picks_max_inside() {
        let t = [0.0, 1.0, 2.0, 3.0];
        let v = [0.9, -0.5, 0.2, 0.8];
        let w = window_amplitude(&t, &v, 0.5, 2.5);
        assert_eq!(w.amplitude, 0.5);
    }
}
