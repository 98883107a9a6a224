use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::output::{write_snapshots_csv, write_trajectory_csv};
use super::scenario::{ResolvedModel, Scenario};
use crate::dynamics::{
    evolve_lindblad, evolve_unitary, linspace, Diagnostics, LindbladOptions, LindbladSpec,
    RecordOptions, Trajectory,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::fock::{qubit_ops, HilbertSpace};
use crate::models::ModelSpec;
use crate::protocols::periods_to_time;

/// Environment variable naming the output root used by the CLI.
pub const OUT_DIR_ENV: &str = "IONRABI_OUT";
/// Extra Fock levels for the truncation re-run.
pub const CONVERGENCE_EXTRA: usize = 20;
pub const CONVERGENCE_LIMIT: f64 = 1e-6;

/// A trajectory on the scenario grid plus phonon snapshots.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub n_max: usize,
    /// Grid in units of 2π/g, as written to the CSV.
    pub times: Vec<f64>,
    pub trajectory: Trajectory,
    pub snapshot_times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
}

/// Evolves the scenario at truncation `n_max` with an already resolved
/// model.
pub fn simulate(
    scenario: &Scenario,
    spec: &ModelSpec,
    n_max: usize,
    exec: Execution,
) -> Result<Simulation> {
    let space = HilbertSpace::new(n_max)?;
    let g = spec.coupling();
    let grid = linspace(scenario.times.t_end, scenario.times.n_points);
    let mut snap_times = scenario.outputs.snapshots.clone();
    snap_times.sort_by(f64::total_cmp);
    snap_times.dedup();

    // One sorted time list carrying both the grid and the snapshots.
    let mut all: Vec<f64> = grid.iter().chain(&snap_times).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let position = |t: f64| {
        all.binary_search_by(|x| x.total_cmp(&t))
            .expect("time present")
    };
    let grid_idx: Vec<usize> = grid.iter().map(|&t| position(t)).collect();
    let snap_idx: Vec<usize> = snap_times.iter().map(|&t| position(t)).collect();
    let abs_times: Vec<f64> = all.iter().map(|&t| periods_to_time(t, g)).collect();

    let h = spec.hamiltonian(space)?;
    let psi0 = scenario.initial.prepare(space)?;
    let full = if scenario.lindblad.is_some() || !psi0.is_pure() {
        let mut terms = LindbladSpec::new();
        if let Some(l) = &scenario.lindblad {
            if l.gamma_ratio > 0.0 {
                terms.push(l.gamma_ratio * g, qubit_ops(space).sigma_minus)?;
            }
        }
        let opts = LindbladOptions {
            dt_max: scenario.times.dt_max.map(|d| periods_to_time(d, g)),
            exec,
            ..Default::default()
        };
        evolve_lindblad(&h, &terms, &psi0.to_density(), &abs_times, &opts)?
    } else {
        evolve_unitary(
            &h,
            &psi0,
            &abs_times,
            &RecordOptions {
                snapshots: Vec::new(),
                exec,
            },
        )?
    };

    let snapshots = snap_idx
        .iter()
        .map(|&i| full.records[i].phonons.clone())
        .collect();
    let trajectory = Trajectory {
        space,
        times: grid_idx.iter().map(|&i| full.times[i]).collect(),
        records: grid_idx.iter().map(|&i| full.records[i].clone()).collect(),
        snapshots: Vec::new(),
        diagnostics: full.diagnostics,
    };
    Ok(Simulation {
        n_max,
        times: grid,
        trajectory,
        snapshot_times: snap_times,
        snapshots,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCheck {
    pub n_max: usize,
    pub n_max_check: usize,
    pub max_change: f64,
    pub limit: f64,
    pub passed: bool,
}

/// JSON sidecar: everything needed to reproduce the CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metadata {
    pub name: String,
    pub code_version: String,
    pub scenario: Scenario,
    /// Model in rad/s after η refinement.
    pub model: ResolvedModel,
    pub time_unit: String,
    pub csv_columns: String,
    pub integrator: Diagnostics,
    pub convergence: Option<ConvergenceCheck>,
    pub warnings: Vec<String>,
    pub determinism: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunResult {
    pub name: String,
    pub csv_path: PathBuf,
    pub snapshots_path: Option<PathBuf>,
    pub metadata_path: PathBuf,
    pub wall_time_s: f64,
    pub convergence: Option<ConvergenceCheck>,
}

impl RunResult {
    /// True unless a convergence check ran and failed.
    pub fn converged(&self) -> bool {
        self.convergence.as_ref().is_none_or(|c| c.passed)
    }
}

/// Reruns `base` with [`CONVERGENCE_EXTRA`] more Fock levels and compares
/// every recorded observable and snapshot.
pub fn convergence_check(
    scenario: &Scenario,
    resolved: &ResolvedModel,
    base: &Simulation,
    exec: Execution,
) -> Result<ConvergenceCheck> {
    let n_check = base.n_max + CONVERGENCE_EXTRA;
    let check = simulate(scenario, &resolved.spec, n_check, exec)?;
    let mut max_change = base.trajectory.max_deviation(&check.trajectory);
    for (a, b) in base.snapshots.iter().zip(&check.snapshots) {
        for (n, pb) in b.iter().enumerate() {
            max_change = max_change.max((a.get(n).copied().unwrap_or(0.0) - pb).abs());
        }
    }
    let passed = max_change < CONVERGENCE_LIMIT;
    if !passed {
        log::warn!(
            "{}: truncation change {max_change:.3e} at n_max={n_check}",
            scenario.name
        );
    }
    Ok(ConvergenceCheck {
        n_max: base.n_max,
        n_max_check: n_check,
        max_change,
        limit: CONVERGENCE_LIMIT,
        passed,
    })
}

/// Resolves the scenario, runs it at its truncation and at `n_max + 20`,
/// and compares.
pub fn resolve_and_check(scenario: &Scenario, exec: Execution) -> Result<ConvergenceCheck> {
    let resolved = scenario.resolve()?;
    let base = simulate(scenario, &resolved.spec, resolved.n_max, exec)?;
    convergence_check(scenario, &resolved, &base, exec)
}

/// Runs a scenario and writes `<out_dir>/<name>/{trajectory.csv,
/// snapshots.csv, metadata.json}`.
pub fn run(scenario: &Scenario, out_dir: &Path, exec: Execution) -> Result<RunResult> {
    let start = Instant::now();
    let warnings = scenario.validate()?;
    let resolved = scenario.resolve()?;
    let sim = simulate(scenario, &resolved.spec, resolved.n_max, exec)?;

    let convergence = if scenario.truncation.check_convergence {
        Some(convergence_check(scenario, &resolved, &sim, exec)?)
    } else {
        None
    };

    let dir = out_dir.join(&scenario.name);
    std::fs::create_dir_all(&dir)?;
    let csv_path = dir.join("trajectory.csv");
    write_trajectory_csv(&csv_path, &sim.times, &sim.trajectory)?;
    let snapshots_path = if sim.snapshot_times.is_empty() {
        None
    } else {
        let p = dir.join("snapshots.csv");
        write_snapshots_csv(&p, &sim.snapshot_times, &sim.snapshots)?;
        Some(p)
    };
    let meta = Metadata {
        name: scenario.name.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: scenario.clone(),
        model: resolved,
        time_unit: "2*pi/g".into(),
        csv_columns: "t, sigma_z, fidelity, n_mean, P_0..P_nmax".into(),
        integrator: sim.trajectory.diagnostics.clone(),
        convergence: convergence.clone(),
        warnings,
        determinism: "no random numbers; results are independent of the thread count \
                      and bit-identical on the same platform and build"
            .into(),
    };
    let metadata_path = dir.join("metadata.json");
    std::fs::write(&metadata_path, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(RunResult {
        name: scenario.name.clone(),
        csv_path,
        snapshots_path,
        metadata_path,
        wall_time_s: start.elapsed().as_secs_f64(),
        convergence,
    })
}
