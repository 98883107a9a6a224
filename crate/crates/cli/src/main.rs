//! `ionrabi` command-line front end.
//!
//! Exit codes: 0 success, 1 other failure, 2 schema/usage error, 3 numerical
//! tolerance failure, 4 truncation convergence failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ionrabi::dynamics::{rwa_crosscheck, RwaOptions, RwaReport};
use ionrabi::fock::{barrier_eta, f1, f1_closed_form, HilbertSpace};
use ionrabi::io::{self, PlotKind, Scenario, SweepAxis};
use ionrabi::models::{ModelKind, ModelSpec, DEFAULT_NU};
use ionrabi::protocols::{f1_landscape, periods_to_time, run_fock_prep, FockPrepPlan};
use ionrabi::{Error, ErrorClass, Execution};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "ionrabi",
    version,
    about = "Trapped-ion Jaynes-Cummings and Rabi dynamics beyond the Lamb-Dicke regime"
)]
struct Cli {
    /// Worker threads (1 runs everything sequentially).
    #[arg(long, global = true, default_value_t = default_threads())]
    threads: usize,
    /// Output root directory.
    #[arg(long, global = true, env = io::OUT_DIR_ENV, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate f1(n, η), or find the η where f1(n, η) = 0.
    F1(F1Args),
    /// Run a scenario file.
    Evolve {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Dissipative Fock-state preparation.
    Fockprep(FockprepArgs),
    /// Table of log10|f1(n, η)| for heat maps.
    Landscape(LandscapeArgs),
    /// Run a scenario over a grid of one parameter.
    Sweep {
        #[arg(long)]
        template: PathBuf,
        /// KEY=START:END:COUNT or KEY=V1,V2,...  (e.g. model.eta=0.4:0.6:5)
        #[arg(long)]
        axis: String,
    },
    /// Truncation convergence and, for Rabi-type models, the RWA cross-check.
    Validate(ValidateArgs),
    /// Gnuplot data and script from a trajectory or landscape CSV.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// timeseries, heatmap or bars
        #[arg(long)]
        kind: String,
    },
}

#[derive(Args)]
struct F1Args {
    /// Fock level N or inclusive range A:B.
    #[arg(long)]
    n: String,
    /// Comma-separated η values.
    #[arg(long, value_delimiter = ',')]
    eta: Vec<f64>,
    /// Print the smallest η in (0.001, 1] with f1(n, η) = 0 instead.
    #[arg(long)]
    find_zero: bool,
}

#[derive(Args)]
struct FockprepArgs {
    #[arg(long)]
    target: usize,
    /// Defaults to the η that blocks the target level.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    nbar: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma_ratio: f64,
    /// In units of 2π/g.
    #[arg(long, default_value_t = 100.0)]
    duration: f64,
    #[arg(long, default_value_t = 201)]
    n_points: usize,
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args)]
struct LandscapeArgs {
    #[arg(long, default_value_t = 0)]
    n_min: usize,
    #[arg(long, default_value_t = 60)]
    n_max: usize,
    #[arg(long, default_value_t = 0.01)]
    eta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_max: f64,
    /// Number of η points.
    #[arg(long, default_value_t = 100)]
    grid: usize,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Largest allowed RWA infidelity.
    #[arg(long, default_value_t = 0.01)]
    tolerance: f64,
    /// RWA comparison length in units of 2π/g.
    #[arg(long, default_value_t = 3.0)]
    rwa_periods: f64,
    /// Trap frequency (2π·kHz) for models that do not carry one.
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    skip_rwa: bool,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let exec = Execution::from_threads(cli.threads);
    let threads = cli.threads;
    let result = ionrabi::exec::with_threads(threads, move || dispatch(&cli, exec));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Schema => 2,
        ErrorClass::Numerical => 3,
        ErrorClass::Convergence => 4,
        ErrorClass::Other => 1,
    }
}

fn print(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn dispatch(cli: &Cli, exec: Execution) -> ionrabi::Result<ExitCode> {
    match &cli.command {
        Command::F1(a) => cmd_f1(a),
        Command::Evolve { scenario } => {
            let s = io::parse_scenario(scenario)?;
            let r = io::run(&s, &cli.out, exec)?;
            print(&serde_json::to_value(&r)?);
            Ok(if r.converged() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            })
        }
        Command::Fockprep(a) => cmd_fockprep(a, &cli.out, exec),
        Command::Landscape(a) => {
            let l = f1_landscape(a.n_min, a.n_max, (a.eta_min, a.eta_max), a.grid, exec)?;
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("landscape.csv");
            io::write_landscape_csv(&path, &l)?;
            print(
                &json!({ "landscape": path, "rows": l.n_values.len(), "columns": l.eta_values.len() }),
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { template, axis } => {
            let s = io::parse_scenario(template)?;
            let axis: SweepAxis = axis.parse()?;
            let out = io::sweep(&s, &axis, &cli.out, exec)?;
            let failed = out.failures().count();
            print(&json!({
                "points": out.entries.len(),
                "failed": failed,
                "index": out.index_path,
                "failures": out.failures_path,
            }));
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Validate(a) => cmd_validate(a, exec),
        Command::Plot { input, kind } => {
            let kind: PlotKind = kind.parse()?;
            let files = io::emit_plotdata(input, kind, &cli.out)?;
            print(&json!({ "data": files.data, "script": files.script }));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_n(s: &str) -> ionrabi::Result<(usize, usize)> {
    let bad = || Error::Schema {
        key: Some("n".into()),
        message: format!("expected N or A:B, got {s:?}"),
    };
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once(':') {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(bad());
            }
            Ok((a, b))
        }
        None => num(s).map(|n| (n, n)),
    }
}

fn cmd_f1(a: &F1Args) -> ionrabi::Result<ExitCode> {
    let (lo, hi) = parse_n(&a.n)?;
    if a.find_zero {
        println!("n,eta_zero");
        for n in lo..=hi {
            match barrier_eta(n) {
                Ok(eta) => println!("{n},{eta:.16e}"),
                Err(e) => println!("{n},none ({e})"),
            }
        }
        return Ok(ExitCode::SUCCESS);
    }
    if a.eta.is_empty() {
        return Err(Error::Schema {
            key: Some("eta".into()),
            message: "give --eta or --find-zero".into(),
        });
    }
    println!("n,eta,f1,f1_closed_form");
    for n in lo..=hi {
        for &eta in &a.eta {
            println!(
                "{n},{eta},{:.16e},{:.16e}",
                f1(n, eta)?,
                f1_closed_form(n, eta)?
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fockprep(a: &FockprepArgs, out: &Path, exec: Execution) -> ionrabi::Result<ExitCode> {
    let mut plan = FockPrepPlan::new(a.target);
    plan.eta = a.eta;
    plan.initial_nbar = a.nbar;
    plan.gamma_ratio = a.gamma_ratio;
    plan.duration = a.duration;
    plan.n_points = a.n_points;
    plan.n_max = a.n_max;
    let r = run_fock_prep(&plan, exec)?;
    let dir = out.join(format!("fockprep-{}", a.target));
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("trajectory.csv");
    let periods: Vec<f64> = r
        .trajectory
        .times
        .iter()
        .map(|t| t / periods_to_time(1.0, plan.g))
        .collect();
    io::write_trajectory_csv(&csv, &periods, &r.trajectory)?;
    let meta = json!({
        "plan": plan,
        "eta": r.eta,
        "n_max": r.n_max,
        "time_unit": "2*pi/g",
        "integrator": r.trajectory.diagnostics,
        "target_population": r.target_population,
        "residual_below": r.residual_below,
        "residual_above": r.residual_above,
        "warnings": r.warnings,
        "code_version": env!("CARGO_PKG_VERSION"),
    });
    let meta_path = dir.join("metadata.json");
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
    print(&json!({
        "target": a.target,
        "eta": r.eta,
        "target_population": r.target_population,
        "residual_below": r.residual_below,
        "residual_above": r.residual_above,
        "trajectory": csv,
        "metadata": meta_path,
    }));
    Ok(ExitCode::SUCCESS)
}

/// Two-tone drive reproducing a Rabi-type model, for the RWA check.
fn two_tone_for(spec: &ModelSpec, nu: f64) -> ionrabi::Result<ModelSpec> {
    match spec.kind {
        ModelKind::TwoTone => Ok(spec.clone()),
        ModelKind::NonlinearQRM if spec.eta > 0.0 => {
            let delta_r = spec.omega_r - spec.omega0_r;
            let delta_b = -spec.omega_r - spec.omega0_r;
            Ok(ModelSpec::two_tone(
                spec.eta,
                2.0 * spec.g / spec.eta,
                nu,
                delta_r,
                delta_b,
            ))
        }
        k => Err(Error::InvalidParameter(format!(
            "no two-tone realization for {k:?}"
        ))),
    }
}

fn cmd_validate(a: &ValidateArgs, exec: Execution) -> ionrabi::Result<ExitCode> {
    let s: Scenario = io::parse_scenario(&a.scenario)?;
    let warnings = s.validate()?;
    let resolved = s.resolve()?;
    let base = io::simulate(&s, &resolved.spec, resolved.n_max, exec)?;
    let conv = io::convergence_check(&s, &resolved, &base, exec)?;

    let rwa: Option<RwaReport> = match two_tone_for(&resolved.spec, 0.0) {
        Ok(_) if !a.skip_rwa => {
            let nu = match (a.nu, resolved.spec.nu) {
                (Some(k), _) => k * io::KHZ,
                (None, n) if n > 0.0 => n,
                _ => DEFAULT_NU,
            };
            let tt = two_tone_for(&resolved.spec, nu)?;
            let psi0 = s.initial.prepare(HilbertSpace::new(resolved.n_max)?)?;
            if psi0.is_pure() {
                let t_end = periods_to_time(a.rwa_periods, tt.g);
                Some(rwa_crosscheck(
                    &tt,
                    &psi0,
                    t_end,
                    a.tolerance,
                    &RwaOptions::default(),
                )?)
            } else {
                log::warn!("RWA check skipped: mixed initial state");
                None
            }
        }
        _ => None,
    };
    print(&json!({
        "scenario": s.name,
        "warnings": warnings,
        "convergence": conv,
        "rwa": rwa.as_ref().map(|r| json!({
            "max_deviation": r.max_deviation,
            "tolerance": r.tolerance,
            "valid": r.valid,
            "dt": r.dt,
            "steps": r.steps,
        })),
    }));
    if rwa.as_ref().is_some_and(|r| !r.valid) {
        return Ok(ExitCode::from(3));
    }
    Ok(if conv.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}
