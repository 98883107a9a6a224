use ionrabi::dynamics::{lindblad_rhs, poisson_tail, LindbladSpec, QuantumState};
use ionrabi::fock::{barrier_eta, qubit_ops, HilbertSpace, Qubit};
use ionrabi::models::{build_nonlinear_anti_jc, ModelKind, ModelSpec};
use ionrabi::protocols::*;
use ionrabi::Execution;
use num_complex::Complex64 as C64;

#[test]
fn fock17_from_thermal() {
    let plan = FockPrepPlan::new(17);
    let r = run_fock_prep(&plan, Execution::Parallel).unwrap();
    assert!(r.target_population >= 0.99, "{}", r.target_population);
    assert!(r.trajectory.diagnostics.max_norm_drift < 1e-8);
    let initial_above = r.trajectory.records[0].population_above(17);
    for rec in &r.trajectory.records {
        assert!(rec.population_above(17) <= initial_above + 1e-6);
    }
    // two resolutions agree
    let mut fine = plan.clone();
    fine.dt_max = Some(r.trajectory.diagnostics.dt.unwrap() / 2.0);
    fine.n_points = 2;
    let f = run_fock_prep(&fine, Execution::Parallel).unwrap();
    assert!((f.target_population - r.target_population).abs() < 1e-6);
    println!(
        "P17 = {} (fine {})",
        r.target_population, f.target_population
    );
}

#[test]
fn fock17_from_ground() {
    let mut plan = FockPrepPlan::new(17);
    plan.initial_nbar = 0.0;
    let r = run_fock_prep(&plan, Execution::Parallel).unwrap();
    assert!(r.target_population >= 0.99, "{}", r.target_population);
    let thermal = run_fock_prep(&FockPrepPlan::new(17), Execution::Parallel).unwrap();
    let residual = |res: &FockPrepResult| 1.0 - res.target_population;
    assert!(residual(&r) < residual(&thermal));
}

#[test]
fn fock17_needs_dissipation() {
    let mut plan = FockPrepPlan::new(17);
    plan.gamma_ratio = 0.0;
    plan.n_points = 51;
    let r = run_fock_prep(&plan, Execution::Parallel).unwrap();
    assert!(r.target_population < 0.99, "{}", r.target_population);
}

#[test]
fn fock17_dark_state() {
    let s = HilbertSpace::new(40).unwrap();
    let h = build_nonlinear_anti_jc(s, 1.0, barrier_eta(17).unwrap()).unwrap();
    let spec = LindbladSpec::new()
        .with(2.0, qubit_ops(s).sigma_minus)
        .unwrap();
    let rho = QuantumState::fock(s, 17, Qubit::Down)
        .unwrap()
        .density_matrix();
    let res = lindblad_rhs(&h, &spec, &rho)
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    assert!(res < 1e-10);
}

fn fig4() -> (ModelSpec, QuantumState) {
    let spec = ModelSpec::nonlinear_qrm(1.0, 0.67898, 0.25, 0.0);
    let psi = QuantumState::fock(HilbertSpace::new(84).unwrap(), 0, Qubit::Down).unwrap();
    (spec, psi)
}

#[test]
fn barrier_at_seven_holds() {
    let (spec, psi) = fig4();
    let t_end = periods_to_time(20.0, spec.g);
    let snaps = [t_end / 2.0, t_end];
    let r = run_filter_analysis(&spec, &psi, t_end, &snaps, &FilterOptions::default()).unwrap();
    assert_eq!(r.barrier_n, 7);
    assert_eq!(r.eta_requested, 0.67898);
    assert!((r.eta_used - 0.67898).abs() < 5e-5);
    assert!(r.leakage_max < 1e-9, "{}", r.leakage_max);
    assert_eq!(r.snapshots.len(), 2);
    // something actually moves below the barrier
    assert!(r.fidelity.iter().any(|&f| f < 0.5));
}

#[test]
fn barrier_leakage_independent_of_truncation() {
    let (spec, _) = fig4();
    let t_end = periods_to_time(5.0, spec.g);
    let opts = FilterOptions {
        n_points: 401,
        ..Default::default()
    };
    let leak = |n_max| {
        let psi = QuantumState::fock(HilbertSpace::new(n_max).unwrap(), 0, Qubit::Down).unwrap();
        run_filter_analysis(&spec, &psi, t_end, &[], &opts)
            .unwrap()
            .leakage_max
    };
    assert!((leak(42) - leak(84)).abs() < 1e-9);
}

#[test]
fn coherent_filter_at_ten() {
    let spec = ModelSpec::nonlinear_qrm(3.7, 0.57838, 1.0, 0.0);
    let s = HilbertSpace::new(91).unwrap();
    let psi = QuantumState::coherent(s, C64::new(1.0, 0.0), Qubit::Down).unwrap();
    let t_end = periods_to_time(20.0, spec.g);
    let r = run_filter_analysis(&spec, &psi, t_end, &[], &FilterOptions::default()).unwrap();
    assert_eq!(r.barrier_n, 10);
    let tail = poisson_tail(1.0, 10);
    assert!(
        (r.initial_leakage - tail).abs() < 1e-12,
        "{} {}",
        r.initial_leakage,
        tail
    );
    assert!(r.leakage_max <= tail + 1e-9);
    assert!(r.leakage_growth() < 1e-9);

    let linear = ModelSpec::qrm(3.7, 1.0, 0.0);
    let c = run_leakage_control(&linear, &psi, t_end, &[], 10, &FilterOptions::default()).unwrap();
    assert!(c.leakage_max > 100.0 * tail, "{}", c.leakage_max);
}

#[test]
fn jc_collapse_and_revival() {
    let plan = CollapseRevivalPlan::new(ModelKind::JC, 30f64.sqrt(), 1.0, 0.0);
    let r = run_collapse_revival(&plan, Execution::Parallel).unwrap();
    let ratio = r.revival_ratio().unwrap();
    assert!(ratio > 3.0, "{ratio}");
}

#[test]
fn nonlinear_jc_has_no_clear_revival() {
    let plan = CollapseRevivalPlan::new(ModelKind::NonlinearJC, 30f64.sqrt(), 1.0, 0.5);
    let r = run_collapse_revival(&plan, Execution::Parallel).unwrap();
    let ratio = r.max_window_ratio();
    assert!(ratio < 1.5, "{ratio}");
    assert!(r.windows.len() > 20);
}
