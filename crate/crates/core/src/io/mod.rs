//! Scenario files, trajectory CSV/JSON output, run and sweep drivers, plot
//! data.

mod output;
mod plot;
mod run;
mod scenario;
mod sweep;

pub use output::{
    read_table, write_landscape_csv, write_snapshots_csv, write_trajectory_csv, Table,
};
pub use plot::{emit_plotdata, PlotFiles, PlotKind};
pub use run::{
    convergence_check, resolve_and_check, run, simulate, ConvergenceCheck, Metadata, RunResult,
    Simulation, CONVERGENCE_EXTRA, CONVERGENCE_LIMIT, OUT_DIR_ENV,
};
pub use scenario::{
    emit_scenario, parse_scenario, parse_scenario_str, LindbladConfig, ModelConfig, OutputsConfig,
    ResolvedModel, Scenario, TimesConfig, TruncationConfig, KHZ, MAX_N_MAX, SCHEMA_VERSION,
};
pub use sweep::{sweep, SweepAxis, SweepEntry, SweepOutcome};
