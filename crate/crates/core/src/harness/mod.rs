//! Simulation loop, multi-seed experiments and result export.

mod audit;
mod experiment;
mod output;
mod seeds;
mod sim;
mod synthetic;
mod world;

pub use audit::{audit_trace, AuditFailure};
pub use experiment::{
    per_round_time, run_experiment, Estimate, ExperimentOptions, ExperimentResult, PolicyResult,
    RunSummary, TraceSink, CDF_BINS,
};
pub use output::{trace_file_name, write_json, write_trace_csv, write_trace_file, TRACE_HEADER};
pub use seeds::{RunSeeds, SeedPlan, StreamKind};
pub use sim::{
    run_on_world, run_simulation, RoundRecord, RunOptions, ScriptedPolicy, SimulationTrace,
    Simulator,
};
pub use synthetic::{run_synthetic, SyntheticRun};
pub use world::{Offer, World};
