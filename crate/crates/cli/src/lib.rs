//! Command-line front end: runs experiments from a scenario file or a
//! figure preset, evaluates the analytical bounds and exports plot-ready
//! data files.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 when a
//! run fails.

pub mod bounds;
pub mod presets;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use slice_broker::analysis::RewardModel;
use slice_broker::harness::{
    run_experiment, write_json, write_trace_file, ExperimentOptions, ExperimentResult, RunSeeds,
    SeedPlan, SimulationTrace,
};
use slice_broker::model::{Scenario, ScenarioConfig};
use slice_broker::policies::PolicyKind;
use slice_broker::{Error, Result};

use presets::{expand, Preset, Sweep};
use report::{RunReport, VariantReport};

/// Environment variable holding the worker thread count.
pub const WORKERS_ENV: &str = "SLICE_BROKER_WORKERS";

const DEFAULT_SEEDS: usize = 10;

#[derive(Debug, Parser)]
#[command(
    name = "slice-broker",
    version,
    about = "Online network slice broker simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and export its data files.
    Run(RunArgs),
    /// Evaluate the regret lower bound and the pull-probability bounds.
    Bounds(BoundsCli),
    /// List or print the figure presets.
    Presets {
        #[command(subcommand)]
        action: Option<PresetAction>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PresetAction {
    /// Names and one-line descriptions.
    List,
    /// Print a preset's scenario as TOML.
    Show { name: String },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario TOML file.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// Figure preset: fig2, fig3, fig4, fig5 or fig6.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Comma-separated policies, e.g. `onets,eucb,random`.
    #[arg(long, value_name = "LIST")]
    pub policies: Option<String>,
    /// Number of independent runs.
    #[arg(long, value_name = "N")]
    pub seeds: Option<usize>,
    /// Output directory; nothing is written without it.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "U64", default_value_t = 1)]
    pub master_seed: u64,
    /// Override the number of rounds.
    #[arg(long, value_name = "T")]
    pub horizon: Option<u32>,
    /// Skip the per-run trace files.
    #[arg(long)]
    pub no_traces: bool,
}

#[derive(Debug, Args)]
pub struct BoundsCli {
    /// Comma-separated arm means (the indices for the pull bound).
    #[arg(long, value_name = "LIST")]
    pub means: String,
    /// Batch size.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 10.0)]
    pub b: f64,
    #[arg(long, default_value_t = 0.01)]
    pub d: f64,
    /// Horizon for the expected pull counts and the regret floor.
    #[arg(long, value_name = "T", default_value_t = 10_000)]
    pub horizon: u32,
    /// Tenant count for the ε-greedy bound; defaults to the arm count.
    #[arg(long)]
    pub tenants: Option<usize>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Store the values under `bounds` in this JSON summary.
    #[arg(long, value_name = "PATH")]
    pub append: Option<PathBuf>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnknownPolicy { .. }
        | Error::UnknownPreset { .. }
        | Error::Config(_)
        | Error::InvalidParameter { .. } => 1,
        _ => 2,
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Run(args) => cmd_run(&args, &worker_pool()?, out),
        Command::Bounds(args) => cmd_bounds(&args, out),
        Command::Presets { action } => match action.unwrap_or(PresetAction::List) {
            PresetAction::List => {
                for p in Preset::all() {
                    writeln!(out, "{:<6} {}", p.name, p.description).map_err(io)?;
                }
                Ok(())
            }
            PresetAction::Show { name } => {
                let p = Preset::by_name(&name)?;
                writeln!(out, "# {}: {}", p.name, p.description).map_err(io)?;
                let names: Vec<&str> = p.policies.iter().map(|k| k.name()).collect();
                writeln!(out, "# policies: {}", names.join(",")).map_err(io)?;
                writeln!(out, "# seeds: {}", p.seeds).map_err(io)?;
                match &p.sweep {
                    Some(Sweep::Tenants(v)) => writeln!(out, "# sweep tenants: {v:?}"),
                    Some(Sweep::Alpha(v)) => writeln!(out, "# sweep alpha: {v:?}"),
                    None => Ok(()),
                }
                .map_err(io)?;
                write!(out, "{}", p.config.to_toml_string()?).map_err(io)
            }
        },
    }
}

fn worker_count(value: Option<&str>) -> Result<Option<usize>> {
    let Some(v) = value else { return Ok(None) };
    v.trim()
        .parse()
        .ok()
        .filter(|n: &usize| *n > 0)
        .map(Some)
        .ok_or_else(|| Error::Config(format!("{WORKERS_ENV}={v} is not a positive integer")))
}

fn worker_pool() -> Result<rayon::ThreadPool> {
    let value = std::env::var(WORKERS_ENV).ok();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(value.as_deref())? {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Io(e.to_string()))
}

/// What a `run` invocation executes after presets and overrides are applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub preset: Option<&'static str>,
    pub config: ScenarioConfig,
    pub policies: Vec<PolicyKind>,
    pub seeds: usize,
    pub sweep: Option<Sweep>,
}

fn default_policies() -> Vec<PolicyKind> {
    vec![
        PolicyKind::Onets,
        PolicyKind::Eucb,
        PolicyKind::Egreedy,
        PolicyKind::Random,
        PolicyKind::Fcfs,
    ]
}

pub fn resolve(args: &RunArgs) -> Result<RunPlan> {
    let mut plan = if let Some(name) = &args.preset {
        let p = Preset::by_name(name)?;
        RunPlan {
            preset: Some(p.name),
            config: p.config,
            policies: p.policies,
            seeds: p.seeds,
            sweep: p.sweep,
        }
    } else {
        let config = match &args.scenario {
            Some(path) => ScenarioConfig::from_path(path)?,
            None => ScenarioConfig::default(),
        };
        RunPlan {
            preset: None,
            config,
            policies: default_policies(),
            seeds: DEFAULT_SEEDS,
            sweep: None,
        }
    };
    if let Some(list) = &args.policies {
        plan.policies = PolicyKind::parse_list(list)?;
    }
    if let Some(n) = args.seeds {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "seeds",
                reason: "at least one seed required".into(),
            });
        }
        plan.seeds = n;
    }
    if let Some(t) = args.horizon {
        plan.config.scenario.horizon = t;
    }
    plan.config.validate()?;
    Ok(plan)
}

fn cmd_run(args: &RunArgs, pool: &rayon::ThreadPool, out: &mut dyn Write) -> Result<()> {
    let plan = resolve(args)?;
    let variants = expand(&plan.config, plan.sweep.as_ref());
    let seeds = SeedPlan::new(args.master_seed, plan.seeds);
    let options = ExperimentOptions::default();
    let mut results: Vec<(String, ExperimentResult)> = Vec::with_capacity(variants.len());
    for v in &variants {
        let scenario = Scenario::from_config(&v.config)?;
        let dir = args.out.as_ref().map(|o| o.join(&v.label));
        let result = match (&dir, args.no_traces) {
            (Some(dir), false) => {
                let traces = dir.join("traces");
                std::fs::create_dir_all(&traces)?;
                let mut sink = |kind: PolicyKind, s: &RunSeeds, t: &SimulationTrace| {
                    write_trace_file(&traces, kind, s, t).map(|_| ())
                };
                pool.install(|| {
                    run_experiment(&scenario, &plan.policies, &seeds, &options, Some(&mut sink))
                })?
            }
            _ => {
                pool.install(|| run_experiment(&scenario, &plan.policies, &seeds, &options, None))?
            }
        };
        report::print_table(out, &v.label, &result).map_err(io)?;
        if let Some(dir) = &dir {
            report::write_variant_files(dir, &result)?;
        }
        results.push((v.label.clone(), result));
    }
    if let Some(root) = &args.out {
        write_outputs(root, &plan, args.master_seed, &results)?;
        writeln!(out, "wrote {}", root.display()).map_err(io)?;
    }
    Ok(())
}

fn write_outputs(
    root: &Path,
    plan: &RunPlan,
    master_seed: u64,
    results: &[(String, ExperimentResult)],
) -> Result<()> {
    std::fs::create_dir_all(root)?;
    if plan.sweep.is_some() {
        let rows: Vec<(String, &ExperimentResult)> =
            results.iter().map(|(l, r)| (l.clone(), r)).collect();
        report::write_sweep_csv(&root.join("sweep.csv"), &rows)?;
    }
    let summary = RunReport {
        preset: plan.preset,
        master_seed,
        seeds: plan.seeds,
        variants: results
            .iter()
            .map(|(label, result)| VariantReport { label, result })
            .collect(),
    };
    write_json(&root.join("summary.json"), &summary)
}

fn cmd_bounds(args: &BoundsCli, out: &mut dyn Write) -> Result<()> {
    let parsed = bounds::BoundsArgs {
        means: RewardModel::parse(&args.means)?,
        k: args.k,
        b: args.b,
        d: args.d,
        horizon: args.horizon,
        tenants: args.tenants,
    };
    let r = bounds::compute(&parsed)?;
    if args.json {
        let text = serde_json::to_string_pretty(&r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(out, "{text}").map_err(io)?;
    } else {
        bounds::print(out, &r).map_err(io)?;
    }
    if let Some(path) = &args.append {
        bounds::append_to_summary(path, &r)?;
    }
    Ok(())
}
