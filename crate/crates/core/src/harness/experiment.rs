//! Multi-seed experiments and cross-seed aggregation.

use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::seeds::{RunSeeds, SeedPlan};
use super::sim::{run_on_world, SimulationTrace};
use super::world::World;
use crate::error::{Error, Result};
use crate::model::Scenario;
use crate::policies::{OptimumLimits, PolicyKind};

/// Number of equal-width bins behind the CDF points.
pub const CDF_BINS: usize = 100;

/// Sample mean with a two-sided 95% Student-t confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_dev: f64,
    pub ci95: f64,
    pub samples: usize,
    /// Set when fewer than two samples make the interval meaningless; the
    /// half-width is then 0.
    pub degenerate: bool,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_dev: f64::NAN,
                ci95: 0.0,
                samples: 0,
                degenerate: true,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Self {
                mean,
                std_dev: 0.0,
                ci95: 0.0,
                samples: 1,
                degenerate: true,
            };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let std_dev = var.sqrt();
        let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .expect("degrees of freedom are positive")
            .inverse_cdf(0.975);
        Self {
            mean,
            std_dev,
            ci95: t * std_dev / (n as f64).sqrt(),
            samples: n,
            degenerate: false,
        }
    }
}

/// Scalar outcome of one `(policy, seed)` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub run: u64,
    pub cumulative_reward: f64,
    pub mean_reward: f64,
    pub mean_utilization: f64,
    pub violation_rate: f64,
    pub multiplexing_gain: f64,
    /// Mean policy decision time per round, in seconds.
    pub select_seconds_per_round: f64,
    pub selections: Vec<u64>,
    /// `batch_sizes[k]` counts the rounds in which exactly `k` tenants were granted.
    pub batch_sizes: Vec<u64>,
    pub final_means: Vec<f64>,
    pub final_pulls: Vec<u64>,
}

impl RunSummary {
    pub fn from_trace(run: u64, trace: &SimulationTrace) -> Self {
        let mut batch_sizes = vec![0u64; trace.tenant_count() + 1];
        for r in &trace.rounds {
            batch_sizes[r.granted.len()] += 1;
        }
        Self {
            run,
            cumulative_reward: trace.cumulative_reward,
            mean_reward: trace.mean_reward(),
            mean_utilization: trace.mean_utilization(),
            violation_rate: trace.violation_rate(),
            multiplexing_gain: trace.mean_multiplexing_gain(),
            select_seconds_per_round: trace.select_time.as_secs_f64() / f64::from(trace.horizon()),
            selections: trace.selections.clone(),
            batch_sizes,
            final_means: trace.final_means.clone(),
            final_pulls: trace.final_pulls.clone(),
        }
    }
}

/// Fixed-bin histogram over `[0, upper]`.
#[derive(Debug, Clone, PartialEq)]
struct Histogram {
    upper: f64,
    counts: Vec<u64>,
}

impl Histogram {
    fn new(upper: f64) -> Self {
        Self {
            upper,
            counts: vec![0; CDF_BINS],
        }
    }

    fn add(&mut self, x: f64) {
        let k = ((x / self.upper) * CDF_BINS as f64).floor();
        let k = (k.max(0.0) as usize).min(CDF_BINS - 1);
        self.counts[k] += 1;
    }

    fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// `(x, P(X ≤ x))` at every bin's upper edge.
    fn cdf(&self) -> Vec<(f64, f64)> {
        let total: u64 = self.counts.iter().sum();
        let mut acc = 0u64;
        self.counts
            .iter()
            .enumerate()
            .map(|(k, c)| {
                acc += c;
                let x = self.upper * (k + 1) as f64 / CDF_BINS as f64;
                (
                    x,
                    if total == 0 {
                        0.0
                    } else {
                        acc as f64 / total as f64
                    },
                )
            })
            .collect()
    }
}

/// Cross-seed aggregate of one policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyResult {
    pub policy: PolicyKind,
    /// Cumulative reward per run.
    pub reward: Estimate,
    pub mean_reward: Estimate,
    pub utilization: Estimate,
    pub violation_rate: Estimate,
    pub multiplexing_gain: Estimate,
    pub select_seconds_per_round: Estimate,
    /// Mean fraction of rounds in which each tenant was granted.
    pub selection_ratio: Vec<f64>,
    /// Distribution of the per-round reward sum over all rounds and runs.
    pub reward_cdf: Vec<(f64, f64)>,
    /// Distribution of the per-round served utilization.
    pub utilization_cdf: Vec<(f64, f64)>,
    /// Per-round multiplexing gain averaged over runs.
    pub gain_series: Vec<f64>,
    pub runs: Vec<RunSummary>,
}

/// Outcome of [`run_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub master_seed: u64,
    pub seeds: usize,
    pub tenants: usize,
    pub capacity: u32,
    pub horizon: u32,
    pub alpha: f64,
    pub policies: Vec<PolicyResult>,
    #[serde(skip)]
    pub traces: Vec<(PolicyKind, Vec<SimulationTrace>)>,
}

impl ExperimentResult {
    pub fn policy(&self, kind: PolicyKind) -> Option<&PolicyResult> {
        self.policies.iter().find(|p| p.policy == kind)
    }
}

/// Called once per finished `(policy, run)`; calls are serialized.
pub type TraceSink<'a> =
    dyn FnMut(PolicyKind, &RunSeeds, &SimulationTrace) -> Result<()> + Send + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExperimentOptions {
    pub keep_traces: bool,
    pub optimum: OptimumLimits,
}

#[derive(Debug)]
struct Partial {
    summary: RunSummary,
    rewards: Histogram,
    utilization: Histogram,
    gain: Vec<f64>,
    trace: Option<SimulationTrace>,
}

/// Runs every policy on every seed of `plan`. All policies of a run share
/// one sampled world. Runs execute on the current rayon pool; aggregation
/// happens in run order, so results do not depend on scheduling.
pub fn run_experiment(
    scenario: &Scenario,
    policies: &[PolicyKind],
    plan: &SeedPlan,
    options: &ExperimentOptions,
    sink: Option<&mut TraceSink<'_>>,
) -> Result<ExperimentResult> {
    if plan.count == 0 {
        return Err(Error::param("seeds", "at least one seed required"));
    }
    if policies.is_empty() {
        return Err(Error::param("policies", "at least one policy required"));
    }
    scenario.policy.validate()?;
    let reward_upper = scenario.tenant_count() as f64;
    let sink = sink.map(std::sync::Mutex::new);

    let per_run: Vec<Vec<Partial>> = plan
        .runs()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|seeds| {
            let world = World::generate(scenario, &seeds)?;
            policies
                .iter()
                .map(|&kind| {
                    let trace = run_on_world(scenario, &world, kind, &seeds, &options.optimum)?;
                    if let Some(sink) = &sink {
                        let mut f = sink.lock().expect("sink poisoned");
                        (*f)(kind, &seeds, &trace)?;
                    }
                    let mut rewards = Histogram::new(reward_upper);
                    let mut utilization = Histogram::new(1.0);
                    for r in &trace.rounds {
                        rewards.add(r.reward_sum);
                        utilization.add(r.utilization(trace.capacity));
                    }
                    Ok(Partial {
                        summary: RunSummary::from_trace(seeds.run, &trace),
                        rewards,
                        utilization,
                        gain: trace
                            .rounds
                            .iter()
                            .map(|r| r.multiplexing_gain(trace.capacity))
                            .collect(),
                        trace: options.keep_traces.then_some(trace),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns: Vec<Vec<Partial>> = policies.iter().map(|_| Vec::new()).collect();
    for run in per_run {
        for (p, partial) in run.into_iter().enumerate() {
            columns[p].push(partial);
        }
    }

    let mut results = Vec::with_capacity(policies.len());
    let mut traces = Vec::new();
    for (&kind, column) in policies.iter().zip(columns) {
        let (res, tr) = aggregate(kind, scenario, column);
        results.push(res);
        if options.keep_traces {
            traces.push((kind, tr));
        }
    }
    Ok(ExperimentResult {
        master_seed: plan.master,
        seeds: plan.count,
        tenants: scenario.tenant_count(),
        capacity: scenario.capacity,
        horizon: scenario.horizon,
        alpha: scenario.alpha,
        policies: results,
        traces,
    })
}

fn aggregate(
    kind: PolicyKind,
    scenario: &Scenario,
    column: Vec<Partial>,
) -> (PolicyResult, Vec<SimulationTrace>) {
    let n = column.len() as f64;
    let horizon = scenario.horizon as usize;
    let est = |f: &dyn Fn(&RunSummary) -> f64| {
        Estimate::from_samples(&column.iter().map(|p| f(&p.summary)).collect::<Vec<_>>())
    };
    let reward = est(&|s| s.cumulative_reward);
    let mean_reward = est(&|s| s.mean_reward);
    let utilization = est(&|s| s.mean_utilization);
    let violation_rate = est(&|s| s.violation_rate);
    let multiplexing_gain = est(&|s| s.multiplexing_gain);
    let select_seconds_per_round = est(&|s| s.select_seconds_per_round);

    let mut selection_ratio = vec![0.0; scenario.tenant_count()];
    let mut rewards = Histogram::new(scenario.tenant_count() as f64);
    let mut util = Histogram::new(1.0);
    let mut gain_series = vec![0.0; horizon];
    for p in &column {
        for (acc, s) in selection_ratio.iter_mut().zip(&p.summary.selections) {
            *acc += *s as f64 / horizon as f64 / n;
        }
        rewards.merge(&p.rewards);
        util.merge(&p.utilization);
        for (acc, g) in gain_series.iter_mut().zip(&p.gain) {
            *acc += g / n;
        }
    }
    let mut runs = Vec::with_capacity(column.len());
    let mut traces = Vec::new();
    for p in column {
        runs.push(p.summary);
        traces.extend(p.trace);
    }
    (
        PolicyResult {
            policy: kind,
            reward,
            mean_reward,
            utilization,
            violation_rate,
            multiplexing_gain,
            select_seconds_per_round,
            selection_ratio,
            reward_cdf: rewards.cdf(),
            utilization_cdf: util.cdf(),
            gain_series,
            runs,
        },
        traces,
    )
}

/// Mean policy decision time per round over a whole trace.
pub fn per_round_time(trace: &SimulationTrace) -> Duration {
    trace.select_time / trace.horizon().max(1)
}
