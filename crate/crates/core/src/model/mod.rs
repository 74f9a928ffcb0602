//! Domain types for the slice brokering model: templates, tenants, requests
//! and lock-ups, plus the reward function and traffic generators.

mod reward;
mod scenario;
mod traffic;

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use reward::{compute_reward, reward_without_monitoring};
pub use scenario::{
    PolicyParams, Scenario, ScenarioConfig, ScenarioSection, TemplateSpec, TenantOverride,
};
pub use traffic::{
    generate_request_stream, sample_arrival_rates, sample_utilization, GrantWindow, ParetoParams,
    MAX_PARETO_SHAPE,
};

/// A predefined `(resources, duration)` pair offered by the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceTemplate {
    pub id: usize,
    /// Requested PRBs.
    pub resources: u32,
    /// Lock-up length in rounds.
    pub duration: u32,
}

impl SliceTemplate {
    pub fn new(id: usize, resources: u32, duration: u32, capacity: u32) -> Result<Self> {
        if resources == 0 || resources > capacity {
            return Err(Error::param(
                "resources",
                format!("template {id}: {resources} PRBs outside 1..={capacity}"),
            ));
        }
        if duration == 0 {
            return Err(Error::param(
                "duration",
                format!("template {id}: duration must be at least one round"),
            ));
        }
        Ok(Self {
            id,
            resources,
            duration,
        })
    }
}

/// Distribution of the per-round used fraction `λ / R` of an active slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UtilizationDist {
    /// `λ` uniform on `[0, R]`.
    #[default]
    Uniform,
    /// `λ = R` every round.
    Full,
    /// `λ = fraction · R` every round.
    Constant { fraction: f64 },
    /// `λ / R` uniform on `[low, high]`.
    UniformRange { low: f64, high: f64 },
    /// `λ / R ~ Beta(a, b)`.
    Beta { a: f64, b: f64 },
}

impl UtilizationDist {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x.is_finite() && (0.0..=1.0).contains(&x);
        match *self {
            UtilizationDist::Uniform | UtilizationDist::Full => Ok(()),
            UtilizationDist::Constant { fraction } if unit(fraction) => Ok(()),
            UtilizationDist::UniformRange { low, high }
                if unit(low) && unit(high) && low <= high =>
            {
                Ok(())
            }
            UtilizationDist::Beta { a, b }
                if a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 =>
            {
                Ok(())
            }
            other => Err(Error::param(
                "utilization",
                format!("invalid utilization distribution {other:?}"),
            )),
        }
    }

    /// Draws a used fraction in `[0, 1]`.
    pub fn sample_fraction<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let f = match *self {
            UtilizationDist::Uniform => rng.random::<f64>(),
            UtilizationDist::Full => 1.0,
            UtilizationDist::Constant { fraction } => fraction,
            UtilizationDist::UniformRange { low, high } => low + (high - low) * rng.random::<f64>(),
            UtilizationDist::Beta { a, b } => Beta::new(a, b).map(|d| d.sample(rng)).unwrap_or(0.5),
        };
        f.clamp(0.0, 1.0)
    }

    pub fn mean_fraction(&self) -> f64 {
        match *self {
            UtilizationDist::Uniform => 0.5,
            UtilizationDist::Full => 1.0,
            UtilizationDist::Constant { fraction } => fraction,
            UtilizationDist::UniformRange { low, high } => 0.5 * (low + high),
            UtilizationDist::Beta { a, b } => a / (a + b),
        }
    }
}

/// How a tenant picks a template when it issues a request.
#[derive(Debug, Clone, PartialEq)]
pub enum TemplateChoice {
    Uniform,
    /// Unnormalised non-negative weights, one per template.
    Weighted(Vec<f64>),
}

impl TemplateChoice {
    pub fn validate(&self, template_count: usize) -> Result<()> {
        if let TemplateChoice::Weighted(w) = self {
            if w.len() != template_count {
                return Err(Error::param(
                    "template_weights",
                    format!("expected {template_count} weights, got {}", w.len()),
                ));
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
                return Err(Error::param(
                    "template_weights",
                    "weights must be non-negative with a positive sum",
                ));
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, template_count: usize, rng: &mut R) -> usize {
        match self {
            TemplateChoice::Uniform => rng.random_range(0..template_count),
            TemplateChoice::Weighted(w) => {
                let total: f64 = w.iter().sum();
                let mut target = rng.random::<f64>() * total;
                for (i, x) in w.iter().enumerate() {
                    if target < *x {
                        return i;
                    }
                    target -= x;
                }
                // rounding can leave `target` marginally above the last bucket
                w.iter().rposition(|x| *x > 0.0).unwrap_or(0)
            }
        }
    }
}

/// One arm of the bandit: a tenant and its traffic statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TenantProfile {
    pub id: usize,
    /// Requests per round (`φ_i`).
    pub arrival_rate: f64,
    pub template_choice: TemplateChoice,
    pub utilization: UtilizationDist,
}

impl TenantProfile {
    /// Probability that at least one request arrives within a single round.
    pub fn request_probability(&self) -> f64 {
        -(-self.arrival_rate).exp_m1()
    }
}

/// A slice request issued by a tenant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceRequest {
    pub tenant: usize,
    pub template: usize,
    /// Round at which the request is visible to the broker (1-based).
    pub arrival_round: u32,
    /// Continuous arrival time, used to order requests within a round.
    pub arrival_time: f64,
}

/// A granted slice that keeps its tenant selected until it expires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LockUp {
    pub tenant: usize,
    pub template: usize,
    pub start_round: u32,
    /// First round in which the slice is no longer active.
    pub end_round: u32,
    /// PRBs charged against the budget when the slice was admitted.
    pub cost: u32,
    pub resources: u32,
}

impl LockUp {
    /// Rounds left, counting `round` itself.
    pub fn remaining(&self, round: u32) -> u32 {
        self.end_round.saturating_sub(round)
    }

    pub fn is_active(&self, round: u32) -> bool {
        self.start_round <= round && round < self.end_round
    }
}
