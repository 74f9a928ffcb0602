use rand::Rng;

use super::seeds::{RunSeeds, StreamKind};
use crate::error::{Error, Result};
use crate::model::{compute_reward, generate_request_stream, Scenario};

/// A request that arrives in some round if its tenant is free then.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Offer {
    pub template: usize,
    pub arrival_time: f64,
}

/// Every random outcome of one run, sampled up front so that all policies
/// face the same arrivals and utilization.
///
/// Arrivals come from the tenant's unsuppressed request stream. A request
/// landing in a round where the tenant still holds a slice is simply ignored
/// by the simulator; exponential gaps are memoryless, so this matches
/// re-drawing the stream after the slice expires.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    horizon: u32,
    tenant_count: usize,
    offers: Vec<Option<Offer>>,
    used: Vec<f64>,
    training: Vec<f64>,
}

impl World {
    pub fn generate(scenario: &Scenario, seeds: &RunSeeds) -> Result<Self> {
        let n = scenario.tenant_count();
        let horizon = scenario.horizon;
        let t = horizon as usize;
        let mut rng = seeds.rng(StreamKind::World);

        let mut offers = vec![None; n * t];
        for profile in &scenario.tenants {
            let stream =
                generate_request_stream(profile, scenario.templates.len(), horizon, &[], &mut rng)?;
            for r in stream {
                offers[profile.id * t + (r.arrival_round as usize - 1)] = Some(Offer {
                    template: r.template,
                    arrival_time: r.arrival_time,
                });
            }
        }
        let mut used = Vec::with_capacity(n * t);
        for profile in &scenario.tenants {
            used.extend((0..t).map(|_| profile.utilization.sample_fraction(&mut rng)));
        }

        let mut rng = seeds.rng(StreamKind::Training);
        let training = scenario
            .tenants
            .iter()
            .map(|p| {
                if rng.random::<f64>() >= p.request_probability() {
                    return Ok(0.0);
                }
                let tpl = &scenario.templates
                    [p.template_choice.sample(scenario.templates.len(), &mut rng)];
                let lambda = p.utilization.sample_fraction(&mut rng) * f64::from(tpl.resources);
                compute_reward(tpl.resources, lambda, scenario.capacity, scenario.alpha)
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            horizon,
            tenant_count: n,
            offers,
            used,
            training,
        })
    }

    /// Builds a world from explicit tables indexed `[tenant][round - 1]`.
    pub fn from_parts(
        offers: Vec<Vec<Option<Offer>>>,
        used: Vec<Vec<f64>>,
        training: Vec<f64>,
    ) -> Result<Self> {
        let n = offers.len();
        let horizon = offers.first().map_or(0, Vec::len);
        if n == 0 || horizon == 0 {
            return Err(Error::Config(
                "world needs at least one tenant and round".into(),
            ));
        }
        if used.len() != n
            || training.len() != n
            || offers.iter().any(|o| o.len() != horizon)
            || used.iter().any(|u| u.len() != horizon)
        {
            return Err(Error::Config(
                "world tables have inconsistent shapes".into(),
            ));
        }
        if used.iter().flatten().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(Error::Config("used fractions must lie in [0, 1]".into()));
        }
        Ok(Self {
            horizon: horizon as u32,
            tenant_count: n,
            offers: offers.into_iter().flatten().collect(),
            used: used.into_iter().flatten().collect(),
            training,
        })
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn tenant_count(&self) -> usize {
        self.tenant_count
    }

    /// The request `tenant` issues in `round` (1-based), if any.
    pub fn offer(&self, tenant: usize, round: u32) -> Option<&Offer> {
        self.offers[tenant * self.horizon as usize + (round as usize - 1)].as_ref()
    }

    /// Used fraction `λ / R` of `tenant`'s slice in `round`.
    pub fn used_fraction(&self, tenant: usize, round: u32) -> f64 {
        self.used[tenant * self.horizon as usize + (round as usize - 1)]
    }

    /// Fictitious reward observed for each tenant during the training pulls.
    pub fn training_rewards(&self) -> &[f64] {
        &self.training
    }
}
