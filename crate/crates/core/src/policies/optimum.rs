//! Exact hindsight optimum for tiny instances.
//!
//! Knowing every arrival and every used fraction in advance, the best grant
//! sequence maximizes the cumulative reward subject to the lock-ups and to
//! the actual per-round usage `Σ λ ≤ C`. The search runs forward over rounds
//! on the lock-up state (template and remaining rounds per tenant); equal
//! states are merged keeping the best value, which is what a memoized
//! depth-first search over `(round, lock-up state)` computes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::harness::World;
use crate::model::{compute_reward, Scenario};

/// Upper bound on tenants accepted by [`hindsight_optimum`].
pub const HINDSIGHT_MAX_TENANTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimumLimits {
    pub max_tenants: usize,
    pub max_horizon: u32,
    /// Abort when a single round holds more distinct lock-up states.
    pub max_states: usize,
}

impl Default for OptimumLimits {
    fn default() -> Self {
        Self {
            max_tenants: HINDSIGHT_MAX_TENANTS,
            max_horizon: 2_000,
            max_states: 1 << 20,
        }
    }
}

/// Result of the hindsight search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumPlan {
    pub total_reward: f64,
    /// Tenants whose new slice starts in round `t` are in `new_grants[t - 1]`.
    pub new_grants: Vec<Vec<usize>>,
}

impl OptimumPlan {
    pub fn grants_at(&self, round: u32) -> &[usize] {
        &self.new_grants[round as usize - 1]
    }
}

const SLOT_BITS: u32 = 16;

/// Per tenant: template + 1 in the high byte (0 = free), rounds left in the low byte.
type Key = u128;

fn slot(key: Key, tenant: usize) -> (usize, u32) {
    let s = (key >> (tenant as u32 * SLOT_BITS)) as u16;
    ((s >> 8) as usize, u32::from(s & 0xff))
}

fn with_slot(key: Key, tenant: usize, template_plus_one: usize, left: u32) -> Key {
    let shift = tenant as u32 * SLOT_BITS;
    let cleared = key & !(0xffffu128 << shift);
    if left == 0 {
        return cleared;
    }
    cleared | ((((template_plus_one as u128) << 8) | u128::from(left)) << shift)
}

/// Computes the reward-maximizing grant sequence over the whole horizon.
pub fn hindsight_optimum(
    scenario: &Scenario,
    world: &World,
    limits: &OptimumLimits,
) -> Result<OptimumPlan> {
    let n = world.tenant_count();
    let horizon = world.horizon();
    if n > limits.max_tenants.min(HINDSIGHT_MAX_TENANTS) {
        return Err(Error::InstanceTooLarge(format!(
            "hindsight search supports at most {} tenants, got {n}",
            limits.max_tenants.min(HINDSIGHT_MAX_TENANTS)
        )));
    }
    if horizon > limits.max_horizon {
        return Err(Error::InstanceTooLarge(format!(
            "hindsight search supports at most {} rounds, got {horizon}",
            limits.max_horizon
        )));
    }
    if scenario.templates.len() >= 255 || scenario.templates.iter().any(|t| t.duration > 255) {
        return Err(Error::InstanceTooLarge(
            "hindsight search needs < 255 templates of at most 255 rounds".into(),
        ));
    }
    let cap = f64::from(scenario.capacity);
    let alpha = scenario.alpha;

    // (key, value) of the live states; back[t] holds (parent index, new-grant mask)
    let mut live: Vec<(Key, f64)> = vec![(0, 0.0)];
    let mut back: Vec<Vec<(u32, u8)>> = Vec::with_capacity(horizon as usize);

    for round in 1..=horizon {
        let mut index: HashMap<Key, usize> = HashMap::with_capacity(live.len() * 2);
        let mut next: Vec<(Key, f64)> = Vec::with_capacity(live.len() * 2);
        let mut parents: Vec<(u32, u8)> = Vec::with_capacity(live.len() * 2);

        let offers: Vec<Option<usize>> = (0..n)
            .map(|i| world.offer(i, round).map(|o| o.template))
            .collect();
        let used: Vec<f64> = (0..n).map(|i| world.used_fraction(i, round)).collect();

        for (parent, &(key, value)) in live.iter().enumerate() {
            let mut free_offers: u8 = 0;
            for (i, o) in offers.iter().enumerate() {
                if o.is_some() && slot(key, i).1 == 0 {
                    free_offers |= 1 << i;
                }
            }
            // enumerate submasks of free_offers, including the empty one
            let mut mask = free_offers;
            loop {
                let mut load = 0.0;
                let mut reward = 0.0;
                let mut child = 0u128;
                for i in 0..n {
                    let (tpl_plus_one, left) = slot(key, i);
                    let (tpl, left) = if left > 0 {
                        (tpl_plus_one - 1, left)
                    } else if mask & (1 << i) != 0 {
                        let tpl = offers[i].expect("masked tenants have offers");
                        (tpl, scenario.templates[tpl].duration)
                    } else {
                        continue;
                    };
                    let r = scenario.templates[tpl].resources;
                    let lambda = used[i] * f64::from(r);
                    load += lambda;
                    reward += compute_reward(r, lambda, scenario.capacity, alpha)?;
                    child = with_slot(child, i, tpl + 1, left - 1);
                }
                if load <= cap {
                    let total = value + reward;
                    match index.get(&child) {
                        Some(&k) => {
                            if total > next[k].1 {
                                next[k].1 = total;
                                parents[k] = (parent as u32, mask);
                            }
                        }
                        None => {
                            index.insert(child, next.len());
                            next.push((child, total));
                            parents.push((parent as u32, mask));
                        }
                    }
                }
                if mask == 0 {
                    break;
                }
                mask = (mask - 1) & free_offers;
            }
        }
        if next.len() > limits.max_states {
            return Err(Error::InstanceTooLarge(format!(
                "{} lock-up states in round {round} exceed the limit of {}",
                next.len(),
                limits.max_states
            )));
        }
        live = next;
        back.push(parents);
    }

    let (mut at, total_reward) =
        live.iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |best, (k, &(_, v))| {
                if v > best.1 {
                    (k, v)
                } else {
                    best
                }
            });
    let mut new_grants = vec![Vec::new(); horizon as usize];
    for t in (0..horizon as usize).rev() {
        let (parent, mask) = back[t][at];
        new_grants[t] = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        at = parent as usize;
    }
    Ok(OptimumPlan {
        total_reward,
        new_grants,
    })
}
