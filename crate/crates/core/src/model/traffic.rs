use log::warn;
use rand::Rng;
use rand_distr::{Distribution, Exp, Pareto};

use super::{SliceRequest, SliceTemplate, TenantProfile, UtilizationDist};
use crate::error::{Error, Result};

/// Upper clamp on the Pareto shape. Tiny std/mean ratios otherwise push the
/// shape towards infinity.
pub const MAX_PARETO_SHAPE: f64 = 1e6;

/// Pareto `(scale, shape)` matching a requested mean and standard deviation.
///
/// With shape `a > 2`: `mean = a·xm/(a−1)` and `std/mean = 1/sqrt(a(a−2))`,
/// so `a = 1 + sqrt(1 + (mean/std)²)` and `xm = mean·(a−1)/a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoParams {
    pub scale: f64,
    pub shape: f64,
}

impl ParetoParams {
    pub fn from_mean_std(mean: f64, std: f64) -> Result<Self> {
        if !mean.is_finite() || mean <= 0.0 {
            return Err(Error::param("pareto_mean", format!("{mean} must be > 0")));
        }
        if !std.is_finite() || std <= 0.0 {
            return Err(Error::param("pareto_std", format!("{std} must be > 0")));
        }
        let ratio = mean / std;
        let mut shape = 1.0 + (1.0 + ratio * ratio).sqrt();
        if !shape.is_finite() || shape > MAX_PARETO_SHAPE {
            warn!(
                "pareto shape {shape:.3e} for mean {mean} / std {std} clamped to {MAX_PARETO_SHAPE:e}"
            );
            shape = MAX_PARETO_SHAPE;
        }
        Ok(Self {
            scale: mean * (shape - 1.0) / shape,
            shape,
        })
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale / (self.shape - 1.0)
    }
}

/// Draws per-tenant arrival rates from a Pareto law with the given mean/std.
pub fn sample_arrival_rates<R: Rng + ?Sized>(
    count: usize,
    mean: f64,
    std: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let p = ParetoParams::from_mean_std(mean, std)?;
    let dist = Pareto::new(p.scale, p.shape)
        .map_err(|e| Error::param("pareto_std", format!("no valid Pareto law: {e}")))?;
    Ok((0..count).map(|_| dist.sample(rng)).collect())
}

/// Interval `[start_round, end_round)` during which a tenant holds a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrantWindow {
    pub start_round: u32,
    pub end_round: u32,
}

/// Generates the request stream of one tenant over rounds `1..=horizon`.
///
/// Inter-arrival gaps are exponential with the tenant's rate; an arrival at
/// continuous time `τ` lands in round `⌈τ⌉`. At most one request per round is
/// kept. Arrivals falling inside one of `grants` are dropped and the clock is
/// restarted at the window's expiry.
pub fn generate_request_stream<R: Rng + ?Sized>(
    profile: &TenantProfile,
    template_count: usize,
    horizon: u32,
    grants: &[GrantWindow],
    rng: &mut R,
) -> Result<Vec<SliceRequest>> {
    if horizon == 0 {
        return Err(Error::param(
            "horizon",
            "horizon must be at least one round",
        ));
    }
    if template_count == 0 {
        return Err(Error::param("templates", "at least one template required"));
    }
    let rate = profile.arrival_rate;
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::param("arrival_rate", format!("{rate} must be > 0")));
    }
    let gaps = Exp::new(rate).map_err(|e| Error::param("arrival_rate", e.to_string()))?;
    let end = f64::from(horizon);

    let mut out = Vec::new();
    let mut clock = 0.0f64;
    let mut last_round = 0u32;
    loop {
        clock += gaps.sample(rng);
        if clock > end {
            break;
        }
        let round = (clock.ceil() as u32).max(last_round + 1);
        if round > horizon {
            break;
        }
        if let Some(w) = grants
            .iter()
            .find(|w| w.start_round <= round && round < w.end_round)
        {
            clock = f64::from(w.end_round - 1);
            last_round = w.end_round - 1;
            continue;
        }
        out.push(SliceRequest {
            tenant: profile.id,
            template: profile.template_choice.sample(template_count, rng),
            arrival_round: round,
            arrival_time: clock,
        });
        clock = f64::from(round);
        last_round = round;
    }
    Ok(out)
}

/// Draws the PRBs used by an active slice in one round, `0 ≤ λ ≤ R`.
pub fn sample_utilization<R: Rng + ?Sized>(
    template: &SliceTemplate,
    dist: &UtilizationDist,
    rng: &mut R,
) -> f64 {
    let r = f64::from(template.resources);
    (dist.sample_fraction(rng) * r).clamp(0.0, r)
}
