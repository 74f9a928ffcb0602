//! Scenario configuration file and the materialised scenario it describes.
//!
//! The file is TOML. Every key is optional; omitted keys take the reference
//! simulation defaults (10 tenants, 10 templates, 150 PRBs, ...).
//!
//! ```toml
//! [scenario]
//! tenants = 10
//! templates = 10
//! capacity = 150
//! pareto_mean = 100.0
//! pareto_std = 0.1
//! alpha = 0.5
//! horizon = 10000
//! seed = 1
//! duration_min = 1
//! duration_max = 10
//! utilization = { kind = "uniform" }
//!
//! [policy]
//! k = 6
//! b = 10.0
//! d = 0.01
//! random_ties = false
//!
//! [[template]]          # optional explicit template list
//! resources = 50
//! duration = 4
//!
//! [[tenant]]            # optional per-tenant overrides
//! id = 0
//! rate = 0.5
//! template_weights = [1.0, 0.0]
//! utilization = { kind = "beta", a = 2.0, b = 5.0 }
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{sample_arrival_rates, SliceTemplate, TemplateChoice, TenantProfile, UtilizationDist};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub tenants: usize,
    pub templates: usize,
    pub capacity: u32,
    pub pareto_mean: f64,
    pub pareto_std: f64,
    pub alpha: f64,
    pub horizon: u32,
    /// Seed for the scenario itself: templates and arrival rates.
    pub seed: u64,
    pub duration_min: u32,
    pub duration_max: u32,
    pub utilization: UtilizationDist,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            tenants: 10,
            templates: 10,
            capacity: 150,
            pareto_mean: 100.0,
            pareto_std: 0.1,
            alpha: 0.5,
            horizon: 10_000,
            seed: 1,
            duration_min: 1,
            duration_max: 10,
            utilization: UtilizationDist::Uniform,
        }
    }
}

/// Parameters shared by the learning policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyParams {
    /// Batch size for ONETS.
    pub k: usize,
    /// ε-greedy exploration scale.
    pub b: f64,
    /// ε-greedy gap parameter.
    pub d: f64,
    /// Break argmax ties uniformly at random instead of by lowest tenant id.
    pub random_ties: bool,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            k: 6,
            b: 10.0,
            d: 0.01,
            random_ties: false,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::param("k", "batch size must be at least 1"));
        }
        if !self.b.is_finite() || self.b <= 0.0 {
            return Err(Error::param("b", format!("{} must be > 0", self.b)));
        }
        if !self.d.is_finite() || self.d <= 0.0 || self.d > 1.0 {
            return Err(Error::param("d", format!("{} outside (0, 1]", self.d)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSpec {
    pub resources: u32,
    pub duration: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TenantOverride {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utilization: Option<UtilizationDist>,
}

/// Contents of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    pub policy: PolicyParams,
    #[serde(rename = "template", skip_serializing_if = "Vec::is_empty")]
    pub template_list: Vec<TemplateSpec>,
    #[serde(rename = "tenant", skip_serializing_if = "Vec::is_empty")]
    pub tenant_overrides: Vec<TenantOverride>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        if s.tenants == 0 {
            return Err(Error::param("tenants", "at least one tenant required"));
        }
        if s.capacity == 0 {
            return Err(Error::param("capacity", "capacity must be positive"));
        }
        if s.horizon == 0 {
            return Err(Error::param(
                "horizon",
                "horizon must be at least one round",
            ));
        }
        if !(0.0..=1.0).contains(&s.alpha) {
            return Err(Error::param("alpha", format!("{} outside [0, 1]", s.alpha)));
        }
        if self.template_list.is_empty() {
            if s.templates == 0 {
                return Err(Error::param("templates", "at least one template required"));
            }
            if s.duration_min == 0 || s.duration_min > s.duration_max {
                return Err(Error::param(
                    "duration_min",
                    format!(
                        "invalid duration range {}..={}",
                        s.duration_min, s.duration_max
                    ),
                ));
            }
        } else {
            for (i, t) in self.template_list.iter().enumerate() {
                SliceTemplate::new(i, t.resources, t.duration, s.capacity)?;
            }
        }
        // a bad (mean, std) pair is caught here rather than at build time
        super::ParetoParams::from_mean_std(s.pareto_mean, s.pareto_std)?;
        s.utilization.validate()?;
        self.policy.validate()?;

        let template_count = self.template_count();
        let mut seen = vec![false; s.tenants];
        for o in &self.tenant_overrides {
            if o.id >= s.tenants {
                return Err(Error::param(
                    "tenant.id",
                    format!(
                        "override for tenant {} but only {} tenants",
                        o.id, s.tenants
                    ),
                ));
            }
            if std::mem::replace(&mut seen[o.id], true) {
                return Err(Error::param(
                    "tenant.id",
                    format!("duplicate override for {}", o.id),
                ));
            }
            if let Some(rate) = o.rate {
                if !rate.is_finite() || rate <= 0.0 {
                    return Err(Error::param("tenant.rate", format!("{rate} must be > 0")));
                }
            }
            if let Some(w) = &o.template_weights {
                TemplateChoice::Weighted(w.clone()).validate(template_count)?;
            }
            if let Some(u) = &o.utilization {
                u.validate()?;
            }
        }
        Ok(())
    }

    pub fn template_count(&self) -> usize {
        if self.template_list.is_empty() {
            self.scenario.templates
        } else {
            self.template_list.len()
        }
    }
}

/// A fully materialised scenario: concrete templates and tenant profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub capacity: u32,
    pub alpha: f64,
    pub horizon: u32,
    pub templates: Vec<SliceTemplate>,
    pub tenants: Vec<TenantProfile>,
    pub policy: PolicyParams,
}

impl Scenario {
    /// Builds templates and tenant profiles. Generated parts are drawn from
    /// independent ChaCha streams of `scenario.seed`: stream 0 for templates,
    /// stream 1 for arrival rates.
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let s = &cfg.scenario;

        let templates = if cfg.template_list.is_empty() {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            rng.set_stream(0);
            (0..s.templates)
                .map(|id| {
                    let r = rng.random_range(1..=s.capacity);
                    let l = rng.random_range(s.duration_min..=s.duration_max);
                    SliceTemplate::new(id, r, l, s.capacity)
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            cfg.template_list
                .iter()
                .enumerate()
                .map(|(id, t)| SliceTemplate::new(id, t.resources, t.duration, s.capacity))
                .collect::<Result<Vec<_>>>()?
        };

        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        rng.set_stream(1);
        let rates = sample_arrival_rates(s.tenants, s.pareto_mean, s.pareto_std, &mut rng)?;

        let tenants = rates
            .into_iter()
            .enumerate()
            .map(|(id, rate)| {
                let o = cfg.tenant_overrides.iter().find(|o| o.id == id);
                TenantProfile {
                    id,
                    arrival_rate: o.and_then(|o| o.rate).unwrap_or(rate),
                    template_choice: match o.and_then(|o| o.template_weights.clone()) {
                        Some(w) => TemplateChoice::Weighted(w),
                        None => TemplateChoice::Uniform,
                    },
                    utilization: o.and_then(|o| o.utilization).unwrap_or(s.utilization),
                }
            })
            .collect();

        Ok(Self {
            capacity: s.capacity,
            alpha: s.alpha,
            horizon: s.horizon,
            templates,
            tenants,
            policy: cfg.policy,
        })
    }

    pub fn tenant_count(&self) -> usize {
        self.tenants.len()
    }
}
