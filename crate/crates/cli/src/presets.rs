//! Figure presets: a scenario, a policy list and an optional sweep.

use slice_broker::model::ScenarioConfig;
use slice_broker::policies::PolicyKind;
use slice_broker::{Error, Result};

/// A parameter varied across the runs of one preset.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Tenants(Vec<usize>),
    Alpha(Vec<f64>),
}

/// One point of a sweep: a label used for the output directory and the
/// scenario it runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: ScenarioConfig,
    pub policies: Vec<PolicyKind>,
    pub seeds: usize,
    pub sweep: Option<Sweep>,
}

pub const PRESET_NAMES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];

const DEFAULT_SEEDS: usize = 100;

fn online() -> Vec<PolicyKind> {
    vec![
        PolicyKind::Onets,
        PolicyKind::Eucb,
        PolicyKind::Egreedy,
        PolicyKind::Random,
        PolicyKind::Fcfs,
    ]
}

impl Preset {
    pub fn by_name(name: &str) -> Result<Preset> {
        let table1 = ScenarioConfig::default();
        let preset = match name.trim().to_ascii_lowercase().as_str() {
            "fig2" => {
                let mut config = table1;
                config.scenario.tenants = 5;
                config.scenario.horizon = 1000;
                config.policy.k = 3;
                Preset {
                    name: "fig2",
                    description:
                        "5 tenants, K = 3, T = 1000: online policies against the hindsight optimum",
                    config,
                    policies: vec![
                        PolicyKind::Optimum,
                        PolicyKind::Eucb,
                        PolicyKind::Onets,
                        PolicyKind::Egreedy,
                    ],
                    seeds: DEFAULT_SEEDS,
                    sweep: None,
                }
            }
            "fig3" => Preset {
                name: "fig3",
                description:
                    "reference 10-tenant scenario: reward and utilization CDFs, selection ratios",
                config: table1,
                policies: online(),
                seeds: DEFAULT_SEEDS,
                sweep: None,
            },
            "fig4" => Preset {
                name: "fig4",
                description: "utilization, multiplexing gain and reward for 5, 10 and 15 tenants",
                config: table1,
                policies: online(),
                seeds: DEFAULT_SEEDS,
                sweep: Some(Sweep::Tenants(vec![5, 10, 15])),
            },
            "fig5" => Preset {
                name: "fig5",
                description: "per-round reward against utilization for alpha 0.1, 0.5 and 0.9",
                config: table1,
                policies: online(),
                seeds: DEFAULT_SEEDS,
                sweep: Some(Sweep::Alpha(vec![0.1, 0.5, 0.9])),
            },
            "fig6" => Preset {
                name: "fig6",
                description: "SLA violations and multiplexing gain for alpha from 0.1 to 1",
                config: table1,
                policies: online(),
                seeds: DEFAULT_SEEDS,
                sweep: Some(Sweep::Alpha(
                    (1..=10).map(|k| f64::from(k) / 10.0).collect(),
                )),
            },
            _ => {
                return Err(Error::UnknownPreset {
                    given: name.to_string(),
                    valid: PRESET_NAMES.join(", "),
                })
            }
        };
        Ok(preset)
    }

    pub fn all() -> Vec<Preset> {
        PRESET_NAMES
            .iter()
            .map(|n| Preset::by_name(n).expect("built-in preset"))
            .collect()
    }

    /// The scenarios this preset runs, in order.
    pub fn variants(&self) -> Vec<Variant> {
        expand(&self.config, self.sweep.as_ref())
    }
}

/// Applies `sweep` to `base`, or returns `base` alone.
pub fn expand(base: &ScenarioConfig, sweep: Option<&Sweep>) -> Vec<Variant> {
    match sweep {
        None => vec![Variant {
            label: String::new(),
            config: base.clone(),
        }],
        Some(Sweep::Tenants(ns)) => ns
            .iter()
            .map(|&n| {
                let mut config = base.clone();
                config.scenario.tenants = n;
                Variant {
                    label: format!("tenants_{n:02}"),
                    config,
                }
            })
            .collect(),
        Some(Sweep::Alpha(alphas)) => alphas
            .iter()
            .map(|&a| {
                let mut config = base.clone();
                config.scenario.alpha = a;
                Variant {
                    label: format!("alpha_{a:.1}"),
                    config,
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_through_the_parser() {
        for p in Preset::all() {
            for v in p.variants() {
                let text = v.config.to_toml_string().unwrap();
                let back = ScenarioConfig::from_toml_str(&text).unwrap();
                assert_eq!(back, v.config, "{} {}", p.name, v.label);
            }
        }
    }

    #[test]
    fn fig2_pins_the_small_instance() {
        let p = Preset::by_name("fig2").unwrap();
        assert_eq!(p.config.scenario.tenants, 5);
        assert_eq!(p.config.scenario.horizon, 1000);
        assert_eq!(p.config.policy.k, 3);
        assert_eq!(p.policies.len(), 4);
        // everything else is the reference scenario
        let mut rest = p.config.clone();
        rest.scenario.tenants = 10;
        rest.scenario.horizon = 10_000;
        rest.policy.k = 6;
        assert_eq!(rest, ScenarioConfig::default());
    }

    #[test]
    fn reference_scenario_values() {
        let c = Preset::by_name("fig3").unwrap().config;
        let s = &c.scenario;
        assert_eq!(
            (s.tenants, s.templates, s.capacity, s.horizon),
            (10, 10, 150, 10_000)
        );
        assert_eq!((s.pareto_mean, s.pareto_std, s.alpha), (100.0, 0.1, 0.5));
        assert_eq!((c.policy.b, c.policy.d, c.policy.k), (10.0, 0.01, 6));
    }

    #[test]
    fn sweeps_expand_to_labelled_variants() {
        let labels: Vec<String> = Preset::by_name("fig4")
            .unwrap()
            .variants()
            .into_iter()
            .map(|v| v.label)
            .collect();
        assert_eq!(labels, ["tenants_05", "tenants_10", "tenants_15"]);
        let fig6 = Preset::by_name("FIG6").unwrap().variants();
        assert_eq!(fig6.len(), 10);
        assert_eq!(fig6[9].config.scenario.alpha, 1.0);
        assert_eq!(fig6[0].label, "alpha_0.1");
    }

    #[test]
    fn unknown_preset_lists_names() {
        let e = Preset::by_name("fig9").unwrap_err().to_string();
        assert!(e.contains("fig2, fig3, fig4, fig5, fig6"), "{e}");
    }
}
