//! Replays the fuzz seed corpus through the parsers on stable.

use std::fs;
use std::path::PathBuf;

use slice_broker::analysis::RewardModel;
use slice_broker::harness::{audit_trace, run_simulation, RunSeeds};
use slice_broker::model::{Scenario, ScenarioConfig};
use slice_broker::policies::PolicyKind;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn scenario_seeds_round_trip_and_simulate() {
    let mut valid = 0;
    for (name, text) in seeds("scenario_config") {
        let Ok(cfg) = ScenarioConfig::from_toml_str(&text) else {
            continue;
        };
        valid += 1;
        let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(cfg, again, "{name}");
        let mut scenario = Scenario::from_config(&cfg).unwrap();
        scenario.horizon = scenario.horizon.min(200);
        for kind in [PolicyKind::Fcfs, PolicyKind::Onets, PolicyKind::Eucb] {
            let trace = run_simulation(&scenario, kind, &RunSeeds::new(0, 0)).unwrap();
            audit_trace(&scenario, &trace, true).unwrap_or_else(|e| panic!("{name} {kind}: {e}"));
        }
    }
    assert!(valid >= 3, "only {valid} scenario seeds parse");
}

#[test]
fn policy_seeds_parse_or_fail_cleanly() {
    let mut parsed = 0;
    for (name, text) in seeds("policy_list") {
        if let Ok(kinds) = PolicyKind::parse_list(&text) {
            parsed += 1;
            let joined = kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(",");
            assert_eq!(PolicyKind::parse_list(&joined).unwrap(), kinds, "{name}");
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn mean_seeds_parse_or_fail_cleanly() {
    let results: Vec<_> = seeds("mean_list")
        .into_iter()
        .map(|(name, text)| (name, RewardModel::parse(&text).is_ok()))
        .collect();
    assert!(results.iter().any(|(_, ok)| *ok));
    assert!(results.iter().any(|(n, ok)| n == "negative" && !ok));
}
