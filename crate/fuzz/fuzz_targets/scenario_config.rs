#![no_main]

use libfuzzer_sys::fuzz_target;
use slice_broker::harness::{audit_trace, run_simulation, RunSeeds};
use slice_broker::model::{Scenario, ScenarioConfig};
use slice_broker::policies::PolicyKind;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ScenarioConfig::from_toml_str(text) else { return };
    let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
    assert_eq!(cfg, again);

    let s = &cfg.scenario;
    if s.tenants > 64 || cfg.template_count() > 64 {
        return;
    }
    let scenario = Scenario::from_config(&cfg).unwrap();
    if scenario.horizon > 256 {
        return;
    }
    for kind in [PolicyKind::Fcfs, PolicyKind::Onets, PolicyKind::Eucb] {
        let trace = run_simulation(&scenario, kind, &RunSeeds::new(0, 0)).unwrap();
        audit_trace(&scenario, &trace, true).unwrap();
    }
});
