#![no_main]

use libfuzzer_sys::fuzz_target;
use slice_broker::analysis::{expected_pulls_bound, regret_lower_bound, RewardModel, MAX_BOUND_ARMS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(model) = RewardModel::parse(text) else { return };
    assert!(model.means().iter().all(|m| m.is_finite() && *m > 0.0));
    for k in 1..=model.arm_count() {
        let lb = regret_lower_bound(&model, k).unwrap();
        assert!(lb >= 0.0 || lb.is_nan());
    }
    if model.arm_count() <= MAX_BOUND_ARMS.min(8) {
        let k = (model.arm_count() + 1) / 2;
        for i in 0..model.arm_count() {
            let p = expected_pulls_bound(model.means(), k, i).unwrap();
            assert!(p.is_finite());
        }
    }
});
