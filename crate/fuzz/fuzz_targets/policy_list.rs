#![no_main]

use libfuzzer_sys::fuzz_target;
use slice_broker::policies::PolicyKind;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(kinds) = PolicyKind::parse_list(text) {
        assert!(!kinds.is_empty());
        let joined = kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(",");
        assert_eq!(PolicyKind::parse_list(&joined).unwrap(), kinds);
    }
});
