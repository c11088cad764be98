#![no_main]

use flexinfo_core::io::{cost_from_json, cost_to_json, parse_document};
use flexinfo_core::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    if let Ok(c) = cost_from_json::<Rational>(&doc) {
        assert_eq!(cost_from_json::<Rational>(&cost_to_json(&c)).expect("round trip"), c);
    }
    let _ = cost_from_json::<f64>(&doc);
});
