#![no_main]

use flexinfo_core::io::{distribution_from_json, distribution_to_json, parse_document};
use flexinfo_core::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    if let Ok(phi) = distribution_from_json::<Rational>(&doc) {
        let again = distribution_from_json::<Rational>(&distribution_to_json(&phi)).expect("round trip");
        assert_eq!(again, phi);
    }
    let _ = distribution_from_json::<f64>(&doc);
});
