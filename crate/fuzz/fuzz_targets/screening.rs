#![no_main]

use flexinfo_core::io::{parse_document, screening_instance_from_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_document(text) else { return };
    if let Ok(inst) = screening_instance_from_json::<f64>(&doc) {
        let _ = inst.validate();
    }
});
