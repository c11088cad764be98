#![no_main]

use flexinfo_core::io::{parse_problem, problem_to_json, to_canonical};
use flexinfo_core::Rational;
use libfuzzer_sys::fuzz_target;

// Accepted problems re-serialize to a document that parses to the same problem.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse_problem::<Rational>(text) {
        let again = parse_problem::<Rational>(&to_canonical(&problem_to_json(&d))).expect("round trip");
        assert_eq!(again.actions(), d.actions());
        let _ = d.subdivision();
    }
    let _ = parse_problem::<f64>(text);
});
