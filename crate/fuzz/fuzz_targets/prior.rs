#![no_main]

use flexinfo_cli::config::parse_prior;
use flexinfo_core::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_prior::<Rational>(text);
    let _ = parse_prior::<f64>(text);
});
