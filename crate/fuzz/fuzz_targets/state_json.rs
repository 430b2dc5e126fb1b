#![no_main]

use libfuzzer_sys::fuzz_target;
use qcorr::io::parse_state;
use qcorr::numerics::Tolerances;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_state(text, &Tolerances::default());
    }
});
