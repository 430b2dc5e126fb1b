#![no_main]

use libfuzzer_sys::fuzz_target;
use qcorr::io::{parse_state, state_to_json};
use qcorr::numerics::Tolerances;

// Anything that parses must print and parse back to the same state.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let tol = Tolerances::default();
    if let Ok(rho) = parse_state(text, &tol) {
        let back = parse_state(&state_to_json(&rho), &tol).expect("printed state parses");
        assert_eq!(back, rho);
    }
});
