#![no_main]

use libfuzzer_sys::fuzz_target;
use qcorr::channels::TOL_TP;
use qcorr::io::parse_channel;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ch) = parse_channel(text, TOL_TP) {
        let _ = ch.classify(qcorr::channels::TOL_CLASSIFY);
    }
});
