#![no_main]

use libfuzzer_sys::fuzz_target;
use qcorr::numerics::ProductBasis;

fuzz_target!(|data: &[u8]| {
    if let Ok(basis) = serde_json::from_slice::<ProductBasis>(data) {
        let _ = basis.full();
    }
});
