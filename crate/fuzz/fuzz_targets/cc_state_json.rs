#![no_main]

use libfuzzer_sys::fuzz_target;
use qcorr::measures::CCState;

fuzz_target!(|data: &[u8]| {
    if let Ok(cc) = serde_json::from_slice::<CCState>(data) {
        let rho = cc.render();
        assert!((rho.trace() - 1.0).abs() < 1e-6);
    }
});
