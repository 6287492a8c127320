#![no_main]
use hadamard_lyapunov::report::parse_real;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(v) = parse_real(src) {
            assert!(v.is_finite());
        }
    }
});
