#![no_main]
use hadamard_lyapunov::Table;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = Table::from_csv(data) {
        let (lo, hi) = table.range();
        for &t in table.knots() {
            let _ = table.eval(t);
        }
        let _ = table.eval(0.5 * (lo + hi));
    }
});
