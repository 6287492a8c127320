#![no_main]
use hadamard_lyapunov::parse_expr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(src) = std::str::from_utf8(data) {
        if let Ok(ast) = parse_expr(src) {
            // printing must give back the same tree
            let again = parse_expr(&ast.to_string()).expect("printed expression reparses");
            assert_eq!(again, ast);
            let _ = ast.eval(1.5);
        }
    }
});
