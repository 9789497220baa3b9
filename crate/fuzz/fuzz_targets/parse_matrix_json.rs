#![no_main]

use acs6::io::{matrix_to_json, parse_matrix_json};
use acs6::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for (rows, cols) in [(6, 6), (8, 8), (1, 8)] {
        if let Ok(m) = parse_matrix_json::<Rational>(text, rows, cols) {
            assert_eq!(
                parse_matrix_json::<Rational>(&matrix_to_json(&m), rows, cols),
                Ok(m)
            );
        }
        let _ = parse_matrix_json::<f64>(text, rows, cols);
    }
});
