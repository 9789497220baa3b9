#![no_main]

use acs6::homotopy::GroupExpr;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(g) = text.parse::<GroupExpr>() {
        assert_eq!(g.to_string().parse::<GroupExpr>(), Ok(g));
    }
});
