#![no_main]

use acs6::{Rational, Scalar};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(q) = Rational::parse_scalar(text) {
        assert_eq!(Rational::parse_scalar(&q.to_scalar_string()), Ok(q));
    }
    if let Ok(x) = f64::parse_scalar(text) {
        assert!(x.is_finite());
        assert_eq!(f64::parse_scalar(&x.to_scalar_string()), Ok(x));
    }
});
