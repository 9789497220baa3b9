#![no_main]

use acs6::degree::MapFamily;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(map) = text.parse::<MapFamily>() {
        assert_eq!(map.to_string().parse::<MapFamily>(), Ok(map.clone()));
        let _ = map.expected_degree();
    }
});
