#![no_main]

use acs6::homotopy::{GroupExpr, Pi7Table};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = Pi7Table::from_reader(data) {
        for m in 1..64 {
            let g = GroupExpr::pi(m).resolve(&table);
            assert_eq!(g.is_symbolic(), table.source(m).is_none());
        }
    }
});
