#![no_main]

use libfuzzer_sys::fuzz_target;
use linefire_core::report::{format_matrix_csv, parse_matrix_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix_csv(text, 1) {
        let again = parse_matrix_csv(&format_matrix_csv(&m), 1).expect("reparse");
        assert_eq!(again, m);
    }
});
