#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use linefire_core::engine::{format_row, parse_results, parse_row};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for line in text.lines() {
        if let Ok(d) = parse_row(line) {
            let row = format_row(&d);
            assert_eq!(parse_row(row.trim_end()).expect("reparse"), d);
        }
    }
    if let Ok((_, valid)) = parse_results(text, Path::new("fuzz.csv"), true) {
        assert!(valid <= text.len());
    }
});
