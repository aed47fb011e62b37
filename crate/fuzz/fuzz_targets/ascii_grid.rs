#![no_main]

use libfuzzer_sys::fuzz_target;
use linefire_core::geodata::{parse_ascii_grid, parse_ascii_header, write_ascii_grid};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_ascii_header(text);
    if let Ok(r) = parse_ascii_grid(text) {
        // a parsed raster must survive a write/read round trip
        let again = parse_ascii_grid(&write_ascii_grid(&r)).expect("reparse");
        assert_eq!(again.geometry(), r.geometry());
    }
});
