#![no_main]

use libfuzzer_sys::fuzz_target;
use linefire_core::gridmodel::{generate_ignition_points, ignition_count, parse_grid};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = parse_grid(text) {
        for line in net.lines().iter().take(8) {
            if ignition_count(line, 0.3) <= 10_000 {
                let _ = generate_ignition_points(line, 0.3);
            }
        }
    }
});
