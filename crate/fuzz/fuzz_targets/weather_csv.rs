#![no_main]

use libfuzzer_sys::fuzz_target;
use linefire_core::weather::{burn_conditions, parse_weather_csv, partition_seasons};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(stream) = parse_weather_csv(text, "fuzz") {
        if let Ok(seasons) = partition_seasons(&stream, 2022) {
            for s in &seasons {
                let _ = burn_conditions(s, 3);
            }
        }
    }
});
