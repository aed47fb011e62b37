#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use linefire_core::config::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = Config::parse(text, Path::new(".")) {
        let _ = cfg.canonical_params();
    }
});
