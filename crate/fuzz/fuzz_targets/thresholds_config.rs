#![no_main]

use libfuzzer_sys::fuzz_target;
use pearson_triage::config::ThresholdConfig;

fuzz_target!(|text: &str| {
    if let Ok(cfg) = ThresholdConfig::parse(text) {
        if let Ok(t) = cfg.resolve(&ThresholdConfig::default()) {
            assert!(t.normal_max < t.cardiac_min);
        }
    }
});
