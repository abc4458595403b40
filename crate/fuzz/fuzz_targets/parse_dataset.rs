#![no_main]

use libfuzzer_sys::fuzz_target;
use pearson_triage::model::{parse_dataset, ParseMode};

// First byte picks the mode; the rest is the CSV text.
fuzz_target!(|data: &[u8]| {
    let Some((&mode, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let mode = if mode & 1 == 0 {
        ParseMode::Strict
    } else {
        ParseMode::Boolean
    };
    if let Ok(ds) = parse_dataset(text, mode) {
        // accepted input re-serializes to canonical strict CSV
        let again = parse_dataset(&ds.to_csv(), ParseMode::Strict).expect("canonical CSV parses");
        assert_eq!(again, ds);
    }
});
