#![no_main]

use libfuzzer_sys::fuzz_target;
use pearson_triage::model::{encode_profile, parse_codes, parse_row, ParseMode};

fuzz_target!(|text: &str| {
    for mode in [ParseMode::Strict, ParseMode::Boolean] {
        if let Ok(r) = parse_row(text, 2, mode) {
            assert_eq!(&encode_profile(&r.profile()), r.codes());
        }
        let _ = parse_codes(text, mode);
    }
});
