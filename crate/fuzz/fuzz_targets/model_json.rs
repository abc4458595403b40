#![no_main]

use libfuzzer_sys::fuzz_target;
use pearson_triage::pearson::PearsonType1Model;

fuzz_target!(|text: &str| {
    if let Ok(m) = PearsonType1Model::from_json(text) {
        let back = PearsonType1Model::from_json(&m.to_json()).expect("own output parses");
        assert_eq!(back, m);
        let (lo, hi) = m.support();
        let _ = m.log_pdf(0.5 * (lo + hi));
    }
});
