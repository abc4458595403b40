use std::collections::HashSet;

use pearson_triage::coupling::{
    categorize, category_counts, cbo, cbo_histogram, prefix_coupling, profile_groups, single_symptom_coupling,
    Category, Thresholds,
};
use pearson_triage::model::{
    dissimilarity, dissimilarity_matrix, encode_profile, parse_dataset, presence_vector, table1, Dataset, ParseMode,
    PatientRecord, SymptomProfile, SYMPTOM_COUNT, TABLE1_CSV,
};
use proptest::prelude::*;

fn record_strategy() -> impl Strategy<Value = [bool; SYMPTOM_COUNT]> {
    proptest::array::uniform11(any::<bool>())
}

/// Small alphabets of profiles so that datasets contain repeats.
fn dataset_strategy() -> impl Strategy<Value = Dataset> {
    (
        prop::collection::vec(record_strategy(), 1..5),
        prop::collection::vec(0usize..100, 1..30),
    )
        .prop_map(|(profiles, picks)| {
            let records = picks
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let present = profiles[p % profiles.len()];
                    PatientRecord::from_profile(format!("P{}", i + 1), &SymptomProfile { present }).unwrap()
                })
                .collect();
            Dataset::new(records).unwrap()
        })
}

fn group_sets(groups: &[pearson_triage::coupling::CouplingGroup]) -> Vec<HashSet<String>> {
    groups.iter().map(|g| g.member_ids.iter().cloned().collect()).collect()
}

#[test]
fn fixture_metric_axioms_exhaustive() {
    let ds = table1();
    let r = ds.records();
    for a in r {
        assert_eq!(dissimilarity(a, a), 0);
        for b in r {
            let ab = dissimilarity(a, b);
            assert_eq!(ab, dissimilarity(b, a));
            assert!(ab <= SYMPTOM_COUNT as u32);
            assert_eq!(ab == 0, a.profile() == b.profile());
            for c in r {
                assert!(dissimilarity(a, c) <= ab + dissimilarity(b, c));
            }
        }
    }
}

#[test]
fn fixture_zero_distance_iff_same_group() {
    let ds = table1();
    let m = dissimilarity_matrix(&ds).unwrap();
    let groups = group_sets(&profile_groups(&ds).unwrap());
    for (i, a) in m.ids().iter().enumerate() {
        for (j, b) in m.ids().iter().enumerate() {
            let same = groups.iter().any(|g| g.contains(a) && g.contains(b));
            assert_eq!(m.get(i, j) == 0, same, "{a} {b}");
        }
    }
}

#[test]
fn fixture_partition_refinement_for_every_prefix() {
    let ds = table1();
    let full = group_sets(&profile_groups(&ds).unwrap());
    for k in 1..=SYMPTOM_COUNT {
        let coarse = group_sets(&prefix_coupling(&ds, k).unwrap());
        for g in &full {
            assert_eq!(coarse.iter().filter(|c| g.is_subset(c)).count(), 1, "k={k}");
        }
    }
    assert_eq!(group_sets(&prefix_coupling(&ds, SYMPTOM_COUNT).unwrap()), full);
}

#[test]
fn fixture_category_split() {
    let counts = category_counts(&cbo(&table1()).unwrap(), &Thresholds::default()).unwrap();
    assert_eq!(
        counts,
        [
            (Category::Normal, 10),
            (Category::ProCardiac, 6),
            (Category::Cardiac, 4)
        ]
    );
}

#[test]
fn fixture_single_symptom_matches_data() {
    let ds = table1();
    for row in single_symptom_coupling(&ds).unwrap() {
        let expect: Vec<&str> = ds
            .records()
            .iter()
            .filter(|r| r.codes()[row.symptom_index - 1] != 0)
            .map(|r| r.id())
            .collect();
        assert_eq!(row.patient_ids, expect);
        assert_eq!(row.count, expect.len());
    }
}

#[test]
fn parse_is_deterministic() {
    let a = parse_dataset(TABLE1_CSV, ParseMode::Strict).unwrap();
    let b = parse_dataset(TABLE1_CSV, ParseMode::Strict).unwrap();
    assert_eq!(a, b);
    assert_eq!(parse_dataset(&a.to_csv(), ParseMode::Strict).unwrap(), a);
}

proptest! {
    #[test]
    fn encode_presence_round_trip(present in record_strategy()) {
        let p = SymptomProfile { present };
        let r = PatientRecord::from_profile("X", &p).unwrap();
        prop_assert_eq!(encode_profile(&presence_vector(&r)), *r.codes());
        prop_assert_eq!(presence_vector(&r), p);
    }

    #[test]
    fn boolean_mode_reencodes(present in record_strategy()) {
        let cells: Vec<String> = present.iter().map(|&b| u8::from(b).to_string()).collect();
        let line = format!("X,{}", cells.join(","));
        let r = pearson_triage::model::parse_row(&line, 2, ParseMode::Boolean).unwrap();
        prop_assert_eq!(r.profile().present, present);
    }

    #[test]
    fn metric_axioms(a in record_strategy(), b in record_strategy(), c in record_strategy()) {
        let mk = |p| PatientRecord::from_profile("X", &SymptomProfile { present: p }).unwrap();
        let (a, b, c) = (mk(a), mk(b), mk(c));
        prop_assert_eq!(dissimilarity(&a, &b), dissimilarity(&b, &a));
        prop_assert!(dissimilarity(&a, &c) <= dissimilarity(&a, &b) + dissimilarity(&b, &c));
        prop_assert_eq!(dissimilarity(&a, &b) == 0, a.profile() == b.profile());
    }

    #[test]
    fn partition_refinement(ds in dataset_strategy()) {
        let full = group_sets(&profile_groups(&ds).unwrap());
        let total: usize = full.iter().map(HashSet::len).sum();
        prop_assert_eq!(total, ds.len());
        for k in 1..=SYMPTOM_COUNT {
            let coarse = group_sets(&prefix_coupling(&ds, k).unwrap());
            for g in &full {
                prop_assert_eq!(coarse.iter().filter(|c| g.is_subset(c)).count(), 1);
            }
        }
        prop_assert_eq!(group_sets(&prefix_coupling(&ds, SYMPTOM_COUNT).unwrap()), full);
    }

    #[test]
    fn cbo_parity(ds in dataset_strategy()) {
        let t = cbo(&ds).unwrap();
        let groups = profile_groups(&ds).unwrap();
        let pairs: u64 = groups.iter().map(|g| (g.count * (g.count - 1)) as u64).sum();
        prop_assert_eq!(t.total(), pairs);
        prop_assert_eq!(t.total() % 2, 0);
        for e in &t.entries {
            prop_assert_eq!(e.cbo as usize, e.associated_ids.len());
            let unique = ds.records().iter().filter(|r| r.profile() == ds.get(&e.id).unwrap().profile()).count() == 1;
            prop_assert_eq!(e.cbo == 0, unique);
            for q in &e.associated_ids {
                prop_assert!(t.get(q).unwrap().associated_ids.contains(&e.id));
            }
        }
        let hist = cbo_histogram(&t);
        prop_assert_eq!(hist.iter().map(|b| b.patients).sum::<usize>(), ds.len());
    }

    #[test]
    fn categorize_is_monotone(normal_max in 0u32..5, gap in 1u32..5, a in 0u32..12, b in 0u32..12) {
        let t = Thresholds::new(normal_max, normal_max + gap).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(categorize(lo, &t).unwrap() <= categorize(hi, &t).unwrap());
    }
}
