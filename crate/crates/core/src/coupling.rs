//! Symptom coupling statistics and the CBO reuse metric.
//!
//! Two patients are coupled when their full symptom profiles are identical.
//! A patient's CBO value is the number of other patients it is coupled with,
//! and CBO values map to risk categories through configurable thresholds.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Dataset, SYMPTOM_COUNT};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CouplingError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("prefix length {0} out of range 1..=11")]
    PrefixOutOfRange(usize),
    #[error("thresholds must satisfy normal_max < cardiac_min (got {normal_max} / {cardiac_min})")]
    InvalidThresholds { normal_max: u32, cardiac_min: u32 },
}

/// Patients exhibiting one symptom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymptomCoupling {
    /// 1-based symptom position.
    pub symptom_index: usize,
    pub count: usize,
    pub patient_ids: Vec<String>,
}

/// Patients sharing the same code sub-vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGroup {
    pub key: Vec<u8>,
    pub count: usize,
    pub member_ids: Vec<String>,
}

impl CouplingGroup {
    /// Groups of two or more patients are the ones listed in coupling tables.
    pub fn is_coupled(&self) -> bool {
        self.member_ids.len() >= 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CboEntry {
    pub id: String,
    pub associated_ids: Vec<String>,
    pub cbo: u32,
}

/// Per-patient CBO values in dataset order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CboTable {
    pub entries: Vec<CboEntry>,
}

impl CboTable {
    pub fn get(&self, id: &str) -> Option<&CboEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.cbo as u64).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub cbo: u32,
    pub patients: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Normal,
    ProCardiac,
    Cardiac,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Normal => "Normal",
            Category::ProCardiac => "Pro-Cardiac",
            Category::Cardiac => "Cardiac",
        })
    }
}

/// CBO cut-offs: `cbo <= normal_max` is Normal, `cbo >= cardiac_min` is
/// Cardiac, anything between is Pro-Cardiac.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub normal_max: u32,
    pub cardiac_min: u32,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            normal_max: 0,
            cardiac_min: 3,
        }
    }
}

impl Thresholds {
    pub fn new(normal_max: u32, cardiac_min: u32) -> Result<Self, CouplingError> {
        let t = Self {
            normal_max,
            cardiac_min,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), CouplingError> {
        if self.normal_max < self.cardiac_min {
            Ok(())
        } else {
            Err(CouplingError::InvalidThresholds {
                normal_max: self.normal_max,
                cardiac_min: self.cardiac_min,
            })
        }
    }
}

pub fn categorize(cbo_value: u32, thresholds: &Thresholds) -> Result<Category, CouplingError> {
    thresholds.validate()?;
    Ok(if cbo_value <= thresholds.normal_max {
        Category::Normal
    } else if cbo_value >= thresholds.cardiac_min {
        Category::Cardiac
    } else {
        Category::ProCardiac
    })
}

pub fn single_symptom_coupling(ds: &Dataset) -> Result<Vec<SymptomCoupling>, CouplingError> {
    if ds.is_empty() {
        return Err(CouplingError::EmptyDataset);
    }
    let mut rows: Vec<SymptomCoupling> = (0..SYMPTOM_COUNT)
        .map(|j| {
            let patient_ids: Vec<String> = ds
                .records()
                .iter()
                .filter(|r| r.codes()[j] != 0)
                .map(|r| r.id().to_string())
                .collect();
            SymptomCoupling {
                symptom_index: j + 1,
                count: patient_ids.len(),
                patient_ids,
            }
        })
        .filter(|s| s.count > 0)
        .collect();
    rows.sort_by_key(|s| (s.count, s.symptom_index));
    Ok(rows)
}

/// Partitions record indices by key, keeping first-appearance order.
fn partition_by<K: Eq + Hash, F: Fn(usize) -> K>(n: usize, key: F) -> Vec<Vec<usize>> {
    let mut slot: HashMap<K, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let next = groups.len();
        let g = *slot.entry(key(i)).or_insert(next);
        if g == next {
            groups.push(Vec::new());
        }
        groups[g].push(i);
    }
    groups
}

fn into_groups(ds: &Dataset, mut parts: Vec<Vec<usize>>, width: usize) -> Vec<CouplingGroup> {
    // ascending size, then earliest member
    parts.sort_by_key(|p| (p.len(), p[0]));
    parts
        .into_iter()
        .map(|p| CouplingGroup {
            key: ds.records()[p[0]].codes()[..width].to_vec(),
            count: p.len(),
            member_ids: p.iter().map(|&i| ds.records()[i].id().to_string()).collect(),
        })
        .collect()
}

/// Groups patients whose first `k` code slots agree.
pub fn prefix_coupling(ds: &Dataset, k: usize) -> Result<Vec<CouplingGroup>, CouplingError> {
    if !(1..=SYMPTOM_COUNT).contains(&k) {
        return Err(CouplingError::PrefixOutOfRange(k));
    }
    let recs = ds.records();
    let parts = partition_by(recs.len(), |i| &recs[i].codes()[..k]);
    Ok(into_groups(ds, parts, k))
}

/// Groups patients with identical full profiles, singletons included.
pub fn profile_groups(ds: &Dataset) -> Result<Vec<CouplingGroup>, CouplingError> {
    if ds.is_empty() {
        return Err(CouplingError::EmptyDataset);
    }
    let recs = ds.records();
    let parts = partition_by(recs.len(), |i| recs[i].profile());
    Ok(into_groups(ds, parts, SYMPTOM_COUNT))
}

/// Profile groups in order of first appearance in the dataset.
pub(crate) fn profile_partition(ds: &Dataset) -> Vec<Vec<usize>> {
    let recs = ds.records();
    partition_by(recs.len(), |i| recs[i].profile())
}

pub fn cbo(ds: &Dataset) -> Result<CboTable, CouplingError> {
    if ds.is_empty() {
        return Err(CouplingError::EmptyDataset);
    }
    let recs = ds.records();
    let mut group_of = vec![0usize; recs.len()];
    let parts = profile_partition(ds);
    for (g, members) in parts.iter().enumerate() {
        for &i in members {
            group_of[i] = g;
        }
    }
    let entries = recs
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let associated_ids: Vec<String> = parts[group_of[i]]
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| recs[j].id().to_string())
                .collect();
            CboEntry {
                id: r.id().to_string(),
                cbo: associated_ids.len() as u32,
                associated_ids,
            }
        })
        .collect();
    Ok(CboTable { entries })
}

/// `(cbo value, number of patients)` pairs, highest value first.
pub fn cbo_histogram(t: &CboTable) -> Vec<HistogramBin> {
    let mut counts: Vec<HistogramBin> = Vec::new();
    let mut values: Vec<u32> = t.entries.iter().map(|e| e.cbo).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    for v in values {
        match counts.last_mut() {
            Some(bin) if bin.cbo == v => bin.patients += 1,
            _ => counts.push(HistogramBin { cbo: v, patients: 1 }),
        }
    }
    counts
}

/// Number of patients per category.
pub fn category_counts(t: &CboTable, thresholds: &Thresholds) -> Result<[(Category, usize); 3], CouplingError> {
    let mut out = [(Category::Normal, 0), (Category::ProCardiac, 0), (Category::Cardiac, 0)];
    for e in &t.entries {
        let c = categorize(e.cbo, thresholds)?;
        out[c as usize].1 += 1;
    }
    Ok(out)
}
