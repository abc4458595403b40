//! Patient records, dataset ingestion and the symptom dissimilarity matrix.
//!
//! A patient is an 11-slot code vector. Slot `j` (1-based) holds `0` when the
//! symptom is absent and the code `j` when it is present, so a code carries no
//! magnitude, only column identity. Two patients are compared through their
//! presence vectors with the Hamming distance.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of symptom slots in a record.
pub const SYMPTOM_COUNT: usize = 11;

/// Canonical CSV column names, in normative order.
pub const SYMPTOM_COLUMNS: [&str; SYMPTOM_COUNT] = [
    "bp",
    "hb",
    "pr",
    "ecg",
    "left_shoulder",
    "sweating",
    "vomiting",
    "overweight",
    "chest_pain",
    "breathlessness",
    "obesity",
];

/// Human-readable symptom labels, in the same order as [`SYMPTOM_COLUMNS`].
pub const SYMPTOM_NAMES: [&str; SYMPTOM_COUNT] = [
    "BP",
    "HB",
    "PR",
    "ECG",
    "LeftShoulderPain",
    "Sweating",
    "Vomiting",
    "OverWeight",
    "ChestPain",
    "Breathlessness",
    "Obesity",
];

/// The canonical header line (without trailing newline).
pub fn canonical_header() -> String {
    let mut h = String::from("id");
    for c in SYMPTOM_COLUMNS {
        h.push(',');
        h.push_str(c);
    }
    h
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("missing header row")]
    MissingHeader,
    #[error("header has {found} columns, expected {expected}")]
    HeaderWidth { found: usize, expected: usize },
    #[error("header column {column}: expected `{expected}`, found `{found}`")]
    HeaderName {
        column: usize,
        expected: String,
        found: String,
    },
    #[error("row {row}: expected {expected} fields, found {found}")]
    ColumnCount { row: usize, expected: usize, found: usize },
    #[error("row {row}: empty patient id")]
    EmptyId { row: usize },
    #[error("row {row}: duplicate id {id}")]
    DuplicateId { row: usize, id: String },
    #[error("row {row}, column {column}: `{value}` is not an integer")]
    NotInteger { row: usize, column: usize, value: String },
    #[error("row {row}, column {column}: value {value} not allowed (expected {allowed})")]
    InvalidCode {
        row: usize,
        column: usize,
        value: i64,
        allowed: String,
    },
    #[error("record needs {expected} codes, found {found}")]
    CodeLength { expected: usize, found: usize },
    #[error("dataset is empty")]
    EmptyDataset,
}

/// How symptom cells are interpreted on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Cell at column `j` must be `0` or `j`.
    #[default]
    Strict,
    /// Cells are `0`/`1` checkboxes, re-encoded to `0`/`j`.
    Boolean,
}

/// One patient: an identifier plus the 11-slot code vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PatientRecord {
    id: String,
    codes: [u8; SYMPTOM_COUNT],
}

impl PatientRecord {
    /// Builds a record, checking that slot `j` holds `0` or `j`.
    pub fn new(id: impl Into<String>, codes: [u8; SYMPTOM_COUNT]) -> Result<Self, ModelError> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(ModelError::EmptyId { row: 0 });
        }
        for (i, &c) in codes.iter().enumerate() {
            let j = (i + 1) as u8;
            if c != 0 && c != j {
                return Err(ModelError::InvalidCode {
                    row: 0,
                    column: i + 1,
                    value: c as i64,
                    allowed: format!("0 or {j}"),
                });
            }
        }
        Ok(Self { id, codes })
    }

    pub fn from_profile(id: impl Into<String>, profile: &SymptomProfile) -> Result<Self, ModelError> {
        Self::new(id, encode_profile(profile))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn codes(&self) -> &[u8; SYMPTOM_COUNT] {
        &self.codes
    }

    /// Codes of the symptoms that are present, in slot order.
    pub fn present_codes(&self) -> impl Iterator<Item = u8> + '_ {
        self.codes.iter().copied().filter(|&c| c != 0)
    }

    pub fn profile(&self) -> SymptomProfile {
        presence_vector(self)
    }

    /// Renders the record as one canonical CSV line (no newline).
    pub fn to_csv_line(&self) -> String {
        let mut s = self.id.clone();
        for c in self.codes {
            s.push(',');
            s.push_str(&c.to_string());
        }
        s
    }

    /// Short label used in tables: `P12` becomes `12`, other ids are kept.
    pub fn short_id(&self) -> &str {
        short_id(&self.id)
    }
}

/// Strips a `P`/`p` prefix when the rest is a plain number.
pub fn short_id(id: &str) -> &str {
    match id.strip_prefix(['P', 'p']) {
        Some(rest) if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) => rest,
        _ => id,
    }
}

/// Presence pattern of the 11 symptoms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymptomProfile {
    pub present: [bool; SYMPTOM_COUNT],
}

impl SymptomProfile {
    pub fn count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    /// Profile with the given 1-based symptom positions set.
    pub fn from_positions(positions: &[usize]) -> Self {
        let mut present = [false; SYMPTOM_COUNT];
        for &p in positions {
            if (1..=SYMPTOM_COUNT).contains(&p) {
                present[p - 1] = true;
            }
        }
        Self { present }
    }
}

pub fn presence_vector(r: &PatientRecord) -> SymptomProfile {
    let mut present = [false; SYMPTOM_COUNT];
    for (p, &c) in present.iter_mut().zip(r.codes.iter()) {
        *p = c != 0;
    }
    SymptomProfile { present }
}

pub fn encode_profile(p: &SymptomProfile) -> [u8; SYMPTOM_COUNT] {
    let mut codes = [0u8; SYMPTOM_COUNT];
    for (i, (&present, code)) in p.present.iter().zip(codes.iter_mut()).enumerate() {
        if present {
            *code = (i + 1) as u8;
        }
    }
    codes
}

/// Hamming distance between the presence vectors of two records.
pub fn dissimilarity(a: &PatientRecord, b: &PatientRecord) -> u32 {
    a.codes
        .iter()
        .zip(b.codes.iter())
        .filter(|(x, y)| (**x != 0) != (**y != 0))
        .count() as u32
}

/// Ordered, id-unique collection of patients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    records: Vec<PatientRecord>,
}

impl Dataset {
    /// Builds a dataset, rejecting duplicate ids.
    pub fn new(records: Vec<PatientRecord>) -> Result<Self, ModelError> {
        let mut seen = HashSet::new();
        for (i, r) in records.iter().enumerate() {
            if !seen.insert(r.id.as_str()) {
                return Err(ModelError::DuplicateId {
                    row: i + 2,
                    id: r.id.clone(),
                });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[PatientRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&PatientRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.records.iter().position(|r| r.id == id)
    }

    pub fn symptom_names(&self) -> &'static [&'static str; SYMPTOM_COUNT] {
        &SYMPTOM_NAMES
    }

    /// Canonical CSV rendering: header plus one line per record, `\n` endings.
    pub fn to_csv(&self) -> String {
        let mut out = canonical_header();
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.to_csv_line());
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// Parses a CSV document with a header row and 12 fields per data row.
///
/// Blank lines are skipped. Row numbers in errors are 1-based physical lines,
/// so the first data row is row 2.
pub fn parse_dataset(text: &str, mode: ParseMode) -> Result<Dataset, ModelError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines.next().ok_or(ModelError::MissingHeader)?;
    validate_header(header)?;

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (row, line) in lines {
        let record = parse_row(line, row, mode)?;
        if !seen.insert(record.id.clone()) {
            return Err(ModelError::DuplicateId { row, id: record.id });
        }
        records.push(record);
    }
    Ok(Dataset { records })
}

fn validate_header(header: &str) -> Result<(), ModelError> {
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if fields.len() != SYMPTOM_COUNT + 1 {
        return Err(ModelError::HeaderWidth {
            found: fields.len(),
            expected: SYMPTOM_COUNT + 1,
        });
    }
    let expected = std::iter::once("id").chain(SYMPTOM_COLUMNS);
    for (i, (found, want)) in fields.iter().zip(expected).enumerate() {
        if !found.eq_ignore_ascii_case(want) {
            return Err(ModelError::HeaderName {
                column: i + 1,
                expected: want.to_string(),
                found: found.to_string(),
            });
        }
    }
    Ok(())
}

/// Parses one data line (`id` followed by 11 cells) into a record.
pub fn parse_row(line: &str, row: usize, mode: ParseMode) -> Result<PatientRecord, ModelError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != SYMPTOM_COUNT + 1 {
        return Err(ModelError::ColumnCount {
            row,
            expected: SYMPTOM_COUNT + 1,
            found: fields.len(),
        });
    }
    let id = fields[0];
    if id.is_empty() {
        return Err(ModelError::EmptyId { row });
    }
    let codes = parse_cells(&fields[1..], row, mode)?;
    Ok(PatientRecord {
        id: id.to_string(),
        codes,
    })
}

/// Parses exactly 11 comma-separated symptom cells (no id column).
pub fn parse_codes(line: &str, mode: ParseMode) -> Result<[u8; SYMPTOM_COUNT], ModelError> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != SYMPTOM_COUNT {
        return Err(ModelError::CodeLength {
            expected: SYMPTOM_COUNT,
            found: fields.len(),
        });
    }
    parse_cells(&fields, 1, mode)
}

fn parse_cells(cells: &[&str], row: usize, mode: ParseMode) -> Result<[u8; SYMPTOM_COUNT], ModelError> {
    let mut codes = [0u8; SYMPTOM_COUNT];
    for (i, cell) in cells.iter().enumerate() {
        let column = i + 2;
        let j = (i + 1) as i64;
        let value: i64 = cell.parse().map_err(|_| ModelError::NotInteger {
            row,
            column,
            value: cell.to_string(),
        })?;
        codes[i] = match (mode, value) {
            (_, 0) => 0,
            (ParseMode::Strict, v) if v == j => j as u8,
            (ParseMode::Boolean, 1) => j as u8,
            (mode, value) => {
                let allowed = match mode {
                    ParseMode::Strict => format!("0 or {j}"),
                    ParseMode::Boolean => "0 or 1".to_string(),
                };
                return Err(ModelError::InvalidCode {
                    row,
                    column,
                    value,
                    allowed,
                });
            }
        };
    }
    Ok(codes)
}

/// Symmetric pairwise Hamming distances in dataset order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DissimilarityMatrix {
    ids: Vec<String>,
    entries: Vec<u32>,
}

impl DissimilarityMatrix {
    pub fn size(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.ids.len() + j]
    }

    /// Lookup by patient id.
    pub fn between(&self, a: &str, b: &str) -> Option<u32> {
        let i = self.ids.iter().position(|x| x == a)?;
        let j = self.ids.iter().position(|x| x == b)?;
        Some(self.get(i, j))
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.entries.chunks(self.ids.len().max(1))
    }
}

pub fn dissimilarity_matrix(ds: &Dataset) -> Result<DissimilarityMatrix, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let n = ds.len();
    let mut entries = vec![0u32; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dissimilarity(&ds.records[i], &ds.records[j]);
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    Ok(DissimilarityMatrix {
        ids: ds.records.iter().map(|r| r.id.clone()).collect(),
        entries,
    })
}

/// The 20-patient reference table bundled with the crate.
pub const TABLE1_CSV: &str = include_str!("../data/table1.csv");

pub fn table1() -> Dataset {
    parse_dataset(TABLE1_CSV, ParseMode::Strict).expect("bundled fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(ds: &Dataset, id: &str) -> PatientRecord {
        ds.get(id).unwrap().clone()
    }

    #[test]
    fn fixture_has_twenty_patients() {
        let ds = table1();
        assert_eq!(ds.len(), 20);
        assert_eq!(rec(&ds, "P6").codes(), &[0, 0, 3, 4, 5, 6, 7, 8, 9, 10, 11]);
    }

    #[test]
    fn header_only_is_empty_dataset() {
        let ds = parse_dataset(&format!("{}\n", canonical_header()), ParseMode::Strict).unwrap();
        assert!(ds.is_empty());
    }

    #[test]
    fn single_row_presence() {
        let text = format!("{}\nP1,0,2,0,4,0,6,7,0,0,0,0\n", canonical_header());
        let ds = parse_dataset(&text, ParseMode::Strict).unwrap();
        assert_eq!(ds.records()[0].profile(), SymptomProfile::from_positions(&[2, 4, 6, 7]));
    }

    #[test]
    fn header_is_case_insensitive() {
        let text = "ID,BP,HB,PR,ECG,Left_Shoulder,SWEATING,vomiting,overweight,chest_pain,breathlessness,OBESITY\nA,1,0,0,0,0,0,0,0,0,0,0\n";
        let ds = parse_dataset(text, ParseMode::Strict).unwrap();
        assert_eq!(ds.records()[0].codes()[0], 1);
    }

    #[test]
    fn rejects_bad_input() {
        let h = canonical_header();
        let dup = format!("{h}\nP1,0,0,0,0,0,0,0,0,0,0,0\nP1,0,0,0,0,0,0,0,0,0,0,0\n");
        assert_eq!(
            parse_dataset(&dup, ParseMode::Strict),
            Err(ModelError::DuplicateId {
                row: 3,
                id: "P1".into()
            })
        );
        let short = format!("{h}\nP1,0,0\n");
        assert!(matches!(
            parse_dataset(&short, ParseMode::Strict),
            Err(ModelError::ColumnCount { row: 2, found: 3, .. })
        ));
        let wrong_code = format!("{h}\nP1,0,3,0,0,0,0,0,0,0,0,0\n");
        assert!(matches!(
            parse_dataset(&wrong_code, ParseMode::Strict),
            Err(ModelError::InvalidCode {
                column: 3,
                value: 3,
                ..
            })
        ));
        let not_int = format!("{h}\nP1,0,x,0,0,0,0,0,0,0,0,0\n");
        assert!(matches!(
            parse_dataset(&not_int, ParseMode::Strict),
            Err(ModelError::NotInteger { .. })
        ));
        let bad_header =
            "id,hb,bp,pr,ecg,left_shoulder,sweating,vomiting,overweight,chest_pain,breathlessness,obesity\n";
        assert!(matches!(
            parse_dataset(bad_header, ParseMode::Strict),
            Err(ModelError::HeaderName { column: 2, .. })
        ));
        assert_eq!(parse_dataset("", ParseMode::Strict), Err(ModelError::MissingHeader));
    }

    #[test]
    fn boolean_mode_reencodes() {
        let text = format!("{}\nQ,0,1,0,1,0,1,1,0,0,0,0\n", canonical_header());
        let ds = parse_dataset(&text, ParseMode::Boolean).unwrap();
        assert_eq!(ds.records()[0].codes(), &[0, 2, 0, 4, 0, 6, 7, 0, 0, 0, 0]);
        // strict-encoded cells are not checkboxes
        let text = format!("{}\nQ,0,2,0,0,0,0,0,0,0,0,0\n", canonical_header());
        assert!(parse_dataset(&text, ParseMode::Boolean).is_err());
        // column 1 accepts 1 in both modes
        let text = format!("{}\nQ,1,0,0,0,0,0,0,0,0,0,0\n", canonical_header());
        assert_eq!(
            parse_dataset(&text, ParseMode::Strict).unwrap(),
            parse_dataset(&text, ParseMode::Boolean).unwrap()
        );
    }

    #[test]
    fn presence_examples() {
        let ds = table1();
        assert!(rec(&ds, "P4").profile().is_empty());
        let p6 = rec(&ds, "P6").profile();
        assert!(!p6.present[0] && !p6.present[1]);
        assert!(p6.present[2..].iter().all(|&p| p));
        let full = PatientRecord::new("F", [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]).unwrap();
        assert!(full.profile().present.iter().all(|&p| p));
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_profile(&SymptomProfile::default()), [0; 11]);
        assert_eq!(
            encode_profile(&SymptomProfile::from_positions(&[2, 4, 6, 7])),
            [0, 2, 0, 4, 0, 6, 7, 0, 0, 0, 0]
        );
        assert_eq!(
            encode_profile(&SymptomProfile::from_positions(&[11])),
            [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 11]
        );
    }

    #[test]
    fn dissimilarity_examples() {
        let ds = table1();
        let p1 = rec(&ds, "P1");
        assert_eq!(dissimilarity(&p1, &rec(&ds, "P5")), 0);
        assert_eq!(dissimilarity(&p1, &p1), 0);
        assert_eq!(dissimilarity(&p1, &rec(&ds, "P2")), 2);
    }

    #[test]
    fn matrix_examples() {
        let ds = table1();
        let m = dissimilarity_matrix(&ds).unwrap();
        assert_eq!(m.between("P1", "P16"), Some(0));
        assert_eq!(m.between("P1", "P6"), Some(7));
        for i in 0..m.size() {
            for j in 0..m.size() {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        let one = Dataset::new(vec![rec(&ds, "P3")]).unwrap();
        let m1 = dissimilarity_matrix(&one).unwrap();
        assert_eq!(m1.size(), 1);
        assert_eq!(m1.get(0, 0), 0);
        assert_eq!(dissimilarity_matrix(&Dataset::default()), Err(ModelError::EmptyDataset));
    }

    #[test]
    fn record_constructor_validates() {
        assert!(PatientRecord::new("X", [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0]).is_err());
        assert!(PatientRecord::new(" ", [0; 11]).is_err());
        assert!(Dataset::new(vec![
            PatientRecord::new("X", [0; 11]).unwrap(),
            PatientRecord::new("X", [0; 11]).unwrap()
        ])
        .is_err());
    }

    #[test]
    fn short_ids() {
        assert_eq!(short_id("P12"), "12");
        assert_eq!(short_id("p3"), "3");
        assert_eq!(short_id("Patient"), "Patient");
        assert_eq!(short_id("P"), "P");
    }
}
