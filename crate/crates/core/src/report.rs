//! Rendering of coupling, CBO, cluster, classification and fit reports as
//! aligned text tables, JSON or CSV. Text output is byte-stable for a given
//! input, so it is used for golden-file comparison.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::cluster::{ClassificationResult, ClusterFit, ClusterModel};
use crate::coupling::{
    cbo, cbo_histogram, prefix_coupling, profile_groups, single_symptom_coupling, CboTable, CouplingError,
    CouplingGroup, HistogramBin, SymptomCoupling,
};
use crate::model::{dissimilarity_matrix, short_id, Dataset, ModelError, SYMPTOM_NAMES};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("unknown report kind `{0}`")]
    UnknownKind(String),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
    #[error("format {format} is not available for {what}")]
    Unsupported { format: Format, what: &'static str },
    #[error("prefix report needs a prefix length")]
    MissingPrefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    SingleSymptom,
    PrefixCoupling,
    ProfileGroups,
    Cbo,
    CboHistogram,
    Dissimilarity,
}

impl FromStr for ReportKind {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "single" | "single-symptom" => ReportKind::SingleSymptom,
            "prefix" => ReportKind::PrefixCoupling,
            "profile-groups" | "groups" => ReportKind::ProfileGroups,
            "cbo" => ReportKind::Cbo,
            "cbo-histogram" | "histogram" => ReportKind::CboHistogram,
            "dissimilarity" | "matrix" => ReportKind::Dissimilarity,
            other => return Err(ReportError::UnknownKind(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
    Svg,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        })
    }
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "text" => Format::Text,
            "json" => Format::Json,
            "csv" => Format::Csv,
            "svg" => Format::Svg,
            other => return Err(ReportError::UnknownFormat(other.to_string())),
        })
    }
}

/// Aligned plain-text table; columns separated by at least two spaces and
/// no trailing whitespace.
pub struct TextTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TextTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    pub fn render(&self) -> String {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let mut s = String::new();
            for (i, cell) in line.iter().enumerate().take(cols) {
                s.push_str(cell);
                if i + 1 < cols {
                    let pad = widths[i] - cell.chars().count() + 2;
                    s.extend(std::iter::repeat_n(' ', pad));
                }
            }
            out.push_str(s.trim_end());
            out.push('\n');
        }
        out
    }
}

fn join_short(ids: &[String]) -> String {
    ids.iter().map(|i| short_id(i)).collect::<Vec<_>>().join(",")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

pub fn render_single(rows: &[SymptomCoupling], format: Format) -> Result<String, ReportError> {
    match format {
        Format::Text => {
            let mut t = TextTable::new(["Sl. No.", "Symptom", "Count", "Patient IDs"]);
            for (i, r) in rows.iter().enumerate() {
                t.row([
                    format!("{}.", i + 1),
                    r.symptom_index.to_string(),
                    r.count.to_string(),
                    join_short(&r.patient_ids),
                ]);
            }
            Ok(t.render())
        }
        Format::Json => Ok(to_json(rows)),
        Format::Csv => {
            let mut s = String::from("symptom_index,symptom,count,patient_ids\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.symptom_index,
                    SYMPTOM_NAMES[r.symptom_index - 1],
                    r.count,
                    r.patient_ids.join(";")
                );
            }
            Ok(s)
        }
        Format::Svg => Err(ReportError::Unsupported { format, what: "tables" }),
    }
}

fn group_table(groups: &[&CouplingGroup]) -> TextTable {
    let mut t = TextTable::new(["Sl. No.", "Count", "Patient IDs"]);
    for (i, g) in groups.iter().enumerate() {
        t.row([format!("{}.", i + 1), g.count.to_string(), join_short(&g.member_ids)]);
    }
    t
}

fn groups_csv(groups: &[CouplingGroup]) -> String {
    let mut s = String::from("group,count,member_ids,key\n");
    for (i, g) in groups.iter().enumerate() {
        let key: Vec<String> = g.key.iter().map(u8::to_string).collect();
        let _ = writeln!(s, "{},{},{},{}", i + 1, g.count, g.member_ids.join(";"), key.join(";"));
    }
    s
}

pub fn render_prefix(groups: &[CouplingGroup], format: Format) -> Result<String, ReportError> {
    match format {
        Format::Text => Ok(group_table(&groups.iter().collect::<Vec<_>>()).render()),
        Format::Json => Ok(to_json(groups)),
        Format::Csv => Ok(groups_csv(groups)),
        Format::Svg => Err(ReportError::Unsupported { format, what: "tables" }),
    }
}

/// Text lists the coupled groups (two or more members), then the singletons.
pub fn render_profile_groups(groups: &[CouplingGroup], format: Format) -> Result<String, ReportError> {
    match format {
        Format::Text => {
            let coupled: Vec<&CouplingGroup> = groups.iter().filter(|g| g.is_coupled()).collect();
            let mut out = group_table(&coupled).render();
            let singles: Vec<String> = groups
                .iter()
                .filter(|g| !g.is_coupled())
                .flat_map(|g| g.member_ids.iter().cloned())
                .collect();
            let _ = writeln!(
                out,
                "Singletons: {}",
                if singles.is_empty() {
                    "NONE".to_string()
                } else {
                    join_short(&singles)
                }
            );
            Ok(out)
        }
        Format::Json => Ok(to_json(groups)),
        Format::Csv => Ok(groups_csv(groups)),
        Format::Svg => Err(ReportError::Unsupported { format, what: "tables" }),
    }
}

/// Coupled patients one per row, then the uncoupled ones folded into a
/// single `NONE` row whose count column holds the number of such patients.
pub fn render_cbo(table: &CboTable, format: Format) -> Result<String, ReportError> {
    match format {
        Format::Text => {
            let mut t = TextTable::new(["Patient ID", "Associated with", "Coupling Count"]);
            let mut none = Vec::new();
            for e in &table.entries {
                if e.cbo == 0 {
                    none.push(e.id.clone());
                } else {
                    t.row([
                        short_id(&e.id).to_string(),
                        join_short(&e.associated_ids),
                        e.cbo.to_string(),
                    ]);
                }
            }
            if !none.is_empty() {
                t.row([join_short(&none), "NONE".to_string(), none.len().to_string()]);
            }
            Ok(t.render())
        }
        Format::Json => Ok(to_json(&table.entries)),
        Format::Csv => {
            let mut s = String::from("id,cbo,associated_ids\n");
            for e in &table.entries {
                let _ = writeln!(s, "{},{},{}", csv_field(&e.id), e.cbo, e.associated_ids.join(";"));
            }
            Ok(s)
        }
        Format::Svg => Err(ReportError::Unsupported { format, what: "tables" }),
    }
}

pub fn render_histogram(bins: &[HistogramBin], format: Format) -> Result<String, ReportError> {
    match format {
        Format::Text => {
            let mut t = TextTable::new(["No. of Patients", "CBO Metric Value"]);
            for b in bins {
                t.row([b.patients.to_string(), b.cbo.to_string()]);
            }
            Ok(t.render())
        }
        Format::Json => Ok(to_json(bins)),
        Format::Csv => {
            let mut s = String::from("cbo,patients\n");
            for b in bins {
                let _ = writeln!(s, "{},{}", b.cbo, b.patients);
            }
            Ok(s)
        }
        Format::Svg => Ok(crate::chart::cbo_histogram_chart(bins)),
    }
}

pub fn render_dissimilarity(ds: &Dataset, format: Format) -> Result<String, ReportError> {
    let m = dissimilarity_matrix(ds)?;
    match format {
        Format::Text => {
            let mut t =
                TextTable::new(std::iter::once(String::new()).chain(m.ids().iter().map(|i| short_id(i).to_string())));
            for (id, row) in m.ids().iter().zip(m.rows()) {
                t.row(std::iter::once(short_id(id).to_string()).chain(row.iter().map(u32::to_string)));
            }
            Ok(t.render())
        }
        Format::Json => Ok(to_json(&m)),
        Format::Csv => {
            let mut s = String::from("id");
            for id in m.ids() {
                s.push(',');
                s.push_str(&csv_field(id));
            }
            s.push('\n');
            for (id, row) in m.ids().iter().zip(m.rows()) {
                s.push_str(&csv_field(id));
                for v in row {
                    let _ = write!(s, ",{v}");
                }
                s.push('\n');
            }
            Ok(s)
        }
        Format::Svg => Err(ReportError::Unsupported {
            format,
            what: "the dissimilarity matrix",
        }),
    }
}

/// Renders a dataset-level report.
pub fn render(ds: &Dataset, kind: ReportKind, k: Option<usize>, format: Format) -> Result<String, ReportError> {
    match kind {
        ReportKind::SingleSymptom => render_single(&single_symptom_coupling(ds)?, format),
        ReportKind::PrefixCoupling => {
            render_prefix(&prefix_coupling(ds, k.ok_or(ReportError::MissingPrefix)?)?, format)
        }
        ReportKind::ProfileGroups => render_profile_groups(&profile_groups(ds)?, format),
        ReportKind::Cbo => render_cbo(&cbo(ds)?, format),
        ReportKind::CboHistogram => render_histogram(&cbo_histogram(&cbo(ds)?), format),
        ReportKind::Dissimilarity => render_dissimilarity(ds, format),
    }
}

pub fn render_clusters(clusters: &[ClusterModel], format: Format) -> Result<String, ReportError> {
    match format {
        Format::Text => {
            let mut t = TextTable::new(["Cluster", "Patient IDs", "CBO", "Category", "Fit"]);
            for c in clusters {
                t.row([
                    c.cluster_id.to_string(),
                    join_short(&c.member_ids),
                    c.cbo.to_string(),
                    c.category.to_string(),
                    c.fit_status.to_string(),
                ]);
            }
            Ok(t.render())
        }
        Format::Json => Ok(to_json(clusters)),
        Format::Csv => {
            let mut s = String::from("cluster_id,member_ids,cbo,category,fit_status\n");
            for c in clusters {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    c.cluster_id,
                    c.member_ids.join(";"),
                    c.cbo,
                    c.category,
                    csv_field(&c.fit_status.to_string())
                );
            }
            Ok(s)
        }
        Format::Svg => Err(ReportError::Unsupported {
            format,
            what: "cluster listings",
        }),
    }
}

pub fn render_classification(r: &ClassificationResult, format: Format) -> Result<String, ReportError> {
    match format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "Category: {}", r.category);
            let _ = writeln!(s, "Patient: {}", r.patient_id);
            let _ = writeln!(s, "Path: {}", r.path);
            let _ = writeln!(s, "Cluster: {}", r.cluster_id);
            let _ = writeln!(s, "Matched patients: {}", r.matched_patient_ids.join(", "));
            if let Some(lls) = &r.log_likelihoods {
                s.push_str("Log-likelihoods:\n");
                for l in lls {
                    let _ = writeln!(s, "  cluster {}: {}", l.cluster_id, num(l.log_likelihood));
                }
            }
            let _ = writeln!(s, "Recommendation: {}", r.recommendation);
            Ok(s)
        }
        Format::Json => Ok(to_json(r)),
        Format::Csv | Format::Svg => Err(ReportError::Unsupported {
            format,
            what: "classification results",
        }),
    }
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Moment, shape and fit diagnostics for one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub label: String,
    pub sample_size: usize,
    pub moments: Option<crate::pearson::Moments>,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub kappa: Option<f64>,
    pub family: Option<crate::pearson::FamilyType>,
    pub status: crate::cluster::FitStatus,
    pub model: Option<crate::pearson::PearsonType1Model>,
    pub support: Option<(f64, f64)>,
    pub normalization: Option<f64>,
}

impl Diagnostics {
    pub fn from_fit(label: impl Into<String>, fit: &ClusterFit) -> Self {
        Self {
            label: label.into(),
            sample_size: fit.samples.len(),
            moments: fit.moments,
            skewness: fit.stats.map(|s| s.skewness),
            kurtosis: fit.stats.map(|s| s.kurtosis),
            kappa: fit.stats.map(|s| s.kappa),
            family: fit.family,
            status: fit.status,
            model: fit.model,
            support: fit.model.map(|m| m.support()),
            normalization: fit.model.and_then(|m| m.normalization().ok()),
        }
    }
}

pub fn render_diagnostics(d: &Diagnostics, format: Format) -> Result<String, ReportError> {
    match format {
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{}", d.label);
            let _ = writeln!(s, "Samples: {}", d.sample_size);
            if let Some(m) = d.moments {
                let _ = writeln!(
                    s,
                    "Moments: mu1={} mu2={} mu3={} mu4={}",
                    num(m.mu1),
                    num(m.mu2),
                    num(m.mu3),
                    num(m.mu4)
                );
            }
            if let (Some(sk), Some(ku), Some(k)) = (d.skewness, d.kurtosis, d.kappa) {
                let _ = writeln!(s, "Skewness: {}", num(sk));
                let _ = writeln!(s, "Kurtosis: {}", num(ku));
                let _ = writeln!(s, "Kappa: {}", num(k));
            }
            if let Some(f) = d.family {
                let _ = writeln!(s, "Family: {f}");
            }
            let _ = writeln!(s, "Status: {}", d.status);
            if let Some(m) = d.model {
                let _ = writeln!(s, "m0: {}", num(m.m0));
                let _ = writeln!(s, "c1: {}", num(m.c1));
                let _ = writeln!(s, "c2: {}", num(m.c2));
                let _ = writeln!(s, "g1: {}", num(m.g1));
                let _ = writeln!(s, "g2: {}", num(m.g2));
                let _ = writeln!(s, "h: {}", num(m.h));
                let _ = writeln!(s, "A0: {}", num(m.a0));
                let (lo, hi) = m.support();
                let _ = writeln!(s, "Support: ({}, {})", num(lo), num(hi));
            }
            if let Some(n) = d.normalization {
                let _ = writeln!(s, "Normalization: {}", num(n));
            }
            Ok(s)
        }
        Format::Json => Ok(to_json(d)),
        Format::Csv | Format::Svg => Err(ReportError::Unsupported {
            format,
            what: "fit diagnostics",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{table1, PatientRecord};

    #[test]
    fn text_table_alignment() {
        let mut t = TextTable::new(["a", "bb", "c"]);
        t.row(["xxx", "y", ""]);
        assert_eq!(t.render(), "a    bb  c\nxxx  y\n");
    }

    #[test]
    fn histogram_text() {
        let out = render(&table1(), ReportKind::CboHistogram, None, Format::Text).unwrap();
        assert_eq!(
            out,
            "No. of Patients  CBO Metric Value\n4                3\n6                2\n10               0\n"
        );
    }

    #[test]
    fn single_json_has_ten_rows() {
        let out = render(&table1(), ReportKind::SingleSymptom, None, Format::Json).unwrap();
        let v: Vec<SymptomCoupling> = serde_json::from_str(&out).unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v, single_symptom_coupling(&table1()).unwrap());
    }

    #[test]
    fn one_patient_profile_groups() {
        let ds = Dataset::new(vec![PatientRecord::new("P1", [0; 11]).unwrap()]).unwrap();
        let out = render(&ds, ReportKind::ProfileGroups, None, Format::Text).unwrap();
        assert_eq!(out, "Sl. No.  Count  Patient IDs\nSingletons: 1\n");
        let json = render(&ds, ReportKind::ProfileGroups, None, Format::Json).unwrap();
        let groups: Vec<CouplingGroup> = serde_json::from_str(&json).unwrap();
        assert_eq!(groups.len(), 1);
    }

    #[test]
    fn kinds_and_formats_parse() {
        assert_eq!("prefix".parse::<ReportKind>().unwrap(), ReportKind::PrefixCoupling);
        assert!("bogus".parse::<ReportKind>().is_err());
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!(render(&table1(), ReportKind::PrefixCoupling, None, Format::Text).is_err());
        assert!(render(&table1(), ReportKind::Cbo, None, Format::Svg).is_err());
    }

    #[test]
    fn number_formatting() {
        assert_eq!(num(4.75), "4.75");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.1102230246251565e-16), "1.1102230246251565e-16");
    }

    #[test]
    fn csv_quotes_when_needed() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
