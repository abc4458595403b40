//! Profile clusters with per-cluster Pearson Type I models, and classification
//! of new patients into a cluster whose prior treatment can be reused.
//!
//! Every distinct symptom profile in a dataset is one cluster. A cluster's
//! model is fitted to the pooled nonzero symptom codes of its members; when
//! that sample cannot support a Type I fit the cluster is kept but marked
//! degenerate and takes no part in likelihood comparison.
//!
//! A new patient is placed by, in order:
//! 1. exact profile match with a cluster,
//! 2. highest log-likelihood among fitted clusters (patient has symptoms),
//! 3. the cluster of the nearest patient by Hamming distance.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coupling::{categorize, profile_partition, Category, CouplingError, Thresholds};
use crate::model::{dissimilarity, short_id, Dataset, PatientRecord, SymptomProfile};
use crate::pearson::{
    central_moments, fit_type1, select_type, shape_stats, FamilyType, Moments, PearsonError, PearsonType1Model,
    ShapeStats,
};

/// Fewest pooled codes, and fewest distinct codes, a cluster needs for a fit.
pub const MIN_FIT_SAMPLES: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClusterError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("no clusters to classify against")]
    EmptyClusterSet,
    #[error("patient {0} is not a member of any cluster")]
    UnknownPatient(String),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
}

/// Why a cluster has no fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateReason {
    EmptySample,
    ZeroVariance,
    TooFewSamples,
    TooFewDistinctValues,
    ZeroKappaDenominator,
    NotTypeI,
    ZeroHDenominator,
    InvalidExponents,
    InvalidSupport,
    InvalidNormalization,
}

impl DegenerateReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            DegenerateReason::EmptySample => "empty sample",
            DegenerateReason::ZeroVariance => "zero variance",
            DegenerateReason::TooFewSamples => "too few samples",
            DegenerateReason::TooFewDistinctValues => "too few distinct values",
            DegenerateReason::ZeroKappaDenominator => "zero kappa denominator",
            DegenerateReason::NotTypeI => "not type I",
            DegenerateReason::ZeroHDenominator => "zero h denominator",
            DegenerateReason::InvalidExponents => "invalid exponents",
            DegenerateReason::InvalidSupport => "invalid support",
            DegenerateReason::InvalidNormalization => "invalid normalization",
        }
    }
}

impl fmt::Display for DegenerateReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<&PearsonError> for DegenerateReason {
    fn from(e: &PearsonError) -> Self {
        match e {
            PearsonError::EmptySample | PearsonError::NonFiniteSample => DegenerateReason::EmptySample,
            PearsonError::ZeroVariance => DegenerateReason::ZeroVariance,
            PearsonError::ZeroKappaDenominator | PearsonError::ZeroOdeDenominator => {
                DegenerateReason::ZeroKappaDenominator
            }
            PearsonError::NotTypeI(_) => DegenerateReason::NotTypeI,
            PearsonError::ZeroHDenominator => DegenerateReason::ZeroHDenominator,
            PearsonError::InvalidExponents { .. } => DegenerateReason::InvalidExponents,
            PearsonError::InvalidSupport { .. } => DegenerateReason::InvalidSupport,
            PearsonError::InvalidNormalization | PearsonError::InvalidModel(_) | PearsonError::Quadrature(_) => {
                DegenerateReason::InvalidNormalization
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum FitStatus {
    Fitted,
    Degenerate(DegenerateReason),
}

impl fmt::Display for FitStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitStatus::Fitted => f.write_str("Fitted"),
            FitStatus::Degenerate(r) => write!(f, "Degenerate: {r}"),
        }
    }
}

/// Outcome of fitting one cluster, with whatever diagnostics were reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterFit {
    pub samples: Vec<f64>,
    pub moments: Option<Moments>,
    pub stats: Option<ShapeStats>,
    pub family: Option<FamilyType>,
    pub model: Option<PearsonType1Model>,
    pub status: FitStatus,
}

impl ClusterFit {
    fn degenerate(samples: Vec<f64>, reason: DegenerateReason) -> Self {
        Self {
            samples,
            moments: None,
            stats: None,
            family: None,
            model: None,
            status: FitStatus::Degenerate(reason),
        }
    }
}

/// Pools the nonzero codes of the given members into one sample.
pub fn pooled_codes(member_ids: &[String], ds: &Dataset) -> Result<Vec<f64>, ClusterError> {
    let mut out = Vec::new();
    for id in member_ids {
        let r = ds.get(id).ok_or_else(|| ClusterError::UnknownPatient(id.clone()))?;
        out.extend(r.present_codes().map(f64::from));
    }
    Ok(out)
}

/// Fits a Type I model to a pooled sample. Never fails; a sample that cannot
/// be fitted yields a degenerate status.
pub fn fit_sample(samples: Vec<f64>) -> ClusterFit {
    if samples.is_empty() {
        return ClusterFit::degenerate(samples, DegenerateReason::EmptySample);
    }
    let moments = match central_moments(&samples) {
        Ok(m) => m,
        Err(e) => return ClusterFit::degenerate(samples, (&e).into()),
    };
    let mut fit = ClusterFit {
        samples,
        moments: Some(moments),
        stats: None,
        family: None,
        model: None,
        status: FitStatus::Fitted,
    };
    let distinct: BTreeSet<u64> = fit.samples.iter().map(|x| x.to_bits()).collect();
    let early = if !(moments.mu2 > 0.0) {
        Some(DegenerateReason::ZeroVariance)
    } else if fit.samples.len() < MIN_FIT_SAMPLES {
        Some(DegenerateReason::TooFewSamples)
    } else if distinct.len() < MIN_FIT_SAMPLES {
        Some(DegenerateReason::TooFewDistinctValues)
    } else {
        None
    };
    if let Some(reason) = early {
        fit.status = FitStatus::Degenerate(reason);
        return fit;
    }
    match shape_stats(&moments) {
        Ok(s) => {
            fit.stats = Some(s);
            fit.family = Some(select_type(&s));
        }
        Err(e) => {
            fit.status = FitStatus::Degenerate((&e).into());
            return fit;
        }
    }
    match fit_type1(&moments) {
        Ok(m) => fit.model = Some(m),
        Err(e) => fit.status = FitStatus::Degenerate((&e).into()),
    }
    fit
}

pub fn fit_cluster_model(member_ids: &[String], ds: &Dataset) -> Result<ClusterFit, ClusterError> {
    Ok(fit_sample(pooled_codes(member_ids, ds)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub cluster_id: u32,
    pub member_ids: Vec<String>,
    pub profile: SymptomProfile,
    pub cbo: u32,
    pub category: Category,
    pub model: Option<PearsonType1Model>,
    pub fit_status: FitStatus,
}

impl ClusterModel {
    pub fn is_fitted(&self) -> bool {
        self.model.is_some()
    }
}

/// One cluster per distinct profile, numbered from 1 in order of first
/// appearance in the dataset.
pub fn build_clusters(ds: &Dataset, thresholds: &Thresholds) -> Result<Vec<ClusterModel>, ClusterError> {
    if ds.is_empty() {
        return Err(ClusterError::EmptyDataset);
    }
    thresholds.validate()?;
    profile_partition(ds)
        .into_iter()
        .enumerate()
        .map(|(i, members)| {
            let member_ids: Vec<String> = members.iter().map(|&j| ds.records()[j].id().to_string()).collect();
            let cbo = (member_ids.len() - 1) as u32;
            let fit = fit_cluster_model(&member_ids, ds)?;
            Ok(ClusterModel {
                cluster_id: i as u32 + 1,
                profile: ds.records()[members[0]].profile(),
                category: categorize(cbo, thresholds)?,
                cbo,
                member_ids,
                model: fit.model,
                fit_status: fit.status,
            })
        })
        .collect()
}

/// Sum of `log_pdf` over the record's present codes; 0 for an empty profile.
pub fn likelihood(model: &PearsonType1Model, r: &PatientRecord) -> f64 {
    r.present_codes().map(|c| model.log_pdf(f64::from(c))).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatchPath {
    ExactMatch,
    MaxLikelihood,
    NearestNeighbor,
}

impl fmt::Display for MatchPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchPath::ExactMatch => "ExactMatch",
            MatchPath::MaxLikelihood => "MaxLikelihood",
            MatchPath::NearestNeighbor => "NearestNeighbor",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterLikelihood {
    pub cluster_id: u32,
    pub log_likelihood: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub patient_id: String,
    pub path: MatchPath,
    pub cluster_id: u32,
    pub category: Category,
    pub matched_patient_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_likelihoods: Option<Vec<ClusterLikelihood>>,
    pub recommendation: String,
}

fn recommendation(cluster: &ClusterModel) -> String {
    let ids: Vec<&str> = cluster.member_ids.iter().map(String::as_str).collect();
    format!(
        "reuse prior treatment of patients {} (cluster {}, {})",
        ids.join(", "),
        cluster.cluster_id,
        cluster.category
    )
}

fn result(
    r: &PatientRecord,
    cluster: &ClusterModel,
    path: MatchPath,
    lls: Option<Vec<ClusterLikelihood>>,
) -> ClassificationResult {
    ClassificationResult {
        patient_id: r.id().to_string(),
        path,
        cluster_id: cluster.cluster_id,
        category: cluster.category,
        matched_patient_ids: cluster.member_ids.clone(),
        log_likelihoods: lls,
        recommendation: recommendation(cluster),
    }
}

/// Highest-scoring entry; ties go to the earliest (lowest cluster id).
pub fn argmax_likelihood(scores: &[ClusterLikelihood]) -> Option<ClusterLikelihood> {
    let mut best: Option<ClusterLikelihood> = None;
    for s in scores {
        match best {
            Some(b) if !(s.log_likelihood > b.log_likelihood) => {}
            _ => best = Some(*s),
        }
    }
    best
}

pub fn classify(
    r: &PatientRecord,
    clusters: &[ClusterModel],
    ds: &Dataset,
) -> Result<ClassificationResult, ClusterError> {
    if clusters.is_empty() {
        return Err(ClusterError::EmptyClusterSet);
    }
    let profile = r.profile();
    if let Some(c) = clusters.iter().find(|c| c.profile == profile) {
        return Ok(result(r, c, MatchPath::ExactMatch, None));
    }

    if !profile.is_empty() {
        let mut fitted: Vec<&ClusterModel> = clusters.iter().filter(|c| c.is_fitted()).collect();
        fitted.sort_by_key(|c| c.cluster_id);
        let scores: Vec<ClusterLikelihood> = fitted
            .iter()
            .map(|c| ClusterLikelihood {
                cluster_id: c.cluster_id,
                log_likelihood: likelihood(c.model.as_ref().expect("fitted"), r),
            })
            .collect();
        if let Some(best) = argmax_likelihood(&scores) {
            let c = fitted
                .iter()
                .find(|c| c.cluster_id == best.cluster_id)
                .expect("score came from this list");
            return Ok(result(r, c, MatchPath::MaxLikelihood, Some(scores)));
        }
    }

    // nearest prior patient; ties go to the earliest in dataset order
    let nearest = ds
        .records()
        .iter()
        .min_by_key(|p| dissimilarity(p, r))
        .ok_or(ClusterError::EmptyDataset)?;
    let c = clusters
        .iter()
        .find(|c| c.member_ids.iter().any(|m| m == nearest.id()))
        .ok_or_else(|| ClusterError::UnknownPatient(nearest.id().to_string()))?;
    Ok(result(r, c, MatchPath::NearestNeighbor, None))
}

/// Looks a cluster up by numeric id, or by the id of one of its members
/// (`P4` or `4`).
pub fn find_cluster<'a>(clusters: &'a [ClusterModel], selector: &str) -> Option<&'a ClusterModel> {
    let sel = selector.trim();
    clusters
        .iter()
        .find(|c| c.member_ids.iter().any(|m| m == sel))
        .or_else(|| {
            sel.parse::<u32>()
                .ok()
                .and_then(|id| clusters.iter().find(|c| c.cluster_id == id))
        })
        .or_else(|| {
            clusters
                .iter()
                .find(|c| c.member_ids.iter().any(|m| short_id(m) == sel && m != sel))
        })
}
