//! Symptom-table analytics for treatment reuse.
//!
//! * [`model`]: patient records, CSV ingestion, Hamming dissimilarity.
//! * [`pearson`]: moment statistics and the Pearson Type I fit.
//! * [`coupling`]: symptom coupling tables, CBO counts and categories.
//! * [`cluster`]: per-profile models and classification of new patients.
//! * [`report`] and [`chart`]: text/JSON/CSV tables and SVG bar charts.

// `!(x > 0.0)` is used deliberately so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chart;
pub mod cluster;
pub mod config;
pub mod coupling;
pub mod model;
pub mod pearson;
pub mod quadrature;
pub mod report;
