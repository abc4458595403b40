//! `pearson-triage`: ingest patient symptom tables, reproduce coupling and
//! CBO reports, fit Pearson Type I diagnostics, classify new patients and
//! draw charts.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O error.

mod error;
mod registry;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pearson_triage::chart::{cbo_histogram_chart, symptom_count_chart};
use pearson_triage::cluster::{build_clusters, classify, find_cluster, fit_cluster_model, ClusterFit};
use pearson_triage::config::ThresholdConfig;
use pearson_triage::coupling::{cbo, cbo_histogram, single_symptom_coupling, Thresholds};
use pearson_triage::model::{parse_codes, parse_dataset, parse_row, ParseMode, PatientRecord};
use pearson_triage::pearson::{fit_type1, select_type, shape_stats, Moments};
use pearson_triage::report::{
    render, render_classification, render_clusters, render_diagnostics, Diagnostics, Format, ReportKind,
};

use crate::error::CliError;
use crate::registry::{write_atomic, Registry};

#[derive(Parser)]
#[command(
    name = "pearson-triage",
    version,
    about = "Symptom coupling, CBO metrics and Pearson Type I reuse clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RegistryArg {
    /// Registry CSV file
    #[arg(long, env = "PEARSON_TRIAGE_REGISTRY")]
    registry: PathBuf,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Largest CBO value still categorised as Normal [default: 0]
    #[arg(long)]
    normal_max: Option<u32>,
    /// Smallest CBO value categorised as Cardiac [default: 3]
    #[arg(long)]
    cardiac_min: Option<u32>,
    /// TOML file with `normal_max` / `cardiac_min`; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ThresholdArgs {
    fn resolve(&self) -> Result<Thresholds, CliError> {
        let file = match &self.config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                ThresholdConfig::parse(&text).map_err(CliError::data)?
            }
            None => ThresholdConfig::default(),
        };
        let flags = ThresholdConfig {
            normal_max: self.normal_max,
            cardiac_min: self.cardiac_min,
        };
        file.resolve(&flags).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
    Svg,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Svg => Format::Svg,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Single,
    Prefix,
    ProfileGroups,
    Cbo,
    CboHistogram,
    Clusters,
    Dissimilarity,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChartArg {
    SymptomCounts,
    CboHistogram,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a CSV file and append its rows to the registry
    Ingest {
        /// CSV file to read
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        registry: RegistryArg,
        /// Cells are 0/1 checkboxes rather than 0/j codes
        #[arg(long)]
        boolean: bool,
    },
    /// Print a coupling, CBO or cluster report
    Report {
        #[command(flatten)]
        registry: RegistryArg,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Prefix length for `--kind prefix` (1..=11)
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Place a new patient into a cluster of the registry
    Classify {
        #[command(flatten)]
        registry: RegistryArg,
        /// Eleven comma-separated symptom cells
        #[arg(long, conflicts_with = "row", required_unless_present = "row")]
        codes: Option<String>,
        /// A full CSV data row: id followed by eleven cells
        #[arg(long)]
        row: Option<String>,
        /// Identifier for a patient given with --codes
        #[arg(long, default_value = "NEW")]
        id: String,
        /// Cells are 0/1 checkboxes rather than 0/j codes
        #[arg(long)]
        boolean: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Show moment, shape and Type I fit diagnostics
    Fit {
        /// Registry CSV file (not needed with --moments)
        #[arg(long, env = "PEARSON_TRIAGE_REGISTRY")]
        registry: Option<PathBuf>,
        /// Cluster id, or the id of any member patient
        #[arg(long, required_unless_present = "moments", conflicts_with = "moments")]
        cluster: Option<String>,
        /// Fit directly from mu1,mu2,mu3,mu4
        #[arg(long)]
        moments: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Write an SVG bar chart
    Chart {
        #[command(flatten)]
        registry: RegistryArg,
        #[arg(long, value_enum)]
        which: ChartArg,
        /// Output SVG file
        #[arg(long)]
        output: PathBuf,
    },
}

fn mode(boolean: bool) -> ParseMode {
    if boolean {
        ParseMode::Boolean
    } else {
        ParseMode::Strict
    }
}

fn cmd_ingest(input: &Path, registry: &Path, boolean: bool) -> Result<String, CliError> {
    let text = fs::read_to_string(input).map_err(|e| CliError::io(input, e))?;
    let incoming =
        parse_dataset(&text, mode(boolean)).map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
    let mut reg = Registry::open_or_empty(registry)?;
    let n = reg.append(&incoming)?;
    Ok(format!("{n}\n"))
}

fn cmd_report(
    registry: &Path,
    kind: KindArg,
    k: Option<usize>,
    format: Format,
    thresholds: &ThresholdArgs,
) -> Result<String, CliError> {
    if kind == KindArg::Prefix && k.is_none() {
        return Err(CliError::Usage("--kind prefix requires --k".into()));
    }
    if let Some(k) = k {
        if !(1..=11).contains(&k) {
            return Err(CliError::Usage(format!("--k {k} out of range 1..=11")));
        }
    }
    let thresholds = thresholds.resolve()?;
    let reg = Registry::load(registry)?;
    let ds = reg.nonempty()?;
    let kind = match kind {
        KindArg::Clusters => {
            let clusters = build_clusters(ds, &thresholds).map_err(CliError::data)?;
            return render_clusters(&clusters, format).map_err(|e| CliError::Usage(e.to_string()));
        }
        KindArg::Single => ReportKind::SingleSymptom,
        KindArg::Prefix => ReportKind::PrefixCoupling,
        KindArg::ProfileGroups => ReportKind::ProfileGroups,
        KindArg::Cbo => ReportKind::Cbo,
        KindArg::CboHistogram => ReportKind::CboHistogram,
        KindArg::Dissimilarity => ReportKind::Dissimilarity,
    };
    render(ds, kind, k, format).map_err(|e| match e {
        pearson_triage::report::ReportError::Unsupported { .. } => CliError::Usage(e.to_string()),
        other => CliError::data(other),
    })
}

fn new_record(codes: Option<&str>, row: Option<&str>, id: &str, boolean: bool) -> Result<PatientRecord, CliError> {
    let bad = |e: pearson_triage::model::ModelError| CliError::Data(format!("malformed record: {e}"));
    match (codes, row) {
        (_, Some(row)) => parse_row(row, 1, mode(boolean)).map_err(bad),
        (Some(codes), None) => {
            let codes = parse_codes(codes, mode(boolean)).map_err(bad)?;
            PatientRecord::new(id, codes).map_err(bad)
        }
        (None, None) => Err(CliError::Usage("one of --codes or --row is required".into())),
    }
}

fn cmd_classify(
    registry: &Path,
    record: PatientRecord,
    thresholds: &ThresholdArgs,
    format: Format,
) -> Result<String, CliError> {
    let thresholds = thresholds.resolve()?;
    let reg = Registry::load(registry)?;
    let ds = reg.nonempty()?;
    let clusters = build_clusters(ds, &thresholds).map_err(CliError::data)?;
    let result = classify(&record, &clusters, ds).map_err(CliError::data)?;
    render_classification(&result, format).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_moments(s: &str) -> Result<Moments, CliError> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--moments: {e}")))?;
    match vals[..] {
        [mu1, mu2, mu3, mu4] => Ok(Moments::exact(mu1, mu2, mu3, mu4)),
        _ => Err(CliError::Usage(format!("--moments needs 4 values, got {}", vals.len()))),
    }
}

fn moments_fit(m: Moments) -> ClusterFit {
    let stats = shape_stats(&m).ok();
    let (model, status) = match fit_type1(&m) {
        Ok(model) => (Some(model), pearson_triage::cluster::FitStatus::Fitted),
        Err(e) => (None, pearson_triage::cluster::FitStatus::Degenerate((&e).into())),
    };
    ClusterFit {
        samples: Vec::new(),
        moments: Some(m),
        stats,
        family: stats.as_ref().map(select_type),
        model,
        status,
    }
}

fn cmd_fit(
    registry: Option<&Path>,
    cluster: Option<&str>,
    moments: Option<&str>,
    format: Format,
) -> Result<String, CliError> {
    let diagnostics = if let Some(m) = moments {
        Diagnostics::from_fit(format!("Moments {m}"), &moments_fit(parse_moments(m)?))
    } else {
        let selector = cluster.ok_or_else(|| CliError::Usage("--cluster or --moments is required".into()))?;
        let registry = registry.ok_or_else(|| CliError::Usage("--registry is required".into()))?;
        let reg = Registry::load(registry)?;
        let ds = reg.nonempty()?;
        let clusters = build_clusters(ds, &Thresholds::default()).map_err(CliError::data)?;
        let c =
            find_cluster(&clusters, selector).ok_or_else(|| CliError::Data(format!("unknown cluster `{selector}`")))?;
        let fit = fit_cluster_model(&c.member_ids, ds).map_err(CliError::data)?;
        Diagnostics::from_fit(format!("Cluster {} ({})", c.cluster_id, c.member_ids.join(", ")), &fit)
    };
    render_diagnostics(&diagnostics, format).map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_chart(registry: &Path, which: ChartArg, output: &Path) -> Result<String, CliError> {
    let reg = Registry::load(registry)?;
    let ds = reg.nonempty()?;
    let svg = match which {
        ChartArg::SymptomCounts => symptom_count_chart(&single_symptom_coupling(ds).map_err(CliError::data)?),
        ChartArg::CboHistogram => cbo_histogram_chart(&cbo_histogram(&cbo(ds).map_err(CliError::data)?)),
    };
    write_atomic(output, svg.as_bytes())?;
    Ok(format!("{}\n", output.display()))
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Ingest {
            input,
            registry,
            boolean,
        } => cmd_ingest(&input, &registry.registry, boolean),
        Command::Report {
            registry,
            kind,
            k,
            format,
            thresholds,
        } => cmd_report(&registry.registry, kind, k, format.into(), &thresholds),
        Command::Classify {
            registry,
            codes,
            row,
            id,
            boolean,
            format,
            thresholds,
        } => {
            let record = new_record(codes.as_deref(), row.as_deref(), &id, boolean)?;
            cmd_classify(&registry.registry, record, &thresholds, format.into())
        }
        Command::Fit {
            registry,
            cluster,
            moments,
            format,
        } => cmd_fit(
            registry.as_deref(),
            cluster.as_deref(),
            moments.as_deref(),
            format.into(),
        ),
        Command::Chart {
            registry,
            which,
            output,
        } => cmd_chart(&registry.registry, which, &output),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
