//! Feature reports and their CSV and JSON forms.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{Family, FeatureValue};
use crate::pipeline::diagnostics::DiagnosticSet;

/// Aggregation identifier of features computed over the whole volume.
pub const VOLUME_AGGREGATION_ID: &str = "DHQ4";

/// One feature value with its identity and processing provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub ibsi_id: &'static str,
    pub family: Family,
    pub feature: &'static str,
    /// Aggregation method identifier.
    pub aggregation: &'static str,
    pub nomenclature: String,
    pub value: FeatureValue,
}

/// Ordered feature records plus the fingerprint of the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureReport {
    pub fingerprint: String,
    pub records: Vec<FeatureRecord>,
}

/// Output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// Format implied by a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

/// 17 significant digits, or `NaN:<reason>` for undefined values.
pub fn format_value(v: &FeatureValue) -> String {
    match v {
        FeatureValue::Value(x) if x.is_finite() => format!("{x:.16e}"),
        FeatureValue::Value(_) => "NaN:non-finite value".into(),
        FeatureValue::Undefined(r) => format!("NaN:{r}"),
    }
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    ibsi_id: &'a str,
    family: &'a str,
    feature: &'a str,
    aggregation: &'a str,
    nomenclature: &'a str,
    value: serde_json::Value,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    fingerprint: &'a str,
    records: Vec<JsonRecord<'a>>,
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<report>", io),
        other => Error::Invariant(format!("CSV writer: {other:?}")),
    }
}

impl FeatureReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().quote_style(csv::QuoteStyle::NonNumeric).from_writer(out);
        w.write_record(["ibsi_id", "family", "feature", "aggregation", "nomenclature", "value"]).map_err(csv_error)?;
        for r in &self.records {
            w.write_record([r.ibsi_id, r.family.abbreviation(), r.feature, r.aggregation, &r.nomenclature, &format_value(&r.value)])
                .map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::io("<report>", e))
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let records = self
            .records
            .iter()
            .map(|r| JsonRecord {
                ibsi_id: r.ibsi_id,
                family: r.family.abbreviation(),
                feature: r.feature,
                aggregation: r.aggregation,
                nomenclature: &r.nomenclature,
                value: match &r.value {
                    FeatureValue::Value(x) if x.is_finite() => serde_json::Value::from(*x),
                    v => serde_json::Value::from(format_value(v)),
                },
            })
            .collect();
        let doc = JsonReport { fingerprint: &self.fingerprint, records };
        serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Error::Invariant(format!("JSON writer: {e}")))?;
        writeln!(out).map_err(|e| Error::io("<report>", e))
    }

    pub fn write<W: Write>(&self, format: ReportFormat, out: W) -> Result<()> {
        match format {
            ReportFormat::Csv => self.write_csv(out),
            ReportFormat::Json => self.write_json(out),
        }
    }

    /// Writes to `path`, surfacing failures with the path.
    pub fn write_to_path(&self, format: ReportFormat, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

impl DiagnosticSet {
    /// CSV rows of `stage, descriptor, value`, or a JSON document.
    pub fn write<W: Write>(&self, format: ReportFormat, mut out: W) -> Result<()> {
        match format {
            ReportFormat::Json => {
                serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::Invariant(format!("JSON writer: {e}")))?;
                writeln!(out).map_err(|e| Error::io("<diagnostics>", e))
            }
            ReportFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["stage", "descriptor", "value"]).map_err(csv_error)?;
                for s in &self.stages {
                    let json = serde_json::to_value(s).map_err(|e| Error::Invariant(e.to_string()))?;
                    let obj = json.as_object().expect("stage diagnostics serialise to an object");
                    for (k, v) in obj {
                        if k == "stage" {
                            continue;
                        }
                        let text = match v {
                            serde_json::Value::Array(a) => {
                                a.iter().map(ToString::to_string).collect::<Vec<_>>().join("x")
                            }
                            serde_json::Value::Null => "NaN:empty ROI".into(),
                            other => other.to_string(),
                        };
                        w.write_record([s.stage.name(), k.as_str(), &text]).map_err(csv_error)?;
                    }
                }
                w.flush().map_err(|e| Error::io("<diagnostics>", e))
            }
        }
    }
}
