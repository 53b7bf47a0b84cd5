//! Batch comparison of predicted structures against corpus annotations.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{load_performance, load_score};
use crate::error::{Error, Result};
use crate::infer::{infer_structure, InferConfig};
use crate::scalar::GainScalar;
use crate::score::{parse_structure, segment_score};

/// One manifest line. Relative paths resolve against the manifest's folder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub score: PathBuf,
    pub performance: PathBuf,
    /// Annotated structure string, e.g. `"ABCBDE"`.
    pub annotation: String,
    /// Defaults to the performance file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
}

impl ManifestEntry {
    pub fn performance_id(&self) -> String {
        self.id.clone().unwrap_or_else(|| {
            self.performance
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord<T> {
    pub performance_id: String,
    pub predicted: Option<String>,
    pub annotated: String,
    pub agree: bool,
    pub global_gain: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub total: usize,
    pub agree: usize,
    pub disagree: usize,
    pub failed: usize,
    /// `100 * agree / total`.
    pub agreement_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport<T> {
    pub summary: AuditSummary,
    /// Disagreeing predictions sorted by performance id.
    pub mismatches: Vec<AuditRecord<T>>,
    /// Every entry in manifest order.
    pub records: Vec<AuditRecord<T>>,
}

impl<T: GainScalar> AuditReport<T> {
    pub fn from_records(records: Vec<AuditRecord<T>>) -> Self {
        let total = records.len();
        let agree = records.iter().filter(|r| r.agree).count();
        let failed = records.iter().filter(|r| r.error.is_some()).count();
        let mut mismatches: Vec<_> = records
            .iter()
            .filter(|r| !r.agree && r.error.is_none())
            .cloned()
            .collect();
        mismatches.sort_by(|a, b| a.performance_id.cmp(&b.performance_id));
        let agreement_percent = if total == 0 {
            0.0
        } else {
            100.0 * agree as f64 / total as f64
        };
        AuditReport {
            summary: AuditSummary {
                total,
                agree,
                disagree: total - agree - failed,
                failed,
                agreement_percent,
            },
            mismatches,
            records,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

fn audit_one<T: GainScalar>(
    entry: &ManifestEntry,
    base: &Path,
    config: &InferConfig<T>,
) -> AuditRecord<T> {
    let mut record = AuditRecord {
        performance_id: entry.performance_id(),
        predicted: None,
        annotated: entry.annotation.clone(),
        agree: false,
        global_gain: None,
        error: None,
    };
    let outcome = (|| -> Result<_> {
        let score = load_score(&base.join(&entry.score))?;
        let performance = load_performance(&base.join(&entry.performance))?;
        let segments = segment_score(&score)?;
        parse_structure(&entry.annotation, &segments).map_err(|e| {
            Error::Validation(crate::error::ValidationError::new("annotation", e.message))
        })?;
        infer_structure(&score, &performance, config)
    })();
    match outcome {
        Ok(best) => {
            record.agree = best.version.structure == entry.annotation;
            record.predicted = Some(best.version.structure);
            record.global_gain = Some(best.global_gain);
        }
        // Paths relative to the manifest and the error kind keep reports
        // identical across machines.
        Err(Error::Io { path, source }) => {
            let path = path.strip_prefix(base).unwrap_or(&path);
            record.error = Some(format!("{}: {}", path.display(), source.kind()));
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Audits manifest entries independently (in parallel), keeping their order.
pub fn audit_entries<T: GainScalar>(
    entries: &[ManifestEntry],
    base: &Path,
    config: &InferConfig<T>,
) -> AuditReport<T> {
    let records = entries
        .par_iter()
        .map(|e| audit_one(e, base, config))
        .collect();
    AuditReport::from_records(records)
}

/// Reads a manifest (JSON array of entries) and audits it.
pub fn run_audit<T: GainScalar>(
    manifest_path: &Path,
    config: &InferConfig<T>,
) -> Result<AuditReport<T>> {
    let text = std::fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&text)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    Ok(audit_entries(&entries, base, config))
}
