//! File loading, batch audits, heatmaps and synthetic performances.

mod audit;
mod heatmap;
mod synth;

use std::path::Path;

pub use audit::{audit_entries, run_audit, AuditRecord, AuditReport, AuditSummary, ManifestEntry};
pub use heatmap::{emit_heatmap, heatmap_pgm};
pub use synth::{as_notes, generate_synthetic, render_version, NoiseRates};

use crate::error::{Error, Result};
use crate::performance::{load_midi, to_pitch_sequence, Performance};
use crate::score::Score;

pub fn load_score(path: &Path) -> Result<Score> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Score::from_json(&text)
}

/// Loads a Standard MIDI File (detected by its `MThd` magic) or a
/// performance JSON document.
pub fn load_performance(path: &Path) -> Result<Performance> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"MThd") {
        let notes = load_midi(&bytes)?;
        let source = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(to_pitch_sequence(source, &notes))
    } else {
        let text = String::from_utf8(bytes).map_err(|e| {
            Error::io(
                path,
                std::io::Error::new(std::io::ErrorKind::InvalidData, e),
            )
        })?;
        Performance::from_json(&text)
    }
}
