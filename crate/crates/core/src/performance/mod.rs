//! Performed notes and their flattening into a pitch sequence.

mod midi;

use serde::{Deserialize, Serialize};

pub use midi::load_midi;

use crate::error::{Error, ValidationError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceNote {
    /// Seconds from the start of the performance.
    pub onset_time: f64,
    pub pitch: u8,
}

/// Performed MIDI pitches in temporal order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Performance {
    pub pitches: Vec<u8>,
    pub source: String,
}

impl Performance {
    pub fn new(source: impl Into<String>, pitches: Vec<u8>) -> Self {
        Performance {
            pitches,
            source: source.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.pitches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pitches.is_empty()
    }

    /// Reads the performance JSON document and flattens it.
    pub fn from_json(text: &str) -> Result<Performance, Error> {
        let doc: PerformanceDoc = serde_json::from_str(text)?;
        let mut notes = Vec::with_capacity(doc.notes.len());
        for (i, n) in doc.notes.iter().enumerate() {
            let pitch = u8::try_from(n.pitch)
                .ok()
                .filter(|&p| p <= 127)
                .ok_or_else(|| {
                    ValidationError::new(
                        format!("notes[{i}].pitch"),
                        format!("pitch {} outside 0..=127", n.pitch),
                    )
                })?;
            if !(n.onset_time.is_finite() && n.onset_time >= 0.0) {
                return Err(ValidationError::new(
                    format!("notes[{i}].onset_time"),
                    format!(
                        "onset time {} is not a finite non-negative number",
                        n.onset_time
                    ),
                )
                .into());
            }
            notes.push(PerformanceNote {
                onset_time: n.onset_time,
                pitch,
            });
        }
        Ok(to_pitch_sequence(doc.source, &notes))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PerformanceDoc {
    source: String,
    notes: Vec<NoteDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoteDoc {
    onset_time: f64,
    pitch: i64,
}

/// Serializes notes as a performance JSON document.
pub fn performance_json(source: &str, notes: &[PerformanceNote]) -> String {
    let doc = PerformanceDoc {
        source: source.to_string(),
        notes: notes
            .iter()
            .map(|n| NoteDoc {
                onset_time: n.onset_time,
                pitch: i64::from(n.pitch),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("performance serializes")
}

/// Orders notes by onset time, breaking ties by ascending pitch, and keeps
/// the pitches. Notes equal in both keep their input order.
pub fn to_pitch_sequence(source: impl Into<String>, notes: &[PerformanceNote]) -> Performance {
    let mut sorted = notes.to_vec();
    sorted.sort_by(|a, b| {
        a.onset_time
            .total_cmp(&b.onset_time)
            .then(a.pitch.cmp(&b.pitch))
    });
    Performance::new(source, sorted.into_iter().map(|n| n.pitch).collect())
}
