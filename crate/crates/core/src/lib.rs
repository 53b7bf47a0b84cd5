//! Infers which repeat structure a MIDI performance realizes, given a score
//! with repeats, volta brackets and da capo / dal segno navigation.
//!
//! The pipeline has three steps:
//!
//! 1. accumulate a bounded local-alignment gain matrix between the performed
//!    pitches and the score onsets (not unfolded), once per performance.
//!    [`accumulate`] gives the plain matrix; inference uses
//!    [`accumulate_windowed`], where ridges restart at segment boundaries;
//! 2. for every version from [`enumerate_versions`], backtrack each segment
//!    inside its own column window ([`align_version`]);
//! 3. [`select_version`] picks the version with the highest global gain.
//!
//! ```
//! use repeat_infer::{infer_structure, InferConfig, Marker, MarkerKind, Performance, Score};
//!
//! let onsets: Vec<Vec<u8>> = (0..12).map(|i| vec![48 + (i * 7 % 24) as u8]).collect();
//! let score = Score::new(
//!     "toy",
//!     onsets.clone(),
//!     vec![Marker::new(MarkerKind::RepeatStart, 6), Marker::new(MarkerKind::RepeatEnd, 12)],
//! )
//! .unwrap();
//! let played: Vec<u8> = onsets.iter().chain(&onsets[6..]).map(|o| o[0]).collect();
//! let best = infer_structure(&score, &Performance::new("take", played), &InferConfig::<f32>::default()).unwrap();
//! assert_eq!(best.version.structure, "ABB");
//! ```
//!
//! Gains are generic over [`GainScalar`] (`f32`, `f64`); the aliases below fix
//! the scalar to `f32`, which is what the CLI uses.

pub mod align;
pub mod corpus;
pub mod error;
pub mod infer;
pub mod performance;
pub mod scalar;
pub mod score;

pub use align::{
    accumulate, accumulate_windowed, accumulate_with, bounded_update, local_metric, BoundedGain,
    ClampedUnitGain, GainMatrix, GainRule, Metric, DEFAULT_BOUND,
};
pub use error::{Error, MidiError, Result, ValidationError};
pub use infer::{
    align_version, backtrack_segment, infer_all, infer_structure, result_json, select_version,
    InferConfig, Inference, SegmentAlignment, VersionResult, DEFAULT_LAMBDA,
};
pub use performance::{load_midi, to_pitch_sequence, Performance, PerformanceNote};
pub use scalar::GainScalar;
pub use score::{
    enumerate_versions, parse_structure, segment_label, segment_score, unfold, Marker, MarkerKind,
    PitchSet, Score, ScoreOnset, Segment, StructuralVersion, DEFAULT_VERSION_LIMIT,
};

/// Scalar used by the CLI and the 32-bit matrix storage.
pub type Gain = f32;
pub type GainMatrix32 = GainMatrix<f32>;
pub type GainMatrix64 = GainMatrix<f64>;
pub type VersionResult32 = VersionResult<f32>;
pub type VersionResult64 = VersionResult<f64>;
pub type SegmentAlignment32 = SegmentAlignment<f32>;
pub type InferConfig32 = InferConfig<f32>;
pub type InferConfig64 = InferConfig<f64>;
pub type AuditReport32 = corpus::AuditReport<f32>;
