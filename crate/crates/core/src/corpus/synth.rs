use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::performance::{Performance, PerformanceNote};
use crate::score::{unfold, Score, StructuralVersion};

/// Per-note noise probabilities, each in `[0, 1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NoiseRates {
    pub substitution_rate: f64,
    pub deletion_rate: f64,
    pub insertion_rate: f64,
}

/// Clean pitch sequence of a version: unfolded onsets, each chord played
/// bottom to top.
pub fn render_version(score: &Score, version: &StructuralVersion) -> Vec<u8> {
    unfold(version)
        .into_iter()
        .flat_map(|i| score.onsets[i].pitches.iter())
        .collect()
}

/// Renders `version` and perturbs it with seeded noise.
///
/// Each clean note is first deleted with `deletion_rate`; a surviving note is
/// replaced by a uniformly drawn different pitch with `substitution_rate`;
/// then a uniformly random pitch is inserted after it with `insertion_rate`.
pub fn generate_synthetic(
    score: &Score,
    version: &StructuralVersion,
    noise: NoiseRates,
    seed: u64,
) -> Performance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clean = render_version(score, version);
    let mut pitches = Vec::with_capacity(clean.len());
    for pitch in clean {
        if rng.gen::<f64>() < noise.deletion_rate {
            continue;
        }
        if rng.gen::<f64>() < noise.substitution_rate {
            // uniform over the 127 other pitches
            let other = rng.gen_range(0..127u8);
            pitches.push(if other >= pitch { other + 1 } else { other });
        } else {
            pitches.push(pitch);
        }
        if rng.gen::<f64>() < noise.insertion_rate {
            pitches.push(rng.gen_range(0..128u8));
        }
    }
    Performance::new(
        format!("{}:{}:{seed}", score.name, version.structure),
        pitches,
    )
}

/// Notes for a performance JSON file, one per `step` seconds.
pub fn as_notes(performance: &Performance, step: f64) -> Vec<PerformanceNote> {
    performance
        .pitches
        .iter()
        .enumerate()
        .map(|(i, &pitch)| PerformanceNote {
            onset_time: i as f64 * step,
            pitch,
        })
        .collect()
}
