//! Shared test helpers: random scores with repeat structure, and oracles
//! written independently of the library's code paths.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repeat_infer::corpus::render_version;
use repeat_infer::{enumerate_versions, Marker, MarkerKind, Score, StructuralVersion};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Onsets of a short phrase: a melodic random walk with an optional chord
/// tone or two underneath.
fn phrase(rng: &mut ChaCha8Rng, len: usize, onsets: &mut Vec<Vec<u8>>) {
    let mut top: i32 = rng.gen_range(60..84);
    for _ in 0..len {
        top = (top + rng.gen_range(-5..=5)).clamp(55, 96);
        let mut chord = vec![top as u8];
        let extra = rng.gen_range(0..3);
        for _ in 0..extra {
            let below = top - rng.gen_range(3..20);
            chord.push(below.clamp(24, 127) as u8);
        }
        chord.sort_unstable();
        chord.dedup();
        onsets.push(chord);
    }
}

/// Random score with 1-4 repeats, optional volta pairs, optional plain
/// sections between them, and an optional da capo al fine.
pub fn random_score(seed: u64) -> Score {
    let mut rng = rng(seed);
    let mut onsets = Vec::new();
    let mut markers = Vec::new();
    let mut section_ends = Vec::new();
    let len = |rng: &mut ChaCha8Rng| rng.gen_range(4..12);

    if rng.gen_bool(0.5) {
        let n = len(&mut rng);
        phrase(&mut rng, n, &mut onsets);
        section_ends.push(onsets.len());
    }
    let repeats = rng.gen_range(1..=4);
    for _ in 0..repeats {
        let start = onsets.len();
        if start > 0 || rng.gen_bool(0.5) {
            markers.push(Marker::new(MarkerKind::RepeatStart, start));
        }
        let n = len(&mut rng);
        phrase(&mut rng, n, &mut onsets);
        if rng.gen_bool(0.35) {
            let d = onsets.len();
            markers.push(Marker::new(MarkerKind::VoltaStart(1), d));
            let n = rng.gen_range(2..7);
            phrase(&mut rng, n, &mut onsets);
            let e = onsets.len();
            markers.push(Marker::new(MarkerKind::RepeatEnd, e));
            markers.push(Marker::new(MarkerKind::VoltaEnd, e));
            markers.push(Marker::new(MarkerKind::VoltaStart(2), e));
            let n = rng.gen_range(2..7);
            phrase(&mut rng, n, &mut onsets);
            markers.push(Marker::new(MarkerKind::VoltaEnd, onsets.len()));
        } else {
            markers.push(Marker::new(MarkerKind::RepeatEnd, onsets.len()));
        }
        section_ends.push(onsets.len());
        if rng.gen_bool(0.3) {
            let n = len(&mut rng);
            phrase(&mut rng, n, &mut onsets);
            section_ends.push(onsets.len());
        }
    }
    let end = onsets.len();
    let fine_candidates: Vec<usize> = section_ends.iter().copied().filter(|&p| p < end).collect();
    if !fine_candidates.is_empty() && rng.gen_bool(0.3) {
        let fine = *fine_candidates.choose(&mut rng).unwrap();
        markers.push(Marker::new(MarkerKind::Fine, fine));
        markers.push(Marker::new(MarkerKind::DaCapoAlFine, end));
    }
    Score::new(format!("synthetic-{seed}"), onsets, markers).expect("generator builds valid scores")
}

/// True when no other version renders to the same pitch sequence.
pub fn distinguishable(
    score: &Score,
    versions: &[StructuralVersion],
    target: &StructuralVersion,
) -> bool {
    let rendered = render_version(score, target);
    versions
        .iter()
        .filter(|v| v.structure != target.structure)
        .all(|v| render_version(score, v) != rendered)
}

pub fn all_versions(score: &Score) -> Vec<StructuralVersion> {
    enumerate_versions(score, usize::MAX).unwrap()
}
