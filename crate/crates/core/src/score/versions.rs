use std::collections::HashSet;

use itertools::Itertools;

use super::{Jump, JumpEnd, Layout, Score, Segment};
use crate::error::ValidationError;

/// Versions kept when the caller does not pass a limit.
pub const DEFAULT_VERSION_LIMIT: usize = 64;

/// One linear unfolding of a score, as segments in performance order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructuralVersion {
    pub segments: Vec<Segment>,
    /// Concatenated segment labels, e.g. `"ABCBDE"`.
    pub structure: String,
}

impl StructuralVersion {
    pub fn from_segments(segments: Vec<Segment>) -> Self {
        let structure = segments.iter().map(|s| s.label.as_str()).collect();
        StructuralVersion {
            segments,
            structure,
        }
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Total number of onsets after unfolding.
    pub fn onset_count(&self) -> usize {
        self.segments.iter().map(Segment::onset_count).sum()
    }
}

/// Onset indices of the version in playing order.
pub fn unfold(version: &StructuralVersion) -> Vec<usize> {
    version
        .segments
        .iter()
        .flat_map(|s| s.start..=s.end)
        .collect()
}

/// Reads a structure string such as `"ABCBDE"` against a segmentation.
///
/// Multi-letter labels (past `Z`) can make a string ambiguous; such strings
/// are rejected rather than guessed.
pub fn parse_structure(
    structure: &str,
    segments: &[Segment],
) -> Result<StructuralVersion, ValidationError> {
    let field = "structure";
    if structure.is_empty() {
        return Err(ValidationError::new(field, "structure string is empty"));
    }
    let bytes = structure.as_bytes();
    let n = bytes.len();
    // parses[i]: number of parses of the suffix starting at i, capped at 2,
    // plus the segment chosen for the first unique parse.
    let mut parses = vec![0u8; n + 1];
    let mut choice: Vec<Option<usize>> = vec![None; n + 1];
    parses[n] = 1;
    for i in (0..n).rev() {
        for (k, seg) in segments.iter().enumerate() {
            let label = seg.label.as_bytes();
            if bytes[i..].starts_with(label) && parses[i + label.len()] > 0 {
                parses[i] = (parses[i] + parses[i + label.len()]).min(2);
                choice[i].get_or_insert(k);
            }
        }
    }
    match parses[0] {
        0 => Err(ValidationError::new(
            field,
            format!("'{structure}' does not split into this score's segment labels"),
        )),
        1 => {
            let mut out = Vec::new();
            let mut i = 0;
            while i < n {
                let seg = &segments[choice[i].expect("parse exists")];
                i += seg.label.len();
                out.push(seg.clone());
            }
            Ok(StructuralVersion::from_segments(out))
        }
        _ => Err(ValidationError::new(
            field,
            format!("'{structure}' splits into segment labels in more than one way"),
        )),
    }
}

/// All musically valid versions of the score, at most `limit` of them.
///
/// Each repeat is played once or twice. A jump (da capo / dal segno) is taken
/// once, after which repeats are ignored, first endings are skipped, and
/// playback stops at Fine or continues from ToCoda into the coda.
///
/// Ordering: all repeats taken, then none taken, then by the number of
/// repeats left out, then lexicographically by the decision vector
/// (`0` = left out sorts first). Duplicate structures are dropped.
pub fn enumerate_versions(
    score: &Score,
    limit: usize,
) -> Result<Vec<StructuralVersion>, ValidationError> {
    let layout = score.layout()?;
    let segments = layout.segments();
    let k = layout.repeats.len();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for decisions in decision_order(k) {
        if out.len() >= limit {
            break;
        }
        let version = realize(&layout, &segments, &decisions);
        if seen.insert(version.structure.clone()) {
            out.push(version);
        }
    }
    Ok(out)
}

fn decision_order(k: usize) -> impl Iterator<Item = Vec<bool>> {
    let all = vec![true; k];
    let none = vec![false; k];
    let middle = (1..k).flat_map(move |flipped| {
        (0..k).combinations(flipped).map(move |left_out| {
            let mut d = vec![true; k];
            for i in left_out {
                d[i] = false;
            }
            d
        })
    });
    let head = if k == 0 { vec![all] } else { vec![all, none] };
    head.into_iter().chain(middle)
}

fn realize(layout: &Layout, segments: &[Segment], decisions: &[bool]) -> StructuralVersion {
    let mut spans = Vec::new();
    let never = vec![false; decisions.len()];
    match layout.jump {
        None => play(layout, 0, layout.onset_count, decisions, &mut spans),
        Some(Jump { at, target, end }) => {
            play(layout, 0, at, decisions, &mut spans);
            match end {
                JumpEnd::Fine(fine) => play(layout, target, fine, &never, &mut spans),
                JumpEnd::Coda { to_coda, coda } => {
                    play(layout, target, to_coda, &never, &mut spans);
                    play(layout, coda, layout.onset_count, &never, &mut spans);
                }
            }
        }
    }
    let picked = spans
        .into_iter()
        .flat_map(|(from, to)| {
            let first = layout
                .boundaries
                .binary_search(&from)
                .expect("span starts on a boundary");
            let last = layout
                .boundaries
                .binary_search(&to)
                .expect("span ends on a boundary");
            segments[first..last].iter().cloned()
        })
        .collect();
    StructuralVersion::from_segments(picked)
}

/// Walks boundaries from `from` to `stop`, emitting played spans `[a, b)`.
fn play(layout: &Layout, from: usize, stop: usize, taken: &[bool], out: &mut Vec<(usize, usize)>) {
    let repeats = &layout.repeats;
    let mut second_pass = vec![false; repeats.len()];
    let mut cursor = from;
    let mut arrived = false;
    loop {
        if arrived {
            if let Some(k) = repeats.iter().position(|r| r.end == cursor) {
                if taken[k] && !second_pass[k] {
                    second_pass[k] = true;
                    cursor = repeats[k].start;
                    arrived = false;
                    continue;
                }
            }
        }
        if cursor >= stop {
            break;
        }
        let skipped = repeats.iter().enumerate().find(|(k, r)| {
            r.first_ending.is_some_and(|b| b.start == cursor) && (!taken[*k] || second_pass[*k])
        });
        if let Some((_, r)) = skipped {
            if r.end > stop {
                break;
            }
            cursor = r.end;
            arrived = false;
            continue;
        }
        let next = repeats
            .iter()
            .flat_map(|r| [Some(r.end), r.first_ending.map(|b| b.start)])
            .flatten()
            .filter(|&p| p > cursor)
            .fold(stop, usize::min);
        out.push((cursor, next));
        cursor = next;
        arrived = true;
    }
}
