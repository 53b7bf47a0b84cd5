//! Score-informed backtracking and version selection.

use rayon::prelude::*;
use serde::Serialize;

use crate::align::{accumulate_windowed, GainMatrix, Metric, DEFAULT_BOUND};
use crate::error::{Error, Result};
use crate::performance::Performance;
use crate::scalar::GainScalar;
use crate::score::{
    enumerate_versions, segment_score, Score, Segment, StructuralVersion, DEFAULT_VERSION_LIMIT,
};

/// Segment-count penalty used unless configured otherwise.
pub const DEFAULT_LAMBDA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferConfig<T> {
    /// Upper gain bound of the accumulation.
    pub bound: T,
    /// Penalty per segment in a version.
    pub lambda: T,
    /// Maximum number of versions scored.
    pub limit: usize,
}

impl<T: GainScalar> Default for InferConfig<T> {
    fn default() -> Self {
        InferConfig {
            bound: T::from_f64_lossy(DEFAULT_BOUND),
            lambda: T::from_f64_lossy(DEFAULT_LAMBDA),
            limit: DEFAULT_VERSION_LIMIT,
        }
    }
}

/// A local alignment of one segment of a version.
///
/// `perf_rows` and `score_cols` are `None` when the performance ran out of
/// rows before this segment was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentAlignment<T> {
    pub segment_label: String,
    pub score_cols: Option<(usize, usize)>,
    pub perf_rows: Option<(usize, usize)>,
    pub local_gain: T,
    /// Visited `(row, col)` cells, top to bottom.
    pub path: Vec<(usize, usize)>,
}

impl<T: GainScalar> SegmentAlignment<T> {
    fn empty(segment: &Segment) -> Self {
        SegmentAlignment {
            segment_label: segment.label.clone(),
            score_cols: None,
            perf_rows: None,
            local_gain: T::zero(),
            path: Vec::new(),
        }
    }

    pub fn row_count(&self) -> usize {
        self.perf_rows.map_or(0, |(a, b)| b - a + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VersionResult<T> {
    pub version: StructuralVersion,
    /// One entry per version segment, in performance order.
    pub alignments: Vec<SegmentAlignment<T>>,
    pub global_gain: T,
    pub covered_rows: usize,
}

impl<T: GainScalar> VersionResult<T> {
    /// Sum of local gains before the segment penalty.
    pub fn gain_sum(&self) -> T {
        self.alignments
            .iter()
            .fold(T::zero(), |acc, a| acc + a.local_gain)
    }
}

/// Backtracks one segment from `start_row`.
///
/// Starts at the best cell of the segment's columns on `start_row` (ties go
/// right) and walks up through the larger of the vertical and diagonal
/// predecessors (ties go diagonal) inside the segment's column window. A
/// column holds at most one path cell per chord tone plus one; after that
/// the walk moves diagonally. The walk ends at row 0, before stepping onto
/// a zero-gain cell, or in the segment's first column once the notes of its
/// opening onset are used up. The local gain is the start cell's gain.
///
/// Meant for the matrix of [`accumulate_windowed`], where no ridge runs in
/// from a neighbouring segment.
pub fn backtrack_segment<T: GainScalar>(
    matrix: &GainMatrix<T>,
    segment: &Segment,
    start_row: usize,
) -> SegmentAlignment<T> {
    assert!(
        start_row < matrix.rows(),
        "start row {start_row} outside matrix"
    );
    assert!(
        segment.end < matrix.cols(),
        "segment {} outside matrix",
        segment.label
    );

    let row = matrix.row(start_row);
    let mut col = segment.start;
    for j in segment.start..=segment.end {
        if row[j] >= row[col] {
            col = j;
        }
    }
    let start_gain = row[col];
    let mut path = vec![(start_row, col)];
    if start_gain > T::zero() {
        let (mut i, mut j) = (start_row, col);
        // Path cells in column j so far.
        let mut run = 1;
        while i > 0 {
            let run_full = run > matrix.onset_pitches(j).len();
            if j == segment.start {
                // Remaining notes of the segment's first onset sit straight above.
                if !run_full
                    && matrix.metric(i, j) == Metric::Match
                    && matrix.metric(i - 1, j) == Metric::Match
                {
                    i -= 1;
                    run += 1;
                    path.push((i, j));
                    continue;
                }
                break;
            }
            let vertical = matrix.get(i - 1, j);
            let diagonal = matrix.get(i - 1, j - 1);
            let (ni, nj) = if diagonal >= vertical || run_full {
                (i - 1, j - 1)
            } else {
                (i - 1, j)
            };
            if matrix.get(ni, nj) <= T::zero() {
                break;
            }
            run = if nj == j { run + 1 } else { 1 };
            i = ni;
            j = nj;
            path.push((i, j));
        }
    }
    path.reverse();
    let (top_row, top_col) = path[0];
    SegmentAlignment {
        segment_label: segment.label.clone(),
        score_cols: Some((top_col, col)),
        perf_rows: Some((top_row, start_row)),
        local_gain: start_gain,
        path,
    }
}

/// Aligns a version's segments last to first, each starting one row above
/// where the later one began.
pub fn align_version<T: GainScalar>(
    matrix: &GainMatrix<T>,
    version: &StructuralVersion,
    lambda: T,
) -> VersionResult<T> {
    let mut next_row = matrix.rows().checked_sub(1);
    let mut alignments: Vec<SegmentAlignment<T>> = version
        .segments
        .iter()
        .rev()
        .map(|segment| match next_row {
            Some(row) => {
                let a = backtrack_segment(matrix, segment, row);
                next_row = a.perf_rows.and_then(|(top, _)| top.checked_sub(1));
                a
            }
            None => SegmentAlignment::empty(segment),
        })
        .collect();
    alignments.reverse();

    let covered_rows = alignments.iter().map(SegmentAlignment::row_count).sum();
    let mut result = VersionResult {
        version: version.clone(),
        alignments,
        global_gain: T::zero(),
        covered_rows,
    };
    let count = T::from_usize(version.segment_count()).expect("segment count fits the scalar");
    result.global_gain = result.gain_sum() - lambda * count;
    result
}

/// Highest global gain wins; ties go to fewer segments, then to the
/// lexicographically smaller structure string.
pub fn select_version<T: GainScalar>(
    results: impl IntoIterator<Item = VersionResult<T>>,
) -> Result<VersionResult<T>> {
    results
        .into_iter()
        .reduce(|best, r| if beats(&r, &best) { r } else { best })
        .ok_or(Error::Degenerate("no versions to select from"))
}

fn beats<T: GainScalar>(a: &VersionResult<T>, b: &VersionResult<T>) -> bool {
    if a.global_gain != b.global_gain {
        return a.global_gain > b.global_gain;
    }
    let (na, nb) = (a.version.segment_count(), b.version.segment_count());
    if na != nb {
        return na < nb;
    }
    a.version.structure < b.version.structure
}

/// The gain matrix and every scored version, in enumeration order.
#[derive(Debug, Clone)]
pub struct Inference<T> {
    /// Segment-windowed gain, see [`accumulate_windowed`].
    pub matrix: GainMatrix<T>,
    pub results: Vec<VersionResult<T>>,
    pub best: VersionResult<T>,
}

/// Runs the full pipeline and keeps the intermediate products.
pub fn infer_all<T: GainScalar>(
    score: &Score,
    performance: &Performance,
    config: &InferConfig<T>,
) -> Result<Inference<T>> {
    let versions = enumerate_versions(score, config.limit)?;
    let matrix = accumulate_windowed(performance, score, &segment_score(score)?, config.bound)?;
    let results: Vec<_> = versions
        .par_iter()
        .map(|v| align_version(&matrix, v, config.lambda))
        .collect();
    let best = select_version(results.iter().cloned())?;
    Ok(Inference {
        matrix,
        results,
        best,
    })
}

/// Best-fitting structural version of `score` for `performance`.
pub fn infer_structure<T: GainScalar>(
    score: &Score,
    performance: &Performance,
    config: &InferConfig<T>,
) -> Result<VersionResult<T>> {
    Ok(infer_all(score, performance, config)?.best)
}

#[derive(Serialize)]
struct ResultDoc<'a, T> {
    performance: &'a str,
    score: &'a str,
    structure: &'a str,
    global_gain: T,
    segments: Vec<SegmentDoc<'a, T>>,
}

#[derive(Serialize)]
struct SegmentDoc<'a, T> {
    label: &'a str,
    score_cols: Option<[usize; 2]>,
    perf_rows: Option<[usize; 2]>,
    local_gain: T,
}

/// Result JSON for one inference, pretty-printed with a trailing newline.
pub fn result_json<T: GainScalar>(
    performance: &str,
    score: &str,
    result: &VersionResult<T>,
) -> String {
    let doc = ResultDoc {
        performance,
        score,
        structure: &result.version.structure,
        global_gain: result.global_gain,
        segments: result
            .alignments
            .iter()
            .map(|a| SegmentDoc {
                label: &a.segment_label,
                score_cols: a.score_cols.map(|(x, y)| [x, y]),
                perf_rows: a.perf_rows.map(|(x, y)| [x, y]),
                local_gain: a.local_gain,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("result serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::accumulate;
    use crate::score::{Marker, MarkerKind};

    fn melody(n: usize, base: u8) -> Vec<Vec<u8>> {
        (0..n).map(|i| vec![base + ((i * 5) % 23) as u8]).collect()
    }

    fn repeat_score() -> Score {
        // A (8 onsets) |: B (8 onsets) :|
        let mut onsets = melody(8, 40);
        onsets.extend(melody(8, 70));
        Score::new(
            "rep",
            onsets,
            vec![
                Marker::new(MarkerKind::RepeatStart, 8),
                Marker::new(MarkerKind::RepeatEnd, 16),
            ],
        )
        .unwrap()
    }

    fn render(score: &Score, structure: &str) -> Performance {
        let segments = segment_score(score).unwrap();
        let v = crate::score::parse_structure(structure, &segments).unwrap();
        let pitches = crate::score::unfold(&v)
            .into_iter()
            .flat_map(|i| score.onsets[i].pitches.to_vec())
            .collect();
        Performance::new(structure, pitches)
    }

    #[test]
    fn exact_rendition_backtrack_covers_segment() {
        let score = Score::new("s", melody(6, 50), vec![]).unwrap();
        let perf = render(&score, "A");
        let m = accumulate(&perf, &score, 10.0f64).unwrap();
        let seg = &segment_score(&score).unwrap()[0];
        let a = backtrack_segment(&m, seg, 5);
        assert_eq!(a.score_cols, Some((0, 5)));
        assert_eq!(a.perf_rows, Some((0, 5)));
        assert_eq!(a.local_gain, m.get(5, 5));
        assert_eq!(a.path, (0..6).map(|i| (i, i)).collect::<Vec<_>>());
    }

    #[test]
    fn zero_start_cell_is_single_cell() {
        let score = Score::new("s", vec![vec![60], vec![62]], vec![]).unwrap();
        let perf = Performance::new("p", vec![70, 71, 72]);
        let m = accumulate(&perf, &score, 10.0f32).unwrap();
        let seg = &segment_score(&score).unwrap()[0];
        let a = backtrack_segment(&m, seg, 2);
        assert_eq!(a.local_gain, 0.0);
        assert_eq!(a.perf_rows, Some((2, 2)));
        assert_eq!(a.score_cols, Some((1, 1)));
    }

    #[test]
    fn width_one_segment_walks_vertically() {
        let score = Score::new("s", vec![vec![60, 64, 67]], vec![]).unwrap();
        let perf = Performance::new("p", vec![60, 64, 67]);
        let m = accumulate(&perf, &score, 10.0f32).unwrap();
        let seg = &segment_score(&score).unwrap()[0];
        let a = backtrack_segment(&m, seg, 2);
        assert_eq!(a.score_cols, Some((0, 0)));
        assert_eq!(a.perf_rows, Some((0, 2)));
    }

    #[test]
    fn recovers_repeat_and_no_repeat() {
        let score = repeat_score();
        for structure in ["ABB", "AB"] {
            let perf = render(&score, structure);
            let best = infer_structure(&score, &perf, &InferConfig::<f32>::default()).unwrap();
            assert_eq!(best.version.structure, structure);
            assert_eq!(best.covered_rows, perf.len());
        }
    }

    #[test]
    fn missing_last_segment_scores_low() {
        let score = repeat_score();
        // Performance of A only; version "AB" must start with a zero backtrack.
        let perf = Performance::new("a", melody(8, 40).into_iter().flatten().collect());
        let m = accumulate(&perf, &score, 10.0f32).unwrap();
        let versions = enumerate_versions(&score, 8).unwrap();
        let ab = versions.iter().find(|v| v.structure == "AB").unwrap();
        let r = align_version(&m, ab, 1.0);
        assert_eq!(r.alignments[1].local_gain, 0.0);
        assert_eq!(r.alignments[1].row_count(), 1);
    }

    #[test]
    fn rows_exhausted_leaves_empty_alignments() {
        let score = repeat_score();
        let perf = Performance::new("short", vec![70, 75]);
        let m = accumulate(&perf, &score, 10.0f32).unwrap();
        let versions = enumerate_versions(&score, 8).unwrap();
        let r = align_version(&m, &versions[0], 1.0);
        assert_eq!(r.alignments.len(), 3);
        assert!(r.alignments[0].perf_rows.is_none());
        assert_eq!(r.alignments[0].local_gain, 0.0);
        assert!(r.covered_rows <= 2);
        assert_eq!(r.global_gain, r.gain_sum() - 3.0);
    }

    #[test]
    fn single_segment_starts_at_last_row() {
        let score = Score::new("s", melody(5, 60), vec![]).unwrap();
        let perf = Performance::new("p", vec![1, 2, 3, 60, 65]);
        let m = accumulate(&perf, &score, 10.0f32).unwrap();
        let v = &enumerate_versions(&score, 1).unwrap()[0];
        let r = align_version(&m, v, 1.0);
        assert_eq!(r.alignments.len(), 1);
        assert_eq!(r.alignments[0].perf_rows.unwrap().1, 4);
    }

    fn fake(structure: &str, segments: usize, gain: f64) -> VersionResult<f64> {
        let seg = Segment {
            label: "A".into(),
            start: 0,
            end: 0,
        };
        VersionResult {
            version: StructuralVersion {
                segments: vec![seg; segments],
                structure: structure.into(),
            },
            alignments: vec![],
            global_gain: gain,
            covered_rows: 0,
        }
    }

    #[test]
    fn selection_rules() {
        let best = select_version(vec![fake("AB", 2, 50.0), fake("ABB", 3, 72.3)]).unwrap();
        assert_eq!(best.version.structure, "ABB");
        let best = select_version(vec![fake("ABB", 3, 7.0), fake("AB", 2, 7.0)]).unwrap();
        assert_eq!(best.version.structure, "AB");
        let best = select_version(vec![fake("BA", 2, 7.0), fake("AB", 2, 7.0)]).unwrap();
        assert_eq!(best.version.structure, "AB");
        let best = select_version(vec![fake("A", 1, 1.0)]).unwrap();
        assert_eq!(best.version.structure, "A");
        assert!(select_version(Vec::<VersionResult<f64>>::new()).is_err());
    }

    #[test]
    fn result_json_shape() {
        let score = repeat_score();
        let perf = render(&score, "ABB");
        let best = infer_structure(&score, &perf, &InferConfig::<f32>::default()).unwrap();
        let text = result_json("ABB", "rep", &best);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["structure"], "ABB");
        assert_eq!(v["segments"].as_array().unwrap().len(), 3);
        assert_eq!(v["segments"][0]["perf_rows"][0], 0);
        assert!(text.ends_with("}\n"));
    }
}
