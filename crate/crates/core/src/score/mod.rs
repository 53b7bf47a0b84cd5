//! Scores with repeat and navigation markers, their segmentation into
//! labeled sections, and the enumeration of structural versions.

mod json;
mod pitch;
mod versions;

use std::collections::BTreeSet;

pub use pitch::PitchSet;
pub use versions::{
    enumerate_versions, parse_structure, unfold, StructuralVersion, DEFAULT_VERSION_LIMIT,
};

use crate::error::ValidationError;

/// A unique score onset and the pitches sounding at it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreOnset {
    pub index: usize,
    pub pitches: PitchSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkerKind {
    RepeatStart,
    RepeatEnd,
    VoltaStart(u32),
    VoltaEnd,
    Segno,
    Fine,
    CodaSign,
    ToCoda,
    DaCapoAlFine,
    DaCapoAlCoda,
    DalSegnoAlFine,
    DalSegnoAlCoda,
}

impl MarkerKind {
    pub fn name(self) -> &'static str {
        match self {
            MarkerKind::RepeatStart => "RepeatStart",
            MarkerKind::RepeatEnd => "RepeatEnd",
            MarkerKind::VoltaStart(_) => "VoltaStart",
            MarkerKind::VoltaEnd => "VoltaEnd",
            MarkerKind::Segno => "Segno",
            MarkerKind::Fine => "Fine",
            MarkerKind::CodaSign => "CodaSign",
            MarkerKind::ToCoda => "ToCoda",
            MarkerKind::DaCapoAlFine => "DaCapoAlFine",
            MarkerKind::DaCapoAlCoda => "DaCapoAlCoda",
            MarkerKind::DalSegnoAlFine => "DalSegnoAlFine",
            MarkerKind::DalSegnoAlCoda => "DalSegnoAlCoda",
        }
    }

    /// Processing order of markers sharing a boundary: everything that closes
    /// a span comes before anything that opens one.
    fn rank(self) -> u8 {
        match self {
            MarkerKind::VoltaEnd => 0,
            MarkerKind::RepeatEnd => 1,
            MarkerKind::Fine => 2,
            MarkerKind::ToCoda => 3,
            MarkerKind::DaCapoAlFine
            | MarkerKind::DaCapoAlCoda
            | MarkerKind::DalSegnoAlFine
            | MarkerKind::DalSegnoAlCoda => 4,
            MarkerKind::CodaSign => 5,
            MarkerKind::Segno => 6,
            MarkerKind::VoltaStart(_) => 7,
            MarkerKind::RepeatStart => 8,
        }
    }
}

/// A structural marker sitting on the boundary before onset `position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Marker {
    pub kind: MarkerKind,
    pub position: usize,
}

impl Marker {
    pub fn new(kind: MarkerKind, position: usize) -> Self {
        Marker { kind, position }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Score {
    pub name: String,
    pub onsets: Vec<ScoreOnset>,
    pub markers: Vec<Marker>,
}

/// Maximal contiguous onset range between structural boundaries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub label: String,
    /// First onset index, inclusive.
    pub start: usize,
    /// Last onset index, inclusive.
    pub end: usize,
}

impl Segment {
    pub fn onset_count(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains(&self, onset: usize) -> bool {
        self.start <= onset && onset <= self.end
    }
}

impl Score {
    /// Builds a score from raw pitch lists and validates every invariant.
    pub fn new(
        name: impl Into<String>,
        onsets: Vec<Vec<u8>>,
        markers: Vec<Marker>,
    ) -> Result<Self, ValidationError> {
        let mut built = Vec::with_capacity(onsets.len());
        for (index, pitches) in onsets.into_iter().enumerate() {
            if pitches.is_empty() {
                return Err(ValidationError::new(
                    format!("onsets[{index}]"),
                    "pitch set is empty",
                ));
            }
            if let Some(&bad) = pitches.iter().find(|&&p| p > 127) {
                return Err(ValidationError::new(
                    format!("onsets[{index}]"),
                    format!("pitch {bad} outside 0..=127"),
                ));
            }
            built.push(ScoreOnset {
                index,
                pitches: pitches.into_iter().collect(),
            });
        }
        let score = Score {
            name: name.into(),
            onsets: built,
            markers,
        };
        score.layout()?;
        Ok(score)
    }

    pub fn len(&self) -> usize {
        self.onsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsets.is_empty()
    }

    pub fn pitch_sets(&self) -> Vec<PitchSet> {
        self.onsets.iter().map(|o| o.pitches).collect()
    }

    pub(crate) fn layout(&self) -> Result<Layout, ValidationError> {
        Layout::analyze(self.onsets.len(), &self.markers)
    }
}

/// Splits the score at every marker boundary and labels the pieces
/// A, B, ..., Z, AA, AB, ... in score order.
pub fn segment_score(score: &Score) -> Result<Vec<Segment>, ValidationError> {
    Ok(score.layout()?.segments())
}

/// Label of the `index`-th segment: bijective base-26 over `A..=Z`.
pub fn segment_label(index: usize) -> String {
    let mut n = index + 1;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ASCII label")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Bracket {
    pub start: usize,
    pub end: usize,
    pub number: u32,
}

/// One repeated span `[start, end)` with optional first and final endings.
/// A first ending always closes at `end`; a final ending opens there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct RepeatSection {
    pub start: usize,
    pub end: usize,
    pub first_ending: Option<Bracket>,
    pub final_ending: Option<Bracket>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum JumpEnd {
    Fine(usize),
    Coda { to_coda: usize, coda: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Jump {
    pub at: usize,
    pub target: usize,
    pub end: JumpEnd,
}

/// Validated structural reading of a marker set.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub onset_count: usize,
    pub boundaries: Vec<usize>,
    pub repeats: Vec<RepeatSection>,
    pub jump: Option<Jump>,
}

fn set_once(
    slot: &mut Option<usize>,
    position: usize,
    kind: MarkerKind,
) -> Result<(), ValidationError> {
    if let Some(prev) = slot.replace(position) {
        return Err(ValidationError::at_boundary(
            position,
            format!("second {} (first at boundary {prev})", kind.name()),
        ));
    }
    Ok(())
}

impl Layout {
    fn analyze(onset_count: usize, markers: &[Marker]) -> Result<Layout, ValidationError> {
        if onset_count == 0 {
            return Err(ValidationError::new("onsets", "score has no onsets"));
        }
        let mut sorted = markers.to_vec();
        sorted.sort_by_key(|m| (m.position, m.kind.rank()));

        let mut repeats: Vec<(usize, usize)> = Vec::new();
        let mut open_repeat: Option<usize> = None;
        let mut brackets: Vec<Bracket> = Vec::new();
        let mut open_bracket: Option<(u32, usize)> = None;
        let (mut segno, mut fine, mut coda_sign, mut to_coda) = (None, None, None, None);
        let mut jump_marker: Option<Marker> = None;

        for m in &sorted {
            let pos = m.position;
            if pos > onset_count {
                return Err(ValidationError::at_boundary(
                    pos,
                    format!("{} outside boundary range 0..={onset_count}", m.kind.name()),
                ));
            }
            match m.kind {
                MarkerKind::RepeatStart => {
                    if let Some(open) = open_repeat {
                        return Err(ValidationError::at_boundary(
                            pos,
                            format!("nested RepeatStart (repeat opened at boundary {open} is still open)"),
                        ));
                    }
                    open_repeat = Some(pos);
                }
                MarkerKind::RepeatEnd => {
                    let start = match open_repeat.take() {
                        Some(start) => start,
                        None if repeats.is_empty() => 0,
                        None => {
                            return Err(ValidationError::at_boundary(
                                pos,
                                "RepeatEnd without RepeatStart after an earlier repeat",
                            ))
                        }
                    };
                    if start >= pos {
                        return Err(ValidationError::at_boundary(
                            pos,
                            "repeat encloses no onsets",
                        ));
                    }
                    repeats.push((start, pos));
                }
                MarkerKind::VoltaStart(number) => {
                    if number == 0 {
                        return Err(ValidationError::at_boundary(
                            pos,
                            "volta number must be positive",
                        ));
                    }
                    if let Some((_, open)) = open_bracket {
                        return Err(ValidationError::at_boundary(
                            pos,
                            format!("VoltaStart inside the volta opened at boundary {open}"),
                        ));
                    }
                    open_bracket = Some((number, pos));
                }
                MarkerKind::VoltaEnd => match open_bracket.take() {
                    Some((number, start)) if start < pos => brackets.push(Bracket {
                        start,
                        end: pos,
                        number,
                    }),
                    Some((_, start)) => {
                        return Err(ValidationError::at_boundary(
                            pos,
                            format!("VoltaEnd must lie after its VoltaStart at boundary {start}"),
                        ))
                    }
                    None => {
                        return Err(ValidationError::at_boundary(
                            pos,
                            "VoltaEnd without VoltaStart",
                        ))
                    }
                },
                MarkerKind::Segno => set_once(&mut segno, pos, m.kind)?,
                MarkerKind::Fine => set_once(&mut fine, pos, m.kind)?,
                MarkerKind::CodaSign => set_once(&mut coda_sign, pos, m.kind)?,
                MarkerKind::ToCoda => set_once(&mut to_coda, pos, m.kind)?,
                MarkerKind::DaCapoAlFine
                | MarkerKind::DaCapoAlCoda
                | MarkerKind::DalSegnoAlFine
                | MarkerKind::DalSegnoAlCoda => {
                    if let Some(prev) = jump_marker.replace(*m) {
                        return Err(ValidationError::at_boundary(
                            pos,
                            format!(
                                "second navigation jump {} ({} already at boundary {})",
                                m.kind.name(),
                                prev.kind.name(),
                                prev.position
                            ),
                        ));
                    }
                }
            }
        }
        if let Some(open) = open_repeat {
            return Err(ValidationError::at_boundary(
                open,
                "RepeatStart without RepeatEnd",
            ));
        }
        if let Some((_, open)) = open_bracket {
            return Err(ValidationError::at_boundary(
                open,
                "VoltaStart without matching VoltaEnd",
            ));
        }

        let mut sections: Vec<RepeatSection> = repeats
            .iter()
            .map(|&(start, end)| RepeatSection {
                start,
                end,
                first_ending: None,
                final_ending: None,
            })
            .collect();
        for bracket in brackets {
            if let Some(section) = sections
                .iter_mut()
                .find(|s| s.end == bracket.end && s.start <= bracket.start)
            {
                if section.first_ending.replace(bracket).is_some() {
                    return Err(ValidationError::at_boundary(
                        bracket.start,
                        "repeat already has a first ending",
                    ));
                }
            } else if let Some(section) = sections.iter_mut().find(|s| s.end == bracket.start) {
                if section.final_ending.replace(bracket).is_some() {
                    return Err(ValidationError::at_boundary(
                        bracket.start,
                        "repeat already has a final ending",
                    ));
                }
            } else {
                return Err(ValidationError::at_boundary(
                    bracket.start,
                    "volta bracket is not attached to a repeat",
                ));
            }
        }
        for section in &sections {
            match (section.first_ending, section.final_ending) {
                (None, Some(last)) => {
                    return Err(ValidationError::at_boundary(
                        last.start,
                        "final ending without a first ending",
                    ))
                }
                (Some(first), Some(last)) if first.number >= last.number => {
                    return Err(ValidationError::at_boundary(
                        last.start,
                        format!(
                            "volta {} follows volta {}; endings must be numbered in increasing order",
                            last.number, first.number
                        ),
                    ))
                }
                _ => {}
            }
        }

        let jump = match jump_marker {
            None => None,
            Some(m) => Some(resolve_jump(m, segno, fine, coda_sign, to_coda)?),
        };

        let mut boundaries: BTreeSet<usize> = sorted.iter().map(|m| m.position).collect();
        boundaries.insert(0);
        boundaries.insert(onset_count);

        Ok(Layout {
            onset_count,
            boundaries: boundaries.into_iter().collect(),
            repeats: sections,
            jump,
        })
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.boundaries
            .windows(2)
            .enumerate()
            .map(|(i, w)| Segment {
                label: segment_label(i),
                start: w[0],
                end: w[1] - 1,
            })
            .collect()
    }
}

fn resolve_jump(
    marker: Marker,
    segno: Option<usize>,
    fine: Option<usize>,
    coda_sign: Option<usize>,
    to_coda: Option<usize>,
) -> Result<Jump, ValidationError> {
    let at = marker.position;
    let name = marker.kind.name();
    let missing = |what: &str| ValidationError::at_boundary(at, format!("{name} requires {what}"));
    let target = match marker.kind {
        MarkerKind::DalSegnoAlFine | MarkerKind::DalSegnoAlCoda => match segno {
            Some(s) if s < at => s,
            _ => return Err(missing("a Segno at a smaller boundary")),
        },
        _ => 0,
    };
    let end = match marker.kind {
        MarkerKind::DaCapoAlFine | MarkerKind::DalSegnoAlFine => match fine {
            Some(f) if target < f && f <= at => JumpEnd::Fine(f),
            Some(_) => return Err(missing("a Fine between the jump target and the jump")),
            None => return Err(missing("a Fine marker")),
        },
        _ => {
            let coda = coda_sign.ok_or_else(|| missing("a CodaSign"))?;
            let to_coda = to_coda.ok_or_else(|| missing("a ToCoda marker"))?;
            if !(target < to_coda && to_coda <= at) {
                return Err(missing("a ToCoda between the jump target and the jump"));
            }
            if coda < at {
                return Err(missing("a CodaSign at or after the jump"));
            }
            JumpEnd::Coda { to_coda, coda }
        }
    };
    Ok(Jump { at, target, end })
}

#[cfg(test)]
mod tests {
    use super::*;
    use MarkerKind::*;

    fn mono(n: usize) -> Vec<Vec<u8>> {
        (0..n).map(|i| vec![60 + (i % 12) as u8]).collect()
    }

    fn ranges(segments: &[Segment]) -> Vec<(String, usize, usize)> {
        segments
            .iter()
            .map(|s| (s.label.clone(), s.start, s.end))
            .collect()
    }

    #[test]
    fn no_markers_is_one_segment() {
        let score = Score::new("plain", mono(8), vec![]).unwrap();
        assert_eq!(
            ranges(&segment_score(&score).unwrap()),
            vec![("A".into(), 0, 7)]
        );
    }

    #[test]
    fn one_repeat_boundary() {
        let score = Score::new(
            "rep",
            mono(8),
            vec![Marker::new(RepeatStart, 0), Marker::new(RepeatEnd, 4)],
        )
        .unwrap();
        assert_eq!(
            ranges(&segment_score(&score).unwrap()),
            vec![("A".into(), 0, 3), ("B".into(), 4, 7)]
        );
    }

    #[test]
    fn labels_continue_past_z() {
        assert_eq!(segment_label(0), "A");
        assert_eq!(segment_label(25), "Z");
        assert_eq!(segment_label(26), "AA");
        assert_eq!(segment_label(27), "AB");
        assert_eq!(segment_label(51), "AZ");
        assert_eq!(segment_label(52), "BA");
        assert_eq!(segment_label(26 + 26 * 26), "AAA");
    }

    #[test]
    fn rejects_bad_pitches_and_empty_onsets() {
        let err = Score::new("x", vec![vec![60], vec![128]], vec![]).unwrap_err();
        assert_eq!(err.field, "onsets[1]");
        let err = Score::new("x", vec![vec![60], vec![]], vec![]).unwrap_err();
        assert_eq!(err.field, "onsets[1]");
        assert!(Score::new("x", vec![], vec![]).is_err());
    }

    #[test]
    fn rejects_unbalanced_and_nested_repeats() {
        let err = Score::new("x", mono(8), vec![Marker::new(RepeatStart, 2)]).unwrap_err();
        assert_eq!(err.field, "markers@2");

        let err = Score::new(
            "x",
            mono(8),
            vec![
                Marker::new(RepeatStart, 1),
                Marker::new(RepeatStart, 3),
                Marker::new(RepeatEnd, 5),
                Marker::new(RepeatEnd, 6),
            ],
        )
        .unwrap_err();
        assert_eq!(err.field, "markers@3");
        assert!(err.message.contains("nested"));
    }

    #[test]
    fn repeat_end_without_start_repeats_from_beginning() {
        let score = Score::new("x", mono(8), vec![Marker::new(RepeatEnd, 3)]).unwrap();
        let layout = score.layout().unwrap();
        assert_eq!(layout.repeats[0].start, 0);
        assert_eq!(layout.repeats[0].end, 3);

        let err = Score::new(
            "x",
            mono(8),
            vec![Marker::new(RepeatEnd, 3), Marker::new(RepeatEnd, 6)],
        )
        .unwrap_err();
        assert_eq!(err.field, "markers@6");
    }

    #[test]
    fn volta_validation() {
        let err = Score::new(
            "x",
            mono(8),
            vec![Marker::new(VoltaStart(1), 3), Marker::new(RepeatEnd, 5)],
        )
        .unwrap_err();
        assert_eq!(err.field, "markers@3");

        let err = Score::new(
            "x",
            mono(8),
            vec![Marker::new(VoltaStart(1), 3), Marker::new(VoltaEnd, 5)],
        )
        .unwrap_err();
        assert!(err.message.contains("not attached"));

        let err = Score::new(
            "x",
            mono(8),
            vec![Marker::new(VoltaStart(1), 3), Marker::new(VoltaEnd, 3)],
        )
        .unwrap_err();
        assert_eq!(err.field, "markers@3");
    }

    #[test]
    fn navigation_targets_required() {
        let err = Score::new(
            "x",
            mono(8),
            vec![Marker::new(Fine, 3), Marker::new(DalSegnoAlFine, 8)],
        )
        .unwrap_err();
        assert!(err.message.contains("Segno"));

        let err = Score::new("x", mono(8), vec![Marker::new(DaCapoAlCoda, 6)]).unwrap_err();
        assert!(err.message.contains("CodaSign"));

        let err = Score::new("x", mono(8), vec![Marker::new(DaCapoAlFine, 8)]).unwrap_err();
        assert!(err.message.contains("Fine"));

        // Segno after the jump does not count.
        let err = Score::new(
            "x",
            mono(8),
            vec![
                Marker::new(Fine, 2),
                Marker::new(DalSegnoAlFine, 5),
                Marker::new(Segno, 6),
            ],
        )
        .unwrap_err();
        assert_eq!(err.field, "markers@5");
    }

    #[test]
    fn marker_out_of_range() {
        let err = Score::new("x", mono(4), vec![Marker::new(Segno, 5)]).unwrap_err();
        assert_eq!(err.field, "markers@5");
    }

    #[test]
    fn volta_brackets_are_segments() {
        // A |: B |1. C :| |2. D |
        let score = Score::new(
            "volta",
            mono(10),
            vec![
                Marker::new(RepeatStart, 2),
                Marker::new(VoltaStart(1), 5),
                Marker::new(RepeatEnd, 7),
                Marker::new(VoltaEnd, 7),
                Marker::new(VoltaStart(2), 7),
                Marker::new(VoltaEnd, 10),
            ],
        )
        .unwrap();
        assert_eq!(
            ranges(&segment_score(&score).unwrap()),
            vec![
                ("A".into(), 0, 1),
                ("B".into(), 2, 4),
                ("C".into(), 5, 6),
                ("D".into(), 7, 9)
            ]
        );
        let layout = score.layout().unwrap();
        assert_eq!(layout.repeats.len(), 1);
        assert!(layout.repeats[0].first_ending.is_some());
        assert!(layout.repeats[0].final_ending.is_some());
    }
}
