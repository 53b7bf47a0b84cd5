//! Score JSON:
//! `{"name": .., "onsets": [[pitch, ..], ..], "markers": [{"kind": .., "position": .., "number": ..}]}`
//! where `number` appears only on `VoltaStart`.

use serde::{Deserialize, Serialize};

use super::{Marker, MarkerKind, Score};
use crate::error::{Error, ValidationError};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreDoc {
    name: String,
    onsets: Vec<Vec<i64>>,
    #[serde(default)]
    markers: Vec<MarkerDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkerDoc {
    kind: String,
    position: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    number: Option<i64>,
}

fn kind_from_name(name: &str, number: Option<u32>) -> Option<MarkerKind> {
    Some(match name {
        "RepeatStart" => MarkerKind::RepeatStart,
        "RepeatEnd" => MarkerKind::RepeatEnd,
        "VoltaStart" => MarkerKind::VoltaStart(number?),
        "VoltaEnd" => MarkerKind::VoltaEnd,
        "Segno" => MarkerKind::Segno,
        "Fine" => MarkerKind::Fine,
        "CodaSign" => MarkerKind::CodaSign,
        "ToCoda" => MarkerKind::ToCoda,
        "DaCapoAlFine" => MarkerKind::DaCapoAlFine,
        "DaCapoAlCoda" => MarkerKind::DaCapoAlCoda,
        "DalSegnoAlFine" => MarkerKind::DalSegnoAlFine,
        "DalSegnoAlCoda" => MarkerKind::DalSegnoAlCoda,
        _ => return None,
    })
}

impl TryFrom<ScoreDoc> for Score {
    type Error = ValidationError;

    fn try_from(doc: ScoreDoc) -> Result<Self, ValidationError> {
        let mut onsets = Vec::with_capacity(doc.onsets.len());
        for (i, pitches) in doc.onsets.iter().enumerate() {
            let converted = pitches
                .iter()
                .enumerate()
                .map(|(k, &p)| {
                    u8::try_from(p).ok().filter(|&p| p <= 127).ok_or_else(|| {
                        ValidationError::new(
                            format!("onsets[{i}][{k}]"),
                            format!("pitch {p} outside 0..=127"),
                        )
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            onsets.push(converted);
        }
        let mut markers = Vec::with_capacity(doc.markers.len());
        for (i, m) in doc.markers.iter().enumerate() {
            let field = |f: &str| format!("markers[{i}].{f}");
            let number = match (m.kind.as_str(), m.number) {
                ("VoltaStart", Some(n)) => {
                    Some(u32::try_from(n).ok().filter(|&n| n > 0).ok_or_else(|| {
                        ValidationError::new(
                            field("number"),
                            format!("volta number {n} is not positive"),
                        )
                    })?)
                }
                ("VoltaStart", None) => {
                    return Err(ValidationError::new(
                        field("number"),
                        "VoltaStart needs a number",
                    ))
                }
                (_, Some(_)) => {
                    return Err(ValidationError::new(
                        field("number"),
                        format!("'number' is only allowed on VoltaStart, not {}", m.kind),
                    ))
                }
                (_, None) => None,
            };
            let kind = kind_from_name(&m.kind, number).ok_or_else(|| {
                ValidationError::new(field("kind"), format!("unknown marker kind '{}'", m.kind))
            })?;
            let position = usize::try_from(m.position)
                .map_err(|_| ValidationError::new(field("position"), "negative position"))?;
            markers.push(Marker::new(kind, position));
        }
        Score::new(doc.name, onsets, markers)
    }
}

impl From<&Score> for ScoreDoc {
    fn from(score: &Score) -> Self {
        ScoreDoc {
            name: score.name.clone(),
            onsets: score
                .onsets
                .iter()
                .map(|o| o.pitches.iter().map(i64::from).collect())
                .collect(),
            markers: score
                .markers
                .iter()
                .map(|m| MarkerDoc {
                    kind: m.kind.name().to_string(),
                    position: m.position as i64,
                    number: match m.kind {
                        MarkerKind::VoltaStart(n) => Some(i64::from(n)),
                        _ => None,
                    },
                })
                .collect(),
        }
    }
}

impl Score {
    pub fn from_json(text: &str) -> Result<Score, Error> {
        let doc: ScoreDoc = serde_json::from_str(text)?;
        Ok(Score::try_from(doc)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScoreDoc::from(self)).expect("score serializes")
    }
}
