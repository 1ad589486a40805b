use std::fmt;

use serde::{Deserialize, Serialize};

use super::record::{AnnotationRecord, GtMode, Payload, Style};
use super::tagset::TagSet;
use super::validate::diagnose;
use crate::error::{Error, Result};
use crate::uncertainty::{OrdinalScale, PossibilityDistribution, TagSubset, World};

/// One of the ten combinations of world assumption, ground-truth kind and
/// annotation style.
///
/// | world  | ground truth | precise tag | set-valued | distributional / ordinal |
/// |--------|--------------|-------------|------------|--------------------------|
/// | closed | precise      | 1           | 2          | 3                        |
/// | closed | graded       | 4           | 5          | 5                        |
/// | open   | precise      | 6           | 7          | 8                        |
/// | open   | graded       | 9           | 10         | 10                       |
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct CaseId(u8);

impl CaseId {
    pub fn new(value: u8) -> Result<CaseId> {
        if (1..=10).contains(&value) {
            Ok(CaseId(value))
        } else {
            Err(Error::InvalidRecord(format!("case id {value} is outside 1..=10")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn world(self) -> World {
        if self.0 <= 5 {
            World::Closed
        } else {
            World::Open
        }
    }

    pub fn graded(self) -> bool {
        matches!(self.0, 4 | 5 | 9 | 10)
    }
}

impl TryFrom<u8> for CaseId {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        CaseId::new(value)
    }
}

impl From<CaseId> for u8 {
    fn from(value: CaseId) -> Self {
        value.0
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pure grid lookup; `GtMode::Unknown` is read as precise ground truth.
pub fn case_for(world: World, gt_mode: GtMode, style: Style) -> CaseId {
    let graded = gt_mode == GtMode::Graded;
    let base = match (graded, style) {
        (false, Style::PreciseTag) => 1,
        (false, Style::SetValued) => 2,
        (false, Style::Distributional | Style::Ordinal) => 3,
        (true, Style::PreciseTag) => 4,
        (true, _) => 5,
    };
    CaseId(if world == World::Open { base + 5 } else { base })
}

fn ensure_valid(record: &AnnotationRecord, tagset: &TagSet, scale: Option<&OrdinalScale>) -> Result<()> {
    let diagnostics = diagnose(record, tagset, scale);
    if diagnostics.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidRecord(
            diagnostics
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; "),
        ))
    }
}

/// Classifies a valid record into its case.
pub fn classify_case(record: &AnnotationRecord, tagset: &TagSet) -> Result<CaseId> {
    ensure_valid(record, tagset, None)?;
    Ok(case_for(tagset.world(), record.gt_mode, record.style))
}

/// Reads any record style as a possibility distribution over its layer's frame.
pub fn to_possibility(
    record: &AnnotationRecord,
    tagset: &TagSet,
    scale: &OrdinalScale,
) -> Result<PossibilityDistribution> {
    ensure_valid(record, tagset, Some(scale))?;
    let frame = tagset.frame();
    match record.style {
        Style::PreciseTag | Style::SetValued => {
            PossibilityDistribution::from_set_constraint(&TagSubset::from_tags(frame, record.tags())?)
        }
        Style::Ordinal => scale.to_possibility(
            frame,
            record.entries.iter().map(|e| match e.payload {
                Payload::Rank(rank) => (e.tag.as_str(), rank),
                _ => unreachable!("validated ordinal payload"),
            }),
        ),
        Style::Distributional => PossibilityDistribution::new(
            frame,
            record.entries.iter().map(|e| match e.payload {
                Payload::Degree(d) => (e.tag.as_str(), d),
                _ => unreachable!("validated distributional payload"),
            }),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotation::record::{Entry, Target};
    use crate::annotation::tagset::Layer;

    fn tagset(layer: Layer, world: World, tags: &[&str]) -> TagSet {
        TagSet::new(layer, world, tags.iter().map(|t| (t.to_string(), String::new(), None))).unwrap()
    }

    fn pos() -> TagSet {
        tagset(Layer::Pos, World::Closed, &["DDS", "VKFIN", "VAFIN", "NA", "VVINF"])
    }

    fn rec(style: Style, gt: GtMode, entries: Vec<Entry>) -> AnnotationRecord {
        AnnotationRecord::new(Target::token("d1", 1), Layer::Pos, "ann1", gt, style, entries)
    }

    #[test]
    fn full_grid() {
        let styles = [
            Style::PreciseTag,
            Style::SetValued,
            Style::Distributional,
            Style::Ordinal,
        ];
        let expected = [
            (World::Closed, GtMode::Precise, [1, 2, 3, 3]),
            (World::Closed, GtMode::Unknown, [1, 2, 3, 3]),
            (World::Closed, GtMode::Graded, [4, 5, 5, 5]),
            (World::Open, GtMode::Precise, [6, 7, 8, 8]),
            (World::Open, GtMode::Unknown, [6, 7, 8, 8]),
            (World::Open, GtMode::Graded, [9, 10, 10, 10]),
        ];
        for (world, gt, cases) in expected {
            for (style, case) in styles.iter().zip(cases) {
                assert_eq!(case_for(world, gt, *style).value(), case, "{world} {gt} {style}");
            }
        }
    }

    #[test]
    fn closed_world_examples() {
        let ts = pos();
        let one = rec(Style::PreciseTag, GtMode::Precise, vec![Entry::tag("VKFIN")]);
        assert_eq!(classify_case(&one, &ts).unwrap().value(), 1);
        let two = rec(
            Style::SetValued,
            GtMode::Precise,
            vec![Entry::tag("VKFIN"), Entry::tag("VAFIN")],
        );
        assert_eq!(classify_case(&two, &ts).unwrap().value(), 2);
        let graded = rec(
            Style::PreciseTag,
            GtMode::Graded,
            vec![Entry::tag("VVINF"), Entry::tag("NA")],
        );
        assert_eq!(classify_case(&graded, &ts).unwrap().value(), 4);
        let graded_set = rec(
            Style::SetValued,
            GtMode::Graded,
            vec![Entry::tag("NA"), Entry::tag("VVINF")],
        );
        assert_eq!(classify_case(&graded_set, &ts).unwrap().value(), 5);
    }

    #[test]
    fn invalid_records_are_rejected() {
        let bad = rec(Style::PreciseTag, GtMode::Precise, vec![Entry::tag("XY")]);
        assert!(matches!(classify_case(&bad, &pos()), Err(Error::InvalidRecord(_))));
    }

    #[test]
    fn conversions() {
        let ts = tagset(Layer::Pos, World::Closed, &["A", "B", "VKFIN", "VAFIN"]);
        let scale = OrdinalScale::default();
        let set = rec(
            Style::SetValued,
            GtMode::Precise,
            vec![Entry::tag("VKFIN"), Entry::tag("VAFIN")],
        );
        assert_eq!(
            to_possibility(&set, &ts, &scale).unwrap().degrees(),
            [0.0, 0.0, 1.0, 1.0]
        );
        let ord = rec(
            Style::Ordinal,
            GtMode::Precise,
            vec![Entry::rank("A", 3), Entry::rank("B", 2)],
        );
        assert_eq!(
            to_possibility(&ord, &ts, &scale).unwrap().degrees(),
            [2.0 / 3.0, 1.0 / 3.0, 0.0, 0.0]
        );
        let dist = rec(
            Style::Distributional,
            GtMode::Precise,
            vec![Entry::degree("A", 0.9), Entry::degree("B", 0.1)],
        );
        assert_eq!(
            to_possibility(&dist, &ts, &scale).unwrap().degrees(),
            [0.9, 0.1, 0.0, 0.0]
        );
        let one = rec(Style::PreciseTag, GtMode::Precise, vec![Entry::tag("B")]);
        let d = to_possibility(&one, &ts, &scale).unwrap();
        assert_eq!(d.argmax().tags().collect::<Vec<_>>(), ["B"]);
    }
}
