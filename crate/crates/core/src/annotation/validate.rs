use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::document::Document;
use super::record::{AnnotationRecord, GtMode, Payload, Style, Target};
use super::tagset::{Layer, TagSet};
use crate::uncertainty::{OrdinalScale, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DiagnosticCode {
    EmptySetClosedWorld,
    UnknownTagClosedWorld,
    UnregisteredTag,
    DuplicateEntry,
    WrongEntryCount,
    PayloadMismatch,
    DegreeOutOfRange,
    UnknownRank,
    InvalidSpan,
    LayerMismatch,
    UnknownLayer,
    UnknownDocument,
    TargetOutOfRange,
    CrossesSentence,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::EmptySetClosedWorld => "EmptySetClosedWorld",
            DiagnosticCode::UnknownTagClosedWorld => "UnknownTagClosedWorld",
            DiagnosticCode::UnregisteredTag => "UnregisteredTag",
            DiagnosticCode::DuplicateEntry => "DuplicateEntry",
            DiagnosticCode::WrongEntryCount => "WrongEntryCount",
            DiagnosticCode::PayloadMismatch => "PayloadMismatch",
            DiagnosticCode::DegreeOutOfRange => "DegreeOutOfRange",
            DiagnosticCode::UnknownRank => "UnknownRank",
            DiagnosticCode::InvalidSpan => "InvalidSpan",
            DiagnosticCode::LayerMismatch => "LayerMismatch",
            DiagnosticCode::UnknownLayer => "UnknownLayer",
            DiagnosticCode::UnknownDocument => "UnknownDocument",
            DiagnosticCode::TargetOutOfRange => "TargetOutOfRange",
            DiagnosticCode::CrossesSentence => "CrossesSentence",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub target: Target,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.code, self.message, self.target)
    }
}

/// Checks a record against its tag set and the ordinal scale.
///
/// Returns an empty list iff the record is valid. Rank checks are skipped
/// when `scale` is `None`.
pub(crate) fn diagnose(record: &AnnotationRecord, tagset: &TagSet, scale: Option<&OrdinalScale>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut push = |code: DiagnosticCode, message: String| {
        out.push(Diagnostic {
            code,
            target: record.target.clone(),
            message,
        })
    };

    if record.layer != tagset.layer() {
        push(
            DiagnosticCode::LayerMismatch,
            format!(
                "record layer {} checked against the {} tag set",
                record.layer,
                tagset.layer()
            ),
        );
    }
    if record.target.start > record.target.end {
        push(
            DiagnosticCode::InvalidSpan,
            format!("start {} is after end {}", record.target.start, record.target.end),
        );
    } else if record.layer == Layer::Pos && !record.target.is_single_token() {
        push(
            DiagnosticCode::InvalidSpan,
            "POS-layer records must target a single token".into(),
        );
    }

    let closed = tagset.world() == World::Closed;
    let mut seen = HashSet::new();
    for entry in &record.entries {
        if !seen.insert(entry.tag.as_str()) {
            push(
                DiagnosticCode::DuplicateEntry,
                format!("tag `{}` is listed more than once", entry.tag),
            );
        }
        if !tagset.contains(&entry.tag) {
            if closed {
                push(
                    DiagnosticCode::UnknownTagClosedWorld,
                    format!("tag `{}` is not in the closed {} tag set", entry.tag, tagset.layer()),
                );
            } else {
                push(
                    DiagnosticCode::UnregisteredTag,
                    format!(
                        "tag `{}` must be registered in the open {} tag set first",
                        entry.tag,
                        tagset.layer()
                    ),
                );
            }
        }
        match (record.style, entry.payload) {
            (Style::PreciseTag | Style::SetValued, Payload::None) => {}
            (Style::Distributional, Payload::Degree(d)) => {
                if !(d.is_finite() && (0.0..=1.0).contains(&d)) {
                    push(
                        DiagnosticCode::DegreeOutOfRange,
                        format!("degree {d} for `{}` is outside [0, 1]", entry.tag),
                    );
                }
            }
            (Style::Ordinal, Payload::Rank(rank)) => {
                let valid = match scale {
                    Some(scale) => scale.is_valid_rank(rank),
                    None => rank >= 1,
                };
                if !valid {
                    push(
                        DiagnosticCode::UnknownRank,
                        format!("rank {rank} for `{}` is not on the scale", entry.tag),
                    );
                }
            }
            (style, _) => push(
                DiagnosticCode::PayloadMismatch,
                format!("entry `{}` has the wrong payload for style {style}", entry.tag),
            ),
        }
    }

    if record.style == Style::PreciseTag {
        let n = record.entries.len();
        let ok = match record.gt_mode {
            GtMode::Graded => n >= 1,
            GtMode::Precise | GtMode::Unknown => n == 1,
        };
        if !ok && (n > 0 || !closed) {
            push(
                DiagnosticCode::WrongEntryCount,
                format!(
                    "a precise-tag record with {} ground truth needs {}, found {n}",
                    record.gt_mode,
                    if record.gt_mode == GtMode::Graded {
                        "at least one entry"
                    } else {
                        "exactly one entry"
                    }
                ),
            );
        }
    }

    if closed && !has_plausible_entry(record, scale) {
        push(
            DiagnosticCode::EmptySetClosedWorld,
            "the empty set is excluded under the closed world assumption".into(),
        );
    }
    out
}

/// Whether any entry leaves its tag plausible (degree above the bottom level).
fn has_plausible_entry(record: &AnnotationRecord, scale: Option<&OrdinalScale>) -> bool {
    record.entries.iter().any(|e| match e.payload {
        Payload::None => true,
        Payload::Degree(d) => d > 0.0,
        Payload::Rank(rank) => match scale {
            Some(scale) => scale.degree(rank).map_or(true, |d| d > 0.0),
            None => rank > 1,
        },
    })
}

/// Validates a record against its layer's tag set and the ordinal scale.
pub fn validate_record(record: &AnnotationRecord, tagset: &TagSet, scale: &OrdinalScale) -> Vec<Diagnostic> {
    diagnose(record, tagset, Some(scale))
}

/// Checks that a record's target resolves inside `document`.
pub fn validate_target(record: &AnnotationRecord, document: Option<&Document>) -> Vec<Diagnostic> {
    let target = &record.target;
    let diagnostic = |code, message| {
        vec![Diagnostic {
            code,
            target: target.clone(),
            message,
        }]
    };
    let Some(document) = document else {
        return diagnostic(
            DiagnosticCode::UnknownDocument,
            format!("document `{}` does not exist", target.doc_id),
        );
    };
    if target.start > target.end {
        return Vec::new();
    }
    match (document.sentence_of(target.start), document.sentence_of(target.end)) {
        (Some(a), Some(b)) if a == b => Vec::new(),
        (Some(_), Some(_)) => diagnostic(
            DiagnosticCode::CrossesSentence,
            "spans may not cross sentence boundaries".into(),
        ),
        _ => diagnostic(
            DiagnosticCode::TargetOutOfRange,
            format!(
                "tokens {}..={} are outside document `{}` ({} tokens)",
                target.start,
                target.end,
                document.doc_id,
                document.token_count()
            ),
        ),
    }
}
