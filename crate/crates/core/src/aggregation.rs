//! Fusion of several annotators' records on one target, and corpus-wide
//! conflict reporting.

use std::collections::BTreeMap;
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{classify_case, to_possibility, AnnotationRecord, CaseId, GtMode, Layer, TagSet, Target};
use crate::error::{Error, Result};
use crate::io::{format_number, CorpusBundle};
use crate::uncertainty::{CombineMode, OrdinalScale, PossibilityDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GtConsensus {
    Precise,
    Graded,
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub target: Target,
    pub layer: Layer,
    pub combined: PossibilityDistribution,
    /// One minus the height of the conjunctive fusion, whatever `mode` was used.
    pub conflict: f64,
    /// Sorted, de-duplicated annotator ids.
    pub contributing: Vec<String>,
    pub gt_mode_consensus: GtConsensus,
}

/// Fuses records that share a target and layer.
///
/// `GtMode::Unknown` counts as precise when forming the consensus.
pub fn aggregate_target(
    records: &[&AnnotationRecord],
    tagset: &TagSet,
    scale: &OrdinalScale,
    mode: CombineMode,
) -> Result<AggregateResult> {
    let first = records.first().ok_or(Error::EmptyInput)?;
    if records
        .iter()
        .any(|r| r.target != first.target || r.layer != first.layer)
    {
        return Err(Error::TargetMismatch);
    }
    let mut combined = to_possibility(first, tagset, scale)?;
    let mut conjunction = combined.clone();
    for record in &records[1..] {
        let next = to_possibility(record, tagset, scale)?;
        conjunction = conjunction.combine(&next, CombineMode::Conjunctive)?.0;
        if mode == CombineMode::Disjunctive {
            combined = combined.combine(&next, CombineMode::Disjunctive)?.0;
        }
    }
    if mode == CombineMode::Conjunctive {
        combined = conjunction.clone();
    }
    let mut contributing: Vec<String> = records.iter().map(|r| r.annotator.clone()).collect();
    contributing.sort();
    contributing.dedup();
    let graded = |r: &&&AnnotationRecord| r.gt_mode == GtMode::Graded;
    let gt_mode_consensus = if records.iter().all(|r| graded(&r)) {
        GtConsensus::Graded
    } else if records.iter().any(|r| graded(&r)) {
        GtConsensus::Mixed
    } else {
        GtConsensus::Precise
    };
    Ok(AggregateResult {
        target: first.target.clone(),
        layer: first.layer,
        conflict: 1.0 - conjunction.height(),
        combined,
        contributing,
        gt_mode_consensus,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConflictRow {
    pub target: Target,
    pub layer: Layer,
    pub conflict: f64,
    /// Case of each contributing record, in record order.
    pub cases: Vec<CaseId>,
    pub annotators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConflictReport {
    pub rows: Vec<ConflictRow>,
    /// `(year, graded-ground-truth record count)` over dated documents.
    pub graded_by_year: Vec<(i32, usize)>,
    /// Multiply-annotated targets left out because a record failed to convert.
    pub skipped: Vec<(Target, Layer, String)>,
}

/// Groups the bundle's records by (target, layer).
pub fn group_by_target(bundle: &CorpusBundle) -> BTreeMap<(Target, Layer), Vec<&AnnotationRecord>> {
    let mut groups: BTreeMap<(Target, Layer), Vec<&AnnotationRecord>> = BTreeMap::new();
    for record in &bundle.annotations {
        groups
            .entry((record.target.clone(), record.layer))
            .or_default()
            .push(record);
    }
    groups
}

/// One row per target annotated more than once, most conflicting first.
pub fn corpus_conflict_report(bundle: &CorpusBundle, mode: CombineMode) -> ConflictReport {
    let groups: Vec<_> = group_by_target(bundle)
        .into_iter()
        .filter(|(_, records)| records.len() > 1)
        .collect();

    let outcomes: Vec<std::result::Result<ConflictRow, (Target, Layer, String)>> = groups
        .par_iter()
        .map(|((target, layer), records)| {
            let fail = |e: Error| (target.clone(), *layer, e.to_string());
            let tagset = bundle
                .tagset(*layer)
                .ok_or_else(|| fail(Error::InvalidRecord(format!("no tag set for layer {layer}"))))?;
            let aggregate = aggregate_target(records, tagset, &bundle.scale, mode).map_err(fail)?;
            let cases = records
                .iter()
                .map(|r| classify_case(r, tagset))
                .collect::<Result<Vec<_>>>()
                .map_err(fail)?;
            Ok(ConflictRow {
                target: target.clone(),
                layer: *layer,
                conflict: aggregate.conflict,
                cases,
                annotators: records.iter().map(|r| r.annotator.clone()).collect(),
            })
        })
        .collect();

    let mut report = ConflictReport::default();
    for outcome in outcomes {
        match outcome {
            Ok(row) => report.rows.push(row),
            Err(skipped) => report.skipped.push(skipped),
        }
    }
    let doc_order = |t: &Target| bundle.document_position(&t.doc_id).unwrap_or(usize::MAX);
    report.rows.sort_by(|a, b| {
        b.conflict
            .total_cmp(&a.conflict)
            .then_with(|| doc_order(&a.target).cmp(&doc_order(&b.target)))
            .then_with(|| (a.target.start, a.target.end, a.layer).cmp(&(b.target.start, b.target.end, b.layer)))
            .then_with(|| a.target.doc_id.cmp(&b.target.doc_id))
    });

    let mut by_year: BTreeMap<i32, usize> = BTreeMap::new();
    for record in &bundle.annotations {
        if record.gt_mode != GtMode::Graded {
            continue;
        }
        if let Some(date) = bundle.document(&record.target.doc_id).and_then(|d| d.date.as_ref()) {
            *by_year.entry(date.year()).or_default() += 1;
        }
    }
    report.graded_by_year = by_year.into_iter().collect();
    report
}

impl ConflictReport {
    /// Tab-separated rendering: the conflict table, a blank line, then the
    /// graded-ground-truth counts per year.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("DOC\tLAYER\tSTART\tEND\tCONFLICT\tCASES\tANNOTATORS\n");
        for row in &self.rows {
            let cases: Vec<String> = row.cases.iter().map(ToString::to_string).collect();
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                row.target.doc_id,
                row.layer,
                row.target.start,
                row.target.end,
                format_number(row.conflict),
                cases.join(","),
                row.annotators.join(",")
            );
        }
        out.push_str("\nYEAR\tGRADED\n");
        for (year, count) in &self.graded_by_year {
            let _ = writeln!(out, "{year}\t{count}");
        }
        out
    }
}
