//! Stand-off annotation rows.
//!
//! ```text
//! DOC  LAYER  START  END  ANNOTATOR  GT_MODE  STYLE  ENTRIES  [SOURCE]  [#key=value ...]
//! ```
//!
//! Entries are `|`-separated; `TAG/RANK` for ordinal records, `TAG:DEGREE`
//! for distributional ones, bare tags otherwise. A line `#tombstone=N`
//! retracts the N-th record row (0-based) of the same file.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use super::text::{check_field, directive, format_number, numbered_lines, parse_index, parse_number};
use crate::annotation::{AnnotationRecord, Entry, GtMode, Layer, Payload, Style, TagSet, Target, UncertaintySource};
use crate::error::{Error, Result};
use crate::uncertainty::World;

/// Parses the ENTRIES column for a given style.
pub fn parse_entries(text: &str, style: Style, line: usize) -> Result<Vec<Entry>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split('|')
        .map(|item| {
            let entry = match style {
                Style::PreciseTag | Style::SetValued => Entry::tag(item),
                Style::Distributional => {
                    let (tag, degree) = item
                        .rsplit_once(':')
                        .ok_or_else(|| Error::parse(line, format!("`{item}` is not TAG:DEGREE")))?;
                    Entry::degree(tag, parse_number(degree, line)?)
                }
                Style::Ordinal => {
                    let (tag, rank) = item
                        .rsplit_once('/')
                        .ok_or_else(|| Error::parse(line, format!("`{item}` is not TAG/RANK")))?;
                    let rank = parse_index(rank, line, "rank")?;
                    let rank = u32::try_from(rank).map_err(|_| Error::parse(line, "rank out of range"))?;
                    Entry::rank(tag, rank)
                }
            };
            check_field(&entry.tag, line, "tag")?;
            if entry.tag.contains([':', '/']) {
                return Err(Error::parse(line, format!("tag `{}` contains `:` or `/`", entry.tag)));
            }
            Ok(entry)
        })
        .collect()
}

pub fn format_entries(entries: &[Entry]) -> String {
    let mut out = String::new();
    for (i, entry) in entries.iter().enumerate() {
        if i > 0 {
            out.push('|');
        }
        out.push_str(&entry.tag);
        match entry.payload {
            Payload::None => {}
            Payload::Degree(d) => {
                out.push(':');
                out.push_str(&format_number(d));
            }
            Payload::Rank(r) => {
                let _ = write!(out, "/{r}");
            }
        }
    }
    out
}

fn parse_keyword<T: std::str::FromStr<Err = String>>(text: &str, line: usize) -> Result<T> {
    text.parse().map_err(|e: String| Error::parse(line, e))
}

/// Parses a single annotation row (no tombstones).
pub fn parse_record_row(line_text: &str, line: usize) -> Result<AnnotationRecord> {
    let fields: Vec<&str> = line_text.split('\t').collect();
    if fields.len() < 8 {
        return Err(Error::parse(
            line,
            format!("expected at least 8 tab-separated columns, found {}", fields.len()),
        ));
    }
    let doc_id = fields[0];
    check_field(doc_id, line, "document id")?;
    let layer: Layer = parse_keyword(fields[1], line)?;
    let start = parse_index(fields[2], line, "start")?;
    let end = parse_index(fields[3], line, "end")?;
    let annotator = fields[4];
    check_field(annotator, line, "annotator")?;
    let gt_mode: GtMode = parse_keyword(fields[5], line)?;
    let style: Style = parse_keyword(fields[6], line)?;
    let entries = parse_entries(fields[7], style, line)?;

    let mut record = AnnotationRecord::new(
        Target::span(doc_id, start, end),
        layer,
        annotator,
        gt_mode,
        style,
        entries,
    );
    let mut rest = fields[8..].iter().peekable();
    if let Some(source) = rest.next_if(|f| !f.starts_with('#')) {
        record.source = Some(parse_keyword::<UncertaintySource>(source, line)?);
    }
    for field in rest {
        let (key, value) =
            directive(field).ok_or_else(|| Error::parse(line, format!("unexpected column `{field}`")))?;
        if key.is_empty() || key.contains(['=', '#']) {
            return Err(Error::parse(line, format!("bad extension key `{key}`")));
        }
        let duplicate = if key == "ts" {
            record.timestamp.replace(value.to_string()).is_some()
        } else {
            record.extensions.insert(key.to_string(), value.to_string()).is_some()
        };
        if duplicate {
            return Err(Error::parse(line, format!("extension `{key}` given twice")));
        }
    }
    Ok(record)
}

pub fn format_record_row(record: &AnnotationRecord) -> String {
    let t = &record.target;
    let mut out = format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        t.doc_id,
        record.layer,
        t.start,
        t.end,
        record.annotator,
        record.gt_mode,
        record.style,
        format_entries(&record.entries)
    );
    if let Some(source) = record.source {
        let _ = write!(out, "\t{source}");
    }
    if let Some(ts) = &record.timestamp {
        let _ = write!(out, "\t#ts={ts}");
    }
    for (key, value) in &record.extensions {
        let _ = write!(out, "\t#{key}={value}");
    }
    out
}

/// A parsed annotation file with row provenance and retractions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationLog {
    /// `(line number, record)` per record row, in file order.
    pub rows: Vec<(usize, AnnotationRecord)>,
    /// Row sequence numbers retracted by tombstones.
    pub tombstones: Vec<usize>,
}

impl AnnotationLog {
    /// Records that have not been retracted, with their sequence number and line.
    pub fn live(&self) -> impl Iterator<Item = (usize, usize, &AnnotationRecord)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(seq, _)| !self.tombstones.contains(seq))
            .map(|(seq, (line, record))| (seq, *line, record))
    }
}

/// Syntax-only parse of an annotation file.
pub fn parse_annotation_log(text: &str) -> Result<AnnotationLog> {
    let mut log = AnnotationLog::default();
    for (line_no, line) in numbered_lines(text) {
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            match directive(line) {
                Some(("tombstone", seq)) => {
                    let seq = parse_index(seq, line_no, "tombstone")?;
                    if seq >= log.rows.len() {
                        return Err(Error::parse(
                            line_no,
                            format!("tombstone {seq} refers to no earlier row"),
                        ));
                    }
                    log.tombstones.push(seq);
                }
                _ => return Err(Error::parse(line_no, format!("unknown directive `{line}`"))),
            }
            continue;
        }
        log.rows.push((line_no, parse_record_row(line, line_no)?));
    }
    Ok(log)
}

/// What a strict parse resolves records against.
#[derive(Debug, Clone, Copy)]
pub struct AnnotationContext<'a> {
    /// Known documents and their token counts.
    pub documents: &'a HashMap<String, usize>,
    pub tagsets: &'a BTreeMap<Layer, TagSet>,
}

/// Parses an annotation file and resolves documents and closed-world tags.
pub fn parse_annotations(text: &str, context: AnnotationContext<'_>) -> Result<Vec<AnnotationRecord>> {
    let log = parse_annotation_log(text)?;
    let mut out = Vec::new();
    for (_, line, record) in log.live() {
        resolve(record, line, context)?;
        out.push(record.clone());
    }
    Ok(out)
}

pub(crate) fn resolve(record: &AnnotationRecord, line: usize, context: AnnotationContext<'_>) -> Result<()> {
    let tokens = context
        .documents
        .get(&record.target.doc_id)
        .ok_or_else(|| Error::UnknownDocument(record.target.doc_id.clone()))?;
    if record.target.end >= *tokens || record.target.start > record.target.end {
        return Err(Error::parse(
            line,
            format!("target {} is outside the document", record.target),
        ));
    }
    if let Some(tagset) = context.tagsets.get(&record.layer) {
        if tagset.world() == World::Closed {
            if let Some(tag) = record.tags().find(|t| !tagset.contains(t)) {
                return Err(Error::UnknownTag(tag.to_string()));
            }
        }
    }
    Ok(())
}

/// Sort key of the canonical record order.
pub fn canonical_key(record: &AnnotationRecord) -> (&str, usize, Layer, &str) {
    (
        record.target.doc_id.as_str(),
        record.target.start,
        record.layer,
        record.annotator.as_str(),
    )
}

/// Serializes records in canonical order (doc, start, layer, annotator);
/// records with equal keys keep their relative order.
pub fn serialize_annotations(records: &[AnnotationRecord]) -> String {
    let mut sorted: Vec<&AnnotationRecord> = records.iter().collect();
    sorted.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));
    let mut out = String::new();
    for record in sorted {
        out.push_str(&format_record_row(record));
        out.push('\n');
    }
    out
}
