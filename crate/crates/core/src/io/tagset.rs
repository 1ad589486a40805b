use std::fmt::Write;

use super::text::{check_field, directive, format_number, numbered_lines, parse_index, parse_number};
use crate::annotation::{DocDate, Layer, TagSet};
use crate::error::{Error, Result};
use crate::uncertainty::{OrdinalScale, ScaleLevel, World};

/// Parses a tag set file.
///
/// Headers `#layer=POS|Construction` and `#world=open|closed` are required.
/// Rows are `TAG<TAB>DESCRIPTION[<TAB>DATE]`; versions follow row order.
pub fn parse_tagset(text: &str) -> Result<TagSet> {
    let mut layer = None;
    let mut world = None;
    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line_no, line) in numbered_lines(text) {
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if !rows.is_empty() {
                return Err(Error::parse(line_no, "headers must precede the tag rows"));
            }
            match directive(line) {
                Some(("layer", value)) => {
                    layer = Some(value.parse::<Layer>().map_err(|e| Error::parse(line_no, e))?);
                }
                Some(("world", "open")) => world = Some(World::Open),
                Some(("world", "closed")) => world = Some(World::Closed),
                _ => return Err(Error::parse(line_no, format!("unknown header `{line}`"))),
            }
            continue;
        }
        let mut fields = line.split('\t');
        let tag = fields.next().unwrap_or_default();
        check_field(tag, line_no, "tag")?;
        if tag.contains([':', '/']) {
            return Err(Error::parse(line_no, format!("tag `{tag}` contains `:` or `/`")));
        }
        let description = fields
            .next()
            .ok_or_else(|| Error::parse(line_no, "expected TAG<TAB>DESCRIPTION"))?;
        let date = match fields.next() {
            Some(d) => Some(
                DocDate::parse(d)
                    .map_err(|e| Error::parse(line_no, e.to_string()))?
                    .to_string(),
            ),
            None => None,
        };
        if fields.next().is_some() {
            return Err(Error::parse(line_no, "too many columns"));
        }
        if !seen.insert(tag.to_string()) {
            return Err(Error::DuplicateTag(tag.to_string()));
        }
        rows.push((tag.to_string(), description.to_string(), date));
    }
    let layer = layer.ok_or_else(|| Error::parse(1, "missing #layer header"))?;
    let world = world.ok_or_else(|| Error::parse(1, "missing #world header"))?;
    TagSet::new(layer, world, rows)
}

pub fn serialize_tagset(tagset: &TagSet) -> String {
    let mut out = format!("#layer={}\n#world={}\n", tagset.layer(), tagset.world());
    for entry in tagset.entries() {
        let _ = write!(out, "{}\t{}", entry.tag, entry.description);
        if let Some(date) = &entry.added_date {
            let _ = write!(out, "\t{date}");
        }
        out.push('\n');
    }
    out
}

/// Parses `RANK<TAB>LABEL<TAB>DEGREE` rows.
pub fn parse_scale(text: &str) -> Result<OrdinalScale> {
    let mut levels = Vec::new();
    let mut last_line = 1;
    for (line_no, line) in numbered_lines(text) {
        last_line = line_no;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [rank, label, degree] = fields[..] else {
            return Err(Error::parse(line_no, "expected RANK<TAB>LABEL<TAB>DEGREE"));
        };
        let rank = parse_index(rank, line_no, "rank")?;
        let rank = u32::try_from(rank).map_err(|_| Error::parse(line_no, "rank out of range"))?;
        if label.is_empty() || label.contains(['\n', '\r']) {
            return Err(Error::parse(line_no, "invalid level label"));
        }
        levels.push(ScaleLevel {
            rank,
            label: label.to_string(),
            degree: parse_number(degree, line_no)?,
        });
    }
    OrdinalScale::new(levels).map_err(|e| Error::parse(last_line, e.to_string()))
}

pub fn serialize_scale(scale: &OrdinalScale) -> String {
    let mut out = String::new();
    for level in scale.levels() {
        let _ = writeln!(out, "{}\t{}\t{}", level.rank, level.label, format_number(level.degree));
    }
    out
}
