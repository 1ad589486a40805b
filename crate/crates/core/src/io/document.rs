use std::fmt::Write;

use super::text::{check_field, directive, numbered_lines, parse_index};
use crate::annotation::{DocDate, Document};
use crate::error::{Error, Result};

/// Parses a document file: optional `#doc=` / `#date=` headers, then
/// `INDEX<TAB>FORM` rows with blank lines between sentences.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut doc_id = String::new();
    let mut date = None;
    let mut sentences: Vec<Vec<String>> = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut expected = 0usize;
    let mut in_body = false;

    for (line_no, line) in numbered_lines(text) {
        if line.is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            if in_body {
                return Err(Error::parse(line_no, "headers must precede the tokens"));
            }
            match directive(line) {
                Some(("doc", id)) => {
                    check_field(id, line_no, "document id")?;
                    doc_id = id.to_string();
                }
                Some(("date", value)) => {
                    date = Some(DocDate::parse(value).map_err(|e| Error::parse(line_no, e.to_string()))?);
                }
                _ => return Err(Error::parse(line_no, format!("unknown header `{line}`"))),
            }
            continue;
        }
        in_body = true;
        let (index, form) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(line_no, "expected INDEX<TAB>FORM"))?;
        let index = parse_index(index, line_no, "token index")?;
        check_field(form, line_no, "token form")?;
        if index != expected {
            return Err(Error::NonContiguousIndex {
                line: line_no,
                expected,
                found: index,
            });
        }
        expected += 1;
        current.push(form.to_string());
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Document::new(doc_id, date, sentences)
}

pub fn serialize_document(document: &Document) -> String {
    let mut out = String::new();
    if !document.doc_id.is_empty() {
        let _ = writeln!(out, "#doc={}", document.doc_id);
    }
    if let Some(date) = &document.date {
        let _ = writeln!(out, "#date={date}");
    }
    for sentence in document.sentences() {
        for token in sentence {
            let _ = writeln!(out, "{}\t{}", token.index, token.form);
        }
        out.push('\n');
    }
    out
}
