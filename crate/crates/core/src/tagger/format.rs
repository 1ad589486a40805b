//! Model files and tagged-output rows.
//!
//! ```text
//! #format=gradtag-hmm/1
//! #world=closed
//! #frame_hash=…   #config=…   #config_hash=…   #seed=42
//! #iterations=…   #converged=true
//! [tags]          one tag per line, frame order
//! [vocabulary]    one form per line, column order (unknown classes implied)
//! [initial]       one tab-separated row
//! [transitions]   one row per tag
//! [emissions]     one row per tag
//! [trace]         ITERATION  LOG_LIKELIHOOD  OBJECTIVE
//! ```

use std::fmt::Write;

use super::model::{frame_hash, TaggerModel, TrainingMeta};
use super::tag::TaggedOutput;
use super::vocab::Vocabulary;
use crate::annotation::{AnnotationRecord, Entry, GtMode, Layer, Style, Target};
use crate::error::{Error, Result};
use crate::io::text::{directive, numbered_lines};
use crate::io::{format_number, format_record_row, parse_number};
use crate::uncertainty::{Frame, World};

const FORMAT: &str = "gradtag-hmm/1";

/// Annotator id of machine-produced rows.
pub const MACHINE_ANNOTATOR: &str = "machine";

fn row(values: &[f64]) -> String {
    values.iter().map(|v| format_number(*v)).collect::<Vec<_>>().join("\t")
}

pub fn serialize_model(model: &TaggerModel) -> String {
    let meta = &model.meta;
    let mut out = String::new();
    let _ = writeln!(out, "#format={FORMAT}");
    let _ = writeln!(out, "#world={}", model.frame.world());
    let _ = writeln!(out, "#frame_hash={}", frame_hash(&model.frame));
    let _ = writeln!(out, "#config={}", meta.config);
    let _ = writeln!(out, "#config_hash={}", meta.config_hash);
    let _ = writeln!(out, "#seed={}", meta.seed);
    let _ = writeln!(out, "#iterations={}", meta.iterations);
    let _ = writeln!(out, "#converged={}", meta.converged);
    out.push_str("[tags]\n");
    for tag in model.frame.elements() {
        let _ = writeln!(out, "{tag}");
    }
    out.push_str("[vocabulary]\n");
    for word in model.vocabulary.words() {
        let _ = writeln!(out, "{word}");
    }
    out.push_str("[initial]\n");
    let _ = writeln!(out, "{}", row(&model.initial));
    out.push_str("[transitions]\n");
    for r in &model.transitions {
        let _ = writeln!(out, "{}", row(r));
    }
    out.push_str("[emissions]\n");
    for r in &model.emissions {
        let _ = writeln!(out, "{}", row(r));
    }
    out.push_str("[trace]\n");
    for (i, (ll, obj)) in meta.log_likelihood_trace.iter().zip(&meta.objective_trace).enumerate() {
        let _ = writeln!(out, "{i}\t{}\t{}", format_number(*ll), format_number(*obj));
    }
    out
}

fn parse_row(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split('\t').map(|v| parse_number(v, line)).collect()
}

pub fn parse_model(text: &str) -> Result<TaggerModel> {
    let mut headers = std::collections::BTreeMap::new();
    let mut section: Option<&str> = None;
    let mut tags = Vec::new();
    let mut words = Vec::new();
    let mut initial = None;
    let mut transitions = Vec::new();
    let mut emissions = Vec::new();
    let mut trace = Vec::new();
    for (line, content) in numbered_lines(text) {
        if let Some(name) = content.strip_prefix('[').and_then(|c| c.strip_suffix(']')) {
            section = Some(name);
            continue;
        }
        match section {
            None => {
                let (key, value) =
                    directive(content).ok_or_else(|| Error::parse(line, "expected a `#key=value` header"))?;
                headers.insert(key.to_string(), (line, value.to_string()));
            }
            Some("tags") => tags.push(content.to_string()),
            Some("vocabulary") => words.push(content.to_string()),
            Some("initial") => {
                if initial.replace(parse_row(content, line)?).is_some() {
                    return Err(Error::parse(line, "second initial row"));
                }
            }
            Some("transitions") => transitions.push(parse_row(content, line)?),
            Some("emissions") => emissions.push(parse_row(content, line)?),
            Some("trace") => {
                let fields: Vec<&str> = content.split('\t').collect();
                if fields.len() != 3 {
                    return Err(Error::parse(line, "trace rows have three columns"));
                }
                trace.push((parse_number(fields[1], line)?, parse_number(fields[2], line)?));
            }
            Some(other) => return Err(Error::parse(line, format!("unknown section [{other}]"))),
        }
    }
    let header = |key: &str| -> Result<&(usize, String)> {
        headers
            .get(key)
            .ok_or_else(|| Error::parse(1, format!("missing `#{key}=` header")))
    };
    let (line, format) = header("format")?;
    if format != FORMAT {
        return Err(Error::parse(*line, format!("unsupported model format `{format}`")));
    }
    let (line, world) = header("world")?;
    let world = match world.as_str() {
        "closed" => World::Closed,
        "open" => World::Open,
        other => return Err(Error::parse(*line, format!("unknown world `{other}`"))),
    };
    let frame = Frame::new(tags, world)?.into_shared();
    let (line, hash) = header("frame_hash")?;
    if *hash != frame_hash(&frame) {
        return Err(Error::parse(*line, "frame hash does not match the [tags] section"));
    }
    let number = |key: &str| -> Result<u64> {
        let (line, value) = header(key)?;
        value
            .parse()
            .map_err(|_| Error::parse(*line, format!("`{key}` is not an integer")))
    };
    let (line, converged) = header("converged")?;
    let converged = match converged.as_str() {
        "true" => true,
        "false" => false,
        _ => return Err(Error::parse(*line, "`converged` must be true or false")),
    };
    let initial = initial.ok_or_else(|| Error::parse(1, "missing [initial] section"))?;
    let mut model = TaggerModel::from_parameters(frame, Vocabulary::new(words), initial, transitions, emissions)?;
    model.meta = TrainingMeta {
        iterations: number("iterations")? as usize,
        converged,
        log_likelihood_trace: trace.iter().map(|t| t.0).collect(),
        objective_trace: trace.iter().map(|t| t.1).collect(),
        config: header("config")?.1.clone(),
        config_hash: header("config_hash")?.1.clone(),
        seed: number("seed")?,
    };
    Ok(model)
}

/// Tagger output as annotation records: one distributional POS record per
/// token from annotator `machine`, with `#entropy`, `#viterbi` and, when
/// flagged, `#outside=1` extension columns.
pub fn output_records(output: &TaggedOutput) -> Vec<AnnotationRecord> {
    output
        .tokens
        .iter()
        .map(|token| {
            let frame = token.posterior.frame();
            let entries = token
                .posterior
                .weights()
                .iter()
                .enumerate()
                .map(|(i, p)| Entry::degree(frame.tag(i), *p))
                .collect();
            let mut record = AnnotationRecord::new(
                Target::token(output.doc_id.clone(), token.index),
                Layer::Pos,
                MACHINE_ANNOTATOR,
                GtMode::Unknown,
                Style::Distributional,
                entries,
            );
            record.extensions.insert("entropy".into(), format_number(token.entropy));
            record.extensions.insert("viterbi".into(), token.best_tag.clone());
            if token.possibly_outside {
                record.extensions.insert("outside".into(), "1".into());
            }
            record
        })
        .collect()
}

/// Annotation-file text for several outputs, in the given document order.
pub fn serialize_outputs(outputs: &[TaggedOutput]) -> String {
    let mut out = String::new();
    for output in outputs {
        for record in output_records(output) {
            out.push_str(&format_record_row(&record));
            out.push('\n');
        }
    }
    out
}
