//! Line-oriented, tab-separated file formats and the corpus directory store.
//!
//! All files are UTF-8 with LF line endings. Tags, forms and annotator ids
//! may not contain tab, newline or `|`; there is no escaping. Numbers are
//! written in the shortest form that parses back to the same `f64`.

mod annotations;
mod corpus;
mod document;
mod tagset;
pub(crate) mod text;

pub use annotations::{
    canonical_key, format_entries, format_record_row, parse_annotation_log, parse_annotations, parse_entries,
    parse_record_row, serialize_annotations, AnnotationContext, AnnotationLog,
};
pub use corpus::{
    layer_file_name, CorpusBundle, CorpusDir, ImportMode, ImportOptions, LoadedCorpus, Origin, Source, WriteLock,
};
pub use document::{parse_document, serialize_document};
pub use tagset::{parse_scale, parse_tagset, serialize_scale, serialize_tagset};
pub use text::{format_number, parse_number};
