//! Documents, versioned tag sets, annotation records and the case grid.

mod case;
mod document;
mod record;
mod tagset;
mod validate;

pub use case::{case_for, classify_case, to_possibility, CaseId};
pub use document::{DocDate, Document, Token};
pub use record::{AnnotationRecord, Entry, GtMode, Payload, Style, Target, UncertaintySource};
pub use tagset::{Layer, TagEntry, TagSet};
pub use validate::{validate_record, validate_target, Diagnostic, DiagnosticCode};
