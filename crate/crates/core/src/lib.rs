//! Uncertainty-aware corpus annotation.
//!
//! The crate covers four layers:
//!
//! * [`uncertainty`]: probability, possibility, fuzzy and rough-set calculi
//!   over finite tag frames, plus ordinal plausibility scales.
//! * [`annotation`]: documents, versioned tag sets, annotation records in
//!   precise, set-valued, distributional and ordinal styles, and the
//!   ten-case grid of world assumption × ground truth × style.
//! * [`io`] and [`aggregation`]: the tab-separated corpus formats, the
//!   corpus directory store, and multi-annotator fusion.
//! * [`tagger`]: a first-order HMM trained by constrained EM from uncertain
//!   labels, with entropy-ranked review queues.

pub mod aggregation;
pub mod annotation;
pub mod error;
pub mod io;
pub mod synthetic;
pub mod tagger;
pub mod uncertainty;

pub use error::{Error, Result};
