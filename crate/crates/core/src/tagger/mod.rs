//! Machine annotator: a first-order HMM over a POS frame, trained by
//! constrained Baum-Welch from uncertain annotations.
//!
//! Each token's annotation becomes a vector of constraint degrees over the
//! frame (one-hot, 0/1 mask or possibility degrees; all ones when
//! unannotated) which multiplies the emission term in the E-step as soft
//! evidence. Re-estimation uses add-λ smoothing, so every parameter stays
//! strictly positive.

mod eval;
mod format;
mod inference;
mod model;
mod review;
mod tag;
mod train;
mod vocab;

pub use eval::{best_one_to_one_accuracy, evaluate, majority_baseline, EvalMetrics};
pub use format::{output_records, parse_model, serialize_model, serialize_outputs, MACHINE_ANNOTATOR};
pub use inference::{ExpectedCounts, SentencePosterior};
pub use model::{frame_hash, TaggerModel, TrainConfig, TrainingMeta};
pub use review::{review_queue, ReviewItem};
pub use tag::{tag_document, TaggedOutput, TaggedToken, OPEN_WORLD_THRESHOLD};
pub use train::{
    build_constraints, expected_counts, log_prior, maximize, train, train_from, train_on, TrainingData,
    TrainingSentence, ZeroMask,
};
pub use vocab::{UnknownClass, Vocabulary};
