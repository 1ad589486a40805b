//! Uncertainty calculi over finite tag frames: probability, possibility,
//! fuzzy and rough sets, and the reading of ordinal plausibility judgments.
//!
//! All values are immutable; every operation is a pure function of its
//! arguments and is safe to call from any thread.

mod frame;
mod fuzzy;
mod measure;
mod ordinal;
mod rough;

pub use frame::{Frame, TagSubset, World};
pub use fuzzy::{FuzzyOp, FuzzyTagSet};
pub use measure::{entropy, CombineMode, PossibilityDistribution, ProbabilityDistribution};
pub use ordinal::{OrdinalScale, ScaleLevel};
pub use rough::{IndiscernibilityPartition, RoughTagSet};

/// Absolute tolerance for comparing degrees.
pub const TOLERANCE: f64 = 1e-9;

impl PossibilityDistribution {
    /// See [`OrdinalScale::to_possibility`].
    pub fn from_ordinal<'a, I>(frame: &std::sync::Arc<Frame>, entries: I, scale: &OrdinalScale) -> crate::Result<Self>
    where
        I: IntoIterator<Item = (&'a str, u32)>,
    {
        scale.to_possibility(frame, entries)
    }
}
