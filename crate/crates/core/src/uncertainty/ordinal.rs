use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::frame::{Frame, World};
use super::measure::PossibilityDistribution;
use crate::error::{Error, Result};

/// One level of an ordinal plausibility scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLevel {
    pub rank: u32,
    pub label: String,
    pub degree: f64,
}

/// Ordered plausibility levels with their numeric reading.
///
/// Ranks run 1..=n; the lowest rank reads as 0 and the highest as 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalScale {
    levels: Vec<ScaleLevel>,
}

impl Default for OrdinalScale {
    fn default() -> Self {
        let labels = [
            "definitely excluded",
            "may apply, but unlikely",
            "not unplausible",
            "completely plausible",
        ];
        OrdinalScale {
            levels: labels
                .iter()
                .enumerate()
                .map(|(i, label)| ScaleLevel {
                    rank: i as u32 + 1,
                    label: (*label).to_string(),
                    degree: i as f64 / 3.0,
                })
                .collect(),
        }
    }
}

impl OrdinalScale {
    pub fn new(levels: Vec<ScaleLevel>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidScale("at least two levels are required".into()));
        }
        for (i, level) in levels.iter().enumerate() {
            if level.rank as usize != i + 1 {
                return Err(Error::InvalidScale(format!(
                    "ranks must be consecutive from 1, found {} at position {}",
                    level.rank,
                    i + 1
                )));
            }
            if !level.degree.is_finite() {
                return Err(Error::InvalidScale(format!("rank {} has no finite degree", level.rank)));
            }
        }
        if levels.windows(2).any(|w| w[1].degree <= w[0].degree) {
            return Err(Error::InvalidScale("degrees must be strictly increasing".into()));
        }
        if levels[0].degree != 0.0 || levels[levels.len() - 1].degree != 1.0 {
            return Err(Error::InvalidScale("lowest rank must map to 0 and highest to 1".into()));
        }
        Ok(OrdinalScale { levels })
    }

    pub fn levels(&self) -> &[ScaleLevel] {
        &self.levels
    }

    pub fn top_rank(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn is_valid_rank(&self, rank: u32) -> bool {
        rank >= 1 && rank <= self.top_rank()
    }

    pub fn degree(&self, rank: u32) -> Result<f64> {
        if self.is_valid_rank(rank) {
            Ok(self.levels[rank as usize - 1].degree)
        } else {
            Err(Error::UnknownRank(rank))
        }
    }

    /// Reads `(tag, rank)` judgments as a possibility distribution.
    ///
    /// Unlisted tags take the lowest rank. The result is not renormalized, so
    /// an annotation without a top-rank entry stays subnormal.
    pub fn to_possibility<'a, I>(&self, frame: &Arc<Frame>, entries: I) -> Result<PossibilityDistribution>
    where
        I: IntoIterator<Item = (&'a str, u32)>,
    {
        let mut degrees = vec![self.levels[0].degree; frame.len()];
        for (tag, rank) in entries {
            let position = frame.require(tag)?;
            degrees[position] = self.degree(rank)?;
        }
        if frame.world() == World::Closed && degrees.iter().all(|&d| d == 0.0) {
            return Err(Error::EmptyConstraint);
        }
        PossibilityDistribution::from_degrees(frame, degrees)
    }
}
