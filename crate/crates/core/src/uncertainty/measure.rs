//! Additive (probability) and maxitive (possibility) degree assignments.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::frame::{same_frame, Frame, TagSubset};
use super::TOLERANCE;
use crate::error::{Error, Result};

fn check_degree(tag: &str, degree: f64) -> Result<()> {
    if degree.is_finite() && (0.0..=1.0).contains(&degree) {
        Ok(())
    } else {
        Err(Error::InvalidDistribution(format!(
            "degree {degree} for `{tag}` is outside [0, 1]"
        )))
    }
}

fn degrees_from_pairs<'a, I>(frame: &Frame, pairs: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = (&'a str, f64)>,
{
    let mut degrees = vec![0.0; frame.len()];
    for (tag, degree) in pairs {
        let position = frame.require(tag)?;
        check_degree(tag, degree)?;
        degrees[position] = degree;
    }
    Ok(degrees)
}

fn check_dense(frame: &Frame, degrees: &[f64]) -> Result<()> {
    if degrees.len() != frame.len() {
        return Err(Error::FrameMismatch);
    }
    for (position, &degree) in degrees.iter().enumerate() {
        check_degree(frame.tag(position), degree)?;
    }
    Ok(())
}

/// Additive measure over a frame; weights sum to one.
#[derive(Debug, Clone)]
pub struct ProbabilityDistribution {
    frame: Arc<Frame>,
    weights: Vec<f64>,
}

impl PartialEq for ProbabilityDistribution {
    fn eq(&self, other: &Self) -> bool {
        same_frame(&self.frame, &other.frame) && self.weights == other.weights
    }
}

impl ProbabilityDistribution {
    pub fn new<'a, I>(frame: &Arc<Frame>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let weights = degrees_from_pairs(frame, pairs)?;
        Self::from_weights(frame, weights)
    }

    pub fn from_weights(frame: &Arc<Frame>, weights: Vec<f64>) -> Result<Self> {
        check_dense(frame, &weights)?;
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(ProbabilityDistribution {
            frame: Arc::clone(frame),
            weights,
        })
    }

    /// Scales non-negative scores so they sum to one.
    pub fn normalized(frame: &Arc<Frame>, scores: &[f64]) -> Result<Self> {
        if scores.len() != frame.len() {
            return Err(Error::FrameMismatch);
        }
        if scores.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidDistribution(
                "scores must be finite and non-negative".into(),
            ));
        }
        let total: f64 = scores.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("scores sum to zero".into()));
        }
        Ok(ProbabilityDistribution {
            frame: Arc::clone(frame),
            weights: scores.iter().map(|s| s / total).collect(),
        })
    }

    pub fn uniform(frame: &Arc<Frame>) -> Result<Self> {
        if frame.is_empty() {
            return Err(Error::InvalidFrame("frame has no elements".into()));
        }
        let n = frame.len() as f64;
        Ok(ProbabilityDistribution {
            frame: Arc::clone(frame),
            weights: vec![1.0 / n; frame.len()],
        })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, tag: &str) -> Result<f64> {
        Ok(self.weights[self.frame.require(tag)?])
    }

    /// Probability of an event: the sum of its members' weights.
    pub fn probability_of(&self, event: &TagSubset) -> Result<f64> {
        if !same_frame(&self.frame, event.frame()) {
            return Err(Error::FrameMismatch);
        }
        Ok(event.positions().map(|i| self.weights[i]).sum())
    }

    pub fn probability_of_tags<I, S>(&self, tags: I) -> Result<f64>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.probability_of(&TagSubset::from_tags(&self.frame, tags)?)
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        entropy(&self.weights)
    }
}

/// Shannon entropy (nats) of a probability vector; zero weights contribute nothing.
pub fn entropy(weights: &[f64]) -> f64 {
    let h: f64 = weights.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum();
    h.max(0.0)
}

/// Maxitive measure over a frame.
///
/// Subnormal distributions (height below one) are kept as they are; use
/// [`PossibilityDistribution::is_subnormal`] to detect them.
#[derive(Debug, Clone)]
pub struct PossibilityDistribution {
    frame: Arc<Frame>,
    degrees: Vec<f64>,
}

impl PartialEq for PossibilityDistribution {
    fn eq(&self, other: &Self) -> bool {
        same_frame(&self.frame, &other.frame) && self.degrees == other.degrees
    }
}

/// How two possibility distributions are fused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineMode {
    /// Pointwise minimum: both sources are taken to be reliable.
    #[default]
    Conjunctive,
    /// Pointwise maximum: at least one source is reliable.
    Disjunctive,
}

impl PossibilityDistribution {
    pub fn new<'a, I>(frame: &Arc<Frame>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let degrees = degrees_from_pairs(frame, pairs)?;
        Ok(PossibilityDistribution {
            frame: Arc::clone(frame),
            degrees,
        })
    }

    pub fn from_degrees(frame: &Arc<Frame>, degrees: Vec<f64>) -> Result<Self> {
        check_dense(frame, &degrees)?;
        Ok(PossibilityDistribution {
            frame: Arc::clone(frame),
            degrees,
        })
    }

    /// Complete ignorance: every tag is fully possible.
    pub fn ignorance(frame: &Arc<Frame>) -> Self {
        PossibilityDistribution {
            frame: Arc::clone(frame),
            degrees: vec![1.0; frame.len()],
        }
    }

    pub fn zero(frame: &Arc<Frame>) -> Self {
        PossibilityDistribution {
            frame: Arc::clone(frame),
            degrees: vec![0.0; frame.len()],
        }
    }

    /// Degree one on the constraint set, zero elsewhere.
    pub fn from_set_constraint(constraint: &TagSubset) -> Result<Self> {
        if constraint.is_empty() && constraint.frame().world() == super::World::Closed {
            return Err(Error::EmptyConstraint);
        }
        let degrees = constraint.mask().iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        Ok(PossibilityDistribution {
            frame: Arc::clone(constraint.frame()),
            degrees,
        })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn degree(&self, tag: &str) -> Result<f64> {
        Ok(self.degrees[self.frame.require(tag)?])
    }

    /// Largest degree; zero for an empty frame.
    pub fn height(&self) -> f64 {
        self.degrees.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_normal(&self) -> bool {
        (self.height() - 1.0).abs() <= TOLERANCE
    }

    pub fn is_subnormal(&self) -> bool {
        !self.is_normal()
    }

    /// Tags with a strictly positive degree.
    pub fn support(&self) -> TagSubset {
        TagSubset::from_positions(
            &self.frame,
            self.degrees
                .iter()
                .enumerate()
                .filter_map(|(i, &d)| (d > 0.0).then_some(i)),
        )
    }

    /// Tags attaining the height (within tolerance).
    pub fn argmax(&self) -> TagSubset {
        let height = self.height();
        TagSubset::from_positions(
            &self.frame,
            self.degrees
                .iter()
                .enumerate()
                .filter_map(|(i, &d)| ((height - d).abs() <= TOLERANCE).then_some(i)),
        )
    }

    /// Possibility of an event: the maximum degree among its members, zero when empty.
    pub fn possibility_of(&self, event: &TagSubset) -> Result<f64> {
        if !same_frame(&self.frame, event.frame()) {
            return Err(Error::FrameMismatch);
        }
        Ok(event.positions().map(|i| self.degrees[i]).fold(0.0, f64::max))
    }

    pub fn possibility_of_tags<I, S>(&self, tags: I) -> Result<f64>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.possibility_of(&TagSubset::from_tags(&self.frame, tags)?)
    }

    /// Dual necessity measure: one minus the possibility of the complement.
    pub fn necessity_of(&self, event: &TagSubset) -> Result<f64> {
        Ok(1.0 - self.possibility_of(&event.complement())?)
    }

    /// Fuses two distributions without renormalizing.
    ///
    /// Returns the fused distribution and the conflict, i.e. one minus the
    /// height of the conjunctive fusion.
    pub fn combine(&self, other: &Self, mode: CombineMode) -> Result<(Self, f64)> {
        if !same_frame(&self.frame, &other.frame) {
            return Err(Error::FrameMismatch);
        }
        let conjunction: Vec<f64> = self
            .degrees
            .iter()
            .zip(&other.degrees)
            .map(|(&a, &b)| a.min(b))
            .collect();
        let conflict = 1.0 - conjunction.iter().copied().fold(0.0, f64::max);
        let degrees = match mode {
            CombineMode::Conjunctive => conjunction,
            CombineMode::Disjunctive => self
                .degrees
                .iter()
                .zip(&other.degrees)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        };
        Ok((
            PossibilityDistribution {
                frame: Arc::clone(&self.frame),
                degrees,
            },
            conflict,
        ))
    }

    /// Normalizes degrees by their sum into a probability distribution.
    pub fn to_probability(&self) -> Result<ProbabilityDistribution> {
        ProbabilityDistribution::normalized(&self.frame, &self.degrees)
    }
}
