use std::sync::Arc;

use super::frame::{same_frame, Frame, TagSubset};
use crate::error::{Error, Result};

/// Graded membership of tags in a category.
#[derive(Debug, Clone)]
pub struct FuzzyTagSet {
    frame: Arc<Frame>,
    membership: Vec<f64>,
}

impl PartialEq for FuzzyTagSet {
    fn eq(&self, other: &Self) -> bool {
        same_frame(&self.frame, &other.frame) && self.membership == other.membership
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzyOp {
    Union,
    Intersection,
    Complement,
}

impl FuzzyTagSet {
    pub fn new<'a, I>(frame: &Arc<Frame>, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut membership = vec![0.0; frame.len()];
        for (tag, degree) in pairs {
            let position = frame.require(tag)?;
            if !(0.0..=1.0).contains(&degree) {
                return Err(Error::InvalidDistribution(format!(
                    "membership {degree} for `{tag}` is outside [0, 1]"
                )));
            }
            membership[position] = degree;
        }
        Ok(FuzzyTagSet {
            frame: Arc::clone(frame),
            membership,
        })
    }

    pub fn crisp(subset: &TagSubset) -> Self {
        FuzzyTagSet {
            frame: Arc::clone(subset.frame()),
            membership: subset.mask().iter().map(|&m| if m { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn membership(&self) -> &[f64] {
        &self.membership
    }

    pub fn degree(&self, tag: &str) -> Result<f64> {
        Ok(self.membership[self.frame.require(tag)?])
    }

    pub fn support(&self) -> TagSubset {
        self.alpha_cut_strict(0.0)
    }

    /// Tags whose membership is at least `alpha`.
    pub fn alpha_cut(&self, alpha: f64) -> TagSubset {
        TagSubset::from_positions(
            &self.frame,
            self.membership
                .iter()
                .enumerate()
                .filter_map(|(i, &m)| (m >= alpha).then_some(i)),
        )
    }

    fn alpha_cut_strict(&self, alpha: f64) -> TagSubset {
        TagSubset::from_positions(
            &self.frame,
            self.membership
                .iter()
                .enumerate()
                .filter_map(|(i, &m)| (m > alpha).then_some(i)),
        )
    }

    /// Whether every membership degree is 0 or 1.
    pub fn is_crisp(&self) -> bool {
        self.membership.iter().all(|&m| m == 0.0 || m == 1.0)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !same_frame(&self.frame, &other.frame) {
            return Err(Error::FrameMismatch);
        }
        Ok(FuzzyTagSet {
            frame: Arc::clone(&self.frame),
            membership: self
                .membership
                .iter()
                .zip(&other.membership)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::max)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, f64::min)
    }

    pub fn complement(&self) -> Self {
        FuzzyTagSet {
            frame: Arc::clone(&self.frame),
            membership: self.membership.iter().map(|m| 1.0 - m).collect(),
        }
    }

    /// Applies `op`; `other` is ignored for [`FuzzyOp::Complement`].
    pub fn apply(&self, op: FuzzyOp, other: &Self) -> Result<Self> {
        match op {
            FuzzyOp::Union => self.union(other),
            FuzzyOp::Intersection => self.intersection(other),
            FuzzyOp::Complement => Ok(self.complement()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::World;
    use super::*;

    fn frame() -> Arc<Frame> {
        Frame::new(["x", "y", "z"], World::Closed).unwrap().into_shared()
    }

    #[test]
    fn crisp_sets_reduce_to_classical_ops() {
        let f = frame();
        let a = TagSubset::from_tags(&f, ["x", "y"]).unwrap();
        let b = TagSubset::from_tags(&f, ["y", "z"]).unwrap();
        let fa = FuzzyTagSet::crisp(&a);
        let fb = FuzzyTagSet::crisp(&b);
        assert_eq!(fa.union(&fb).unwrap(), FuzzyTagSet::crisp(&a.union(&b).unwrap()));
        assert_eq!(
            fa.intersection(&fb).unwrap(),
            FuzzyTagSet::crisp(&a.intersection(&b).unwrap())
        );
        assert_eq!(fa.complement(), FuzzyTagSet::crisp(&a.complement()));
        assert!(fa.is_crisp());
    }

    #[test]
    fn complement_is_one_minus() {
        let f = frame();
        let a = FuzzyTagSet::new(&f, [("x", 0.3)]).unwrap();
        let c = a.apply(FuzzyOp::Complement, &a).unwrap();
        assert!((c.degree("x").unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(c.degree("y").unwrap(), 1.0);
        assert_eq!(c.degree("z").unwrap(), 1.0);
    }

    #[test]
    fn excluded_middle_fails() {
        let f = frame();
        let a = FuzzyTagSet::new(&f, [("x", 0.5)]).unwrap();
        let u = a.union(&a.complement()).unwrap();
        assert_eq!(u.degree("x").unwrap(), 0.5);
    }

    #[test]
    fn cuts_and_support() {
        let f = frame();
        let a = FuzzyTagSet::new(&f, [("x", 0.2), ("y", 0.8)]).unwrap();
        assert_eq!(a.support().tags().collect::<Vec<_>>(), ["x", "y"]);
        assert_eq!(a.alpha_cut(0.5).tags().collect::<Vec<_>>(), ["y"]);
        assert!(FuzzyTagSet::new(&f, [("x", 1.2)]).is_err());
    }
}
