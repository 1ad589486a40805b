use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether the frame is assumed to be exhaustive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum World {
    /// The true tag is always one of the frame's elements.
    Closed,
    /// The true tag may lie outside the frame; the frame can grow.
    Open,
}

impl World {
    pub fn as_str(self) -> &'static str {
        match self {
            World::Closed => "closed",
            World::Open => "open",
        }
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The finite reference set of tags (frame of discernment).
///
/// Element order is insertion order and is used for every reduction, which
/// keeps all derived values deterministic.
#[derive(Debug, Clone)]
pub struct Frame {
    elements: Vec<String>,
    index: HashMap<String, usize>,
    world: World,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.world == other.world && self.elements == other.elements
    }
}

impl Eq for Frame {}

impl Frame {
    pub fn new<I, S>(elements: I, world: World) -> Result<Frame>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut frame = Frame {
            elements: Vec::new(),
            index: HashMap::new(),
            world,
        };
        for element in elements {
            frame.push(element.into())?;
        }
        Ok(frame)
    }

    pub(crate) fn push(&mut self, tag: String) -> Result<usize> {
        if tag.is_empty() {
            return Err(Error::InvalidFrame("tags must be non-empty".into()));
        }
        if self.index.contains_key(&tag) {
            return Err(Error::DuplicateTag(tag));
        }
        let position = self.elements.len();
        self.index.insert(tag.clone(), position);
        self.elements.push(tag);
        Ok(position)
    }

    pub fn world(&self) -> World {
        self.world
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn tag(&self, position: usize) -> &str {
        &self.elements[position]
    }

    pub fn position(&self, tag: &str) -> Option<usize> {
        self.index.get(tag).copied()
    }

    pub fn require(&self, tag: &str) -> Result<usize> {
        self.position(tag).ok_or_else(|| Error::UnknownTag(tag.to_string()))
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.index.contains_key(tag)
    }

    pub fn into_shared(self) -> Arc<Frame> {
        Arc::new(self)
    }
}

pub(crate) fn same_frame(a: &Arc<Frame>, b: &Arc<Frame>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A subset of a frame, e.g. an event or a set-valued constraint.
///
/// Membership is stored as a mask aligned with the frame's element order.
#[derive(Debug, Clone)]
pub struct TagSubset {
    frame: Arc<Frame>,
    mask: Vec<bool>,
}

impl PartialEq for TagSubset {
    fn eq(&self, other: &Self) -> bool {
        same_frame(&self.frame, &other.frame) && self.mask == other.mask
    }
}

impl TagSubset {
    pub fn empty(frame: &Arc<Frame>) -> TagSubset {
        TagSubset {
            frame: Arc::clone(frame),
            mask: vec![false; frame.len()],
        }
    }

    pub fn full(frame: &Arc<Frame>) -> TagSubset {
        TagSubset {
            frame: Arc::clone(frame),
            mask: vec![true; frame.len()],
        }
    }

    pub fn from_tags<I, S>(frame: &Arc<Frame>, tags: I) -> Result<TagSubset>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut subset = TagSubset::empty(frame);
        for tag in tags {
            let position = frame.require(tag.as_ref())?;
            subset.mask[position] = true;
        }
        Ok(subset)
    }

    pub fn from_positions<I>(frame: &Arc<Frame>, positions: I) -> TagSubset
    where
        I: IntoIterator<Item = usize>,
    {
        let mut subset = TagSubset::empty(frame);
        for position in positions {
            subset.mask[position] = true;
        }
        subset
    }

    pub fn from_mask(frame: &Arc<Frame>, mask: Vec<bool>) -> Result<TagSubset> {
        if mask.len() != frame.len() {
            return Err(Error::FrameMismatch);
        }
        Ok(TagSubset {
            frame: Arc::clone(frame),
            mask,
        })
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, position: usize) -> bool {
        self.mask[position]
    }

    pub fn contains_tag(&self, tag: &str) -> bool {
        self.frame.position(tag).is_some_and(|position| self.mask[position])
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter_map(|(i, &m)| m.then_some(i))
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> + '_ {
        self.positions().map(|i| self.frame.tag(i))
    }

    fn check(&self, other: &TagSubset) -> Result<()> {
        if same_frame(&self.frame, &other.frame) {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }

    fn zip_with(&self, other: &TagSubset, f: impl Fn(bool, bool) -> bool) -> Result<TagSubset> {
        self.check(other)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| f(a, b)).collect();
        Ok(TagSubset {
            frame: Arc::clone(&self.frame),
            mask,
        })
    }

    pub fn union(&self, other: &TagSubset) -> Result<TagSubset> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &TagSubset) -> Result<TagSubset> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &TagSubset) -> Result<TagSubset> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> TagSubset {
        TagSubset {
            frame: Arc::clone(&self.frame),
            mask: self.mask.iter().map(|&m| !m).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &TagSubset) -> Result<bool> {
        self.check(other)?;
        Ok(self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b))
    }

    pub fn intersects(&self, other: &TagSubset) -> Result<bool> {
        self.check(other)?;
        Ok(self.mask.iter().zip(&other.mask).any(|(&a, &b)| a && b))
    }
}
