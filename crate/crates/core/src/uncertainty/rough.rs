use std::sync::Arc;

use super::frame::{same_frame, Frame, TagSubset};
use crate::error::{Error, Result};

/// Partition of a frame into granules of mutually indiscernible tags.
#[derive(Debug, Clone)]
pub struct IndiscernibilityPartition {
    frame: Arc<Frame>,
    granules: Vec<Vec<usize>>,
    granule_of: Vec<usize>,
}

impl IndiscernibilityPartition {
    pub fn new<G, T, S>(frame: &Arc<Frame>, granules: G) -> Result<Self>
    where
        G: IntoIterator<Item = T>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut granule_of = vec![usize::MAX; frame.len()];
        let mut out = Vec::new();
        for granule in granules {
            let id = out.len();
            let mut members = Vec::new();
            for tag in granule {
                let position = frame.require(tag.as_ref())?;
                if granule_of[position] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "`{}` appears in more than one granule",
                        tag.as_ref()
                    )));
                }
                granule_of[position] = id;
                members.push(position);
            }
            if members.is_empty() {
                return Err(Error::InvalidPartition("empty granule".into()));
            }
            members.sort_unstable();
            out.push(members);
        }
        if let Some(missing) = granule_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "`{}` is not covered by any granule",
                frame.tag(missing)
            )));
        }
        Ok(IndiscernibilityPartition {
            frame: Arc::clone(frame),
            granules: out,
            granule_of,
        })
    }

    /// Every tag in its own granule.
    pub fn discrete(frame: &Arc<Frame>) -> Self {
        IndiscernibilityPartition {
            frame: Arc::clone(frame),
            granules: (0..frame.len()).map(|i| vec![i]).collect(),
            granule_of: (0..frame.len()).collect(),
        }
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn granule_count(&self) -> usize {
        self.granules.len()
    }

    pub fn granules(&self) -> impl Iterator<Item = TagSubset> + '_ {
        self.granules
            .iter()
            .map(|g| TagSubset::from_positions(&self.frame, g.iter().copied()))
    }

    /// The granule containing `tag`.
    pub fn class_of(&self, tag: &str) -> Result<TagSubset> {
        let position = self.frame.require(tag)?;
        let granule = &self.granules[self.granule_of[position]];
        Ok(TagSubset::from_positions(&self.frame, granule.iter().copied()))
    }

    /// Lower and upper approximation of `set` under this partition.
    pub fn approximate(&self, set: &TagSubset) -> Result<RoughTagSet> {
        if !same_frame(&self.frame, set.frame()) {
            return Err(Error::FrameMismatch);
        }
        let mut lower = TagSubset::empty(&self.frame).mask().to_vec();
        let mut upper = lower.clone();
        for granule in &self.granules {
            let inside = granule.iter().filter(|&&i| set.contains(i)).count();
            if inside == granule.len() {
                granule.iter().for_each(|&i| lower[i] = true);
            }
            if inside > 0 {
                granule.iter().for_each(|&i| upper[i] = true);
            }
        }
        Ok(RoughTagSet {
            lower: TagSubset::from_mask(&self.frame, lower)?,
            upper: TagSubset::from_mask(&self.frame, upper)?,
        })
    }

    pub fn approximate_tags<I, S>(&self, tags: I) -> Result<RoughTagSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.approximate(&TagSubset::from_tags(&self.frame, tags)?)
    }
}

/// Lower/upper approximation pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughTagSet {
    pub lower: TagSubset,
    pub upper: TagSubset,
}

impl RoughTagSet {
    /// Tags in the upper but not the lower approximation.
    pub fn boundary(&self) -> TagSubset {
        self.upper
            .difference(&self.lower)
            .expect("approximations share a frame")
    }

    /// True when the approximated set is definable by whole granules.
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// |lower| / |upper|, with 1 for an empty upper approximation.
    pub fn accuracy(&self) -> f64 {
        let upper = self.upper.len();
        if upper == 0 {
            1.0
        } else {
            self.lower.len() as f64 / upper as f64
        }
    }
}
