use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::uncertainty::{Frame, World};

/// Annotation layer a tag set and its records belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Layer {
    #[serde(rename = "POS")]
    Pos,
    Construction,
}

impl Layer {
    pub const ALL: [Layer; 2] = [Layer::Pos, Layer::Construction];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Pos => "POS",
            Layer::Construction => "Construction",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Layer {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "POS" => Ok(Layer::Pos),
            "Construction" => Ok(Layer::Construction),
            other => Err(format!("unknown layer `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagEntry {
    pub tag: String,
    pub description: String,
    pub added_version: u32,
    pub added_date: Option<String>,
}

/// A versioned tag set for one layer.
///
/// Closed tag sets never change after loading. Open tag sets grow through
/// [`TagSet::register_tag`], which returns a new value with the tag appended
/// at the next version.
#[derive(Debug, Clone)]
pub struct TagSet {
    layer: Layer,
    frame: Arc<Frame>,
    entries: Vec<TagEntry>,
}

impl PartialEq for TagSet {
    fn eq(&self, other: &Self) -> bool {
        self.layer == other.layer && *self.frame == *other.frame && self.entries == other.entries
    }
}

impl TagSet {
    /// Builds a tag set whose versions are 1..=n in row order.
    pub fn new<I>(layer: Layer, world: World, rows: I) -> Result<TagSet>
    where
        I: IntoIterator<Item = (String, String, Option<String>)>,
    {
        let mut frame = Frame::new(Vec::<String>::new(), world)?;
        let mut entries = Vec::new();
        for (tag, description, added_date) in rows {
            frame.push(tag.clone())?;
            entries.push(TagEntry {
                tag,
                description,
                added_version: entries.len() as u32 + 1,
                added_date,
            });
        }
        Ok(TagSet {
            layer,
            frame: frame.into_shared(),
            entries,
        })
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn world(&self) -> World {
        self.frame.world()
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn entries(&self) -> &[TagEntry] {
        &self.entries
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.frame.contains(tag)
    }

    pub fn entry(&self, tag: &str) -> Option<&TagEntry> {
        self.frame.position(tag).map(|i| &self.entries[i])
    }

    /// Version of the most recently added tag (0 when empty).
    pub fn version(&self) -> u32 {
        self.entries.last().map_or(0, |e| e.added_version)
    }

    /// Appends a tag to an open tag set.
    pub fn register_tag(&self, tag: &str, description: &str, added_date: Option<String>) -> Result<TagSet> {
        if self.world() == World::Closed {
            return Err(Error::ClosedWorldViolation(self.layer.to_string()));
        }
        if self.contains(tag) {
            return Err(Error::DuplicateTag(tag.to_string()));
        }
        let mut frame = (*self.frame).clone();
        frame.push(tag.to_string())?;
        let mut entries = self.entries.clone();
        entries.push(TagEntry {
            tag: tag.to_string(),
            description: description.to_string(),
            added_version: self.version() + 1,
            added_date,
        });
        Ok(TagSet {
            layer: self.layer,
            frame: frame.into_shared(),
            entries,
        })
    }
}
