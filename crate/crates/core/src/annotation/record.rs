use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tagset::Layer;

/// Token range a record applies to; `end` is inclusive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Target {
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
}

impl Target {
    pub fn token(doc_id: impl Into<String>, index: usize) -> Target {
        Target {
            doc_id: doc_id.into(),
            start: index,
            end: index,
        }
    }

    pub fn span(doc_id: impl Into<String>, start: usize, end: usize) -> Target {
        Target {
            doc_id: doc_id.into(),
            start,
            end,
        }
    }

    pub fn is_single_token(&self) -> bool {
        self.start == self.end
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start == self.end {
            write!(f, "{}:{}", self.doc_id, self.start)
        } else {
            write!(f, "{}:{}-{}", self.doc_id, self.start, self.end)
        }
    }
}

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!(concat!("unknown ", stringify!($name), " `{}`"), other)),
                }
            }
        }
    };
}

keyword_enum! {
    /// Whether the annotator takes the ground truth to be a single tag or graded.
    GtMode {
        Precise => "precise",
        Graded => "graded",
        Unknown => "unknown",
    }
}

keyword_enum! {
    /// Knowledge-representation style of a record.
    Style {
        PreciseTag => "precise",
        SetValued => "set",
        Distributional => "dist",
        Ordinal => "ordinal",
    }
}

keyword_enum! {
    /// What the annotator names as the source of the uncertainty.
    UncertaintySource {
        Ambiguity => "ambiguity",
        Epistemic => "epistemic",
        Unclear => "unclear",
    }
}

#[allow(clippy::derivable_impls)] // the enum is generated by `keyword_enum!`
impl Default for GtMode {
    fn default() -> Self {
        GtMode::Unknown
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    None,
    Degree(f64),
    Rank(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub tag: String,
    pub payload: Payload,
}

impl Entry {
    pub fn tag(tag: impl Into<String>) -> Entry {
        Entry {
            tag: tag.into(),
            payload: Payload::None,
        }
    }

    pub fn degree(tag: impl Into<String>, degree: f64) -> Entry {
        Entry {
            tag: tag.into(),
            payload: Payload::Degree(degree),
        }
    }

    pub fn rank(tag: impl Into<String>, rank: u32) -> Entry {
        Entry {
            tag: tag.into(),
            payload: Payload::Rank(rank),
        }
    }
}

/// One annotator's (possibly uncertain) labeling of a token or span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub target: Target,
    pub layer: Layer,
    pub annotator: String,
    pub timestamp: Option<String>,
    pub gt_mode: GtMode,
    pub style: Style,
    pub entries: Vec<Entry>,
    pub source: Option<UncertaintySource>,
    /// Extra `#key=value` columns carried through unchanged.
    pub extensions: BTreeMap<String, String>,
}

impl AnnotationRecord {
    pub fn new(
        target: Target,
        layer: Layer,
        annotator: impl Into<String>,
        gt_mode: GtMode,
        style: Style,
        entries: Vec<Entry>,
    ) -> AnnotationRecord {
        AnnotationRecord {
            target,
            layer,
            annotator: annotator.into(),
            timestamp: None,
            gt_mode,
            style,
            entries,
            source: None,
            extensions: BTreeMap::new(),
        }
    }

    pub fn with_source(mut self, source: UncertaintySource) -> Self {
        self.source = Some(source);
        self
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.tag.as_str())
    }
}
