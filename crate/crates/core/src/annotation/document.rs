use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar date of a document: `YYYY`, `YYYY-MM` or `YYYY-MM-DD`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DocDate(String);

impl DocDate {
    pub fn parse(text: &str) -> Result<DocDate> {
        let bad = || Error::InvalidRecord(format!("`{text}` is not an ISO-8601 date"));
        let parts: Vec<&str> = text.split('-').collect();
        if parts.is_empty() || parts.len() > 3 {
            return Err(bad());
        }
        let widths = [4, 2, 2];
        for (part, width) in parts.iter().zip(widths) {
            if part.len() != width || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
        }
        if let Some(month) = parts.get(1) {
            let month: u32 = month.parse().map_err(|_| bad())?;
            if !(1..=12).contains(&month) {
                return Err(bad());
            }
        }
        if let Some(day) = parts.get(2) {
            let day: u32 = day.parse().map_err(|_| bad())?;
            if !(1..=31).contains(&day) {
                return Err(bad());
            }
        }
        Ok(DocDate(text.to_string()))
    }

    pub fn year(&self) -> i32 {
        self.0[..4].parse().expect("validated on construction")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for DocDate {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        DocDate::parse(&value)
    }
}

impl From<DocDate> for String {
    fn from(value: DocDate) -> Self {
        value.0
    }
}

impl fmt::Display for DocDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub form: String,
}

/// A tokenized document split into sentences.
///
/// Token indices run contiguously from 0 across the whole document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub date: Option<DocDate>,
    sentences: Vec<Vec<Token>>,
}

impl Document {
    pub fn new<S, W>(doc_id: impl Into<String>, date: Option<DocDate>, sentences: S) -> Result<Document>
    where
        S: IntoIterator<Item = W>,
        W: IntoIterator,
        W::Item: Into<String>,
    {
        let mut next = 0;
        let mut out = Vec::new();
        for sentence in sentences {
            let mut tokens = Vec::new();
            for form in sentence {
                let form = form.into();
                check_form(&form)?;
                tokens.push(Token { index: next, form });
                next += 1;
            }
            if !tokens.is_empty() {
                out.push(tokens);
            }
        }
        Ok(Document {
            doc_id: doc_id.into(),
            date,
            sentences: out,
        })
    }

    pub fn sentences(&self) -> &[Vec<Token>] {
        &self.sentences
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flatten()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }

    pub fn token(&self, index: usize) -> Option<&Token> {
        self.sentence_of(index)
            .map(|s| &self.sentences[s][index - self.sentences[s][0].index])
    }

    /// Sentence number containing the token at `index`.
    pub fn sentence_of(&self, index: usize) -> Option<usize> {
        let position = self
            .sentences
            .partition_point(|s| s.last().is_some_and(|t| t.index < index));
        (position < self.sentences.len() && self.sentences[position][0].index <= index).then_some(position)
    }
}

pub(crate) fn check_form(form: &str) -> Result<()> {
    if form.is_empty() {
        return Err(Error::InvalidRecord("token forms must be non-empty".into()));
    }
    if form.contains(['\t', '\n', '\r', '|']) {
        return Err(Error::InvalidRecord(format!(
            "token form `{form}` contains a reserved character"
        )));
    }
    Ok(())
}
