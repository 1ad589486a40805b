use std::collections::HashMap;

/// Fallback classes for forms outside the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnknownClass {
    Capitalized,
    Digit,
    Punctuation,
    Other,
}

impl UnknownClass {
    pub const ALL: [UnknownClass; 4] = [
        UnknownClass::Capitalized,
        UnknownClass::Digit,
        UnknownClass::Punctuation,
        UnknownClass::Other,
    ];

    pub fn of(form: &str) -> UnknownClass {
        if form.chars().any(|c| c.is_numeric()) {
            UnknownClass::Digit
        } else if form.chars().all(|c| !c.is_alphanumeric()) {
            UnknownClass::Punctuation
        } else if form.chars().next().is_some_and(char::is_uppercase) {
            UnknownClass::Capitalized
        } else {
            UnknownClass::Other
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            UnknownClass::Capitalized => "<UNK-CAP>",
            UnknownClass::Digit => "<UNK-DIGIT>",
            UnknownClass::Punctuation => "<UNK-PUNCT>",
            UnknownClass::Other => "<UNK>",
        }
    }

    fn offset(self) -> usize {
        self as usize
    }
}

/// Word forms with their own emission column, followed by the four
/// unknown-word classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new<I, S>(words: I) -> Vocabulary
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary {
            words: Vec::new(),
            index: HashMap::new(),
        };
        for word in words {
            let word = word.into();
            if !vocab.index.contains_key(&word) {
                vocab.index.insert(word.clone(), vocab.words.len());
                vocab.words.push(word);
            }
        }
        vocab
    }

    /// Keeps forms seen at least `min_count` times, in first-seen order.
    pub fn from_counts<'a, I>(forms: I, min_count: usize) -> Vocabulary
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut order = Vec::new();
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for form in forms {
            let count = counts.entry(form).or_insert(0);
            if *count == 0 {
                order.push(form);
            }
            *count += 1;
        }
        Vocabulary::new(order.into_iter().filter(|f| counts[f] >= min_count))
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Number of emission columns, unknown classes included.
    pub fn size(&self) -> usize {
        self.words.len() + UnknownClass::ALL.len()
    }

    /// Emission column of a form.
    pub fn column(&self, form: &str) -> usize {
        self.index
            .get(form)
            .copied()
            .unwrap_or_else(|| self.words.len() + UnknownClass::of(form).offset())
    }

    pub fn column_label(&self, column: usize) -> &str {
        if column < self.words.len() {
            &self.words[column]
        } else {
            UnknownClass::ALL[column - self.words.len()].label()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rare_forms_fall_into_classes() {
        let forms = ["dat", "is", "dat", "Goslar", "1350", "·", "is", "vredebrake"];
        let vocab = Vocabulary::from_counts(forms.iter().copied(), 2);
        assert_eq!(vocab.words(), ["dat", "is"]);
        assert_eq!(vocab.size(), 6);
        assert_eq!(vocab.column("dat"), 0);
        assert_eq!(vocab.column("Goslar"), 2);
        assert_eq!(vocab.column("1350"), 3);
        assert_eq!(vocab.column("·"), 4);
        assert_eq!(vocab.column("vredebrake"), 5);
        assert_eq!(vocab.column_label(5), "<UNK>");
    }
}
