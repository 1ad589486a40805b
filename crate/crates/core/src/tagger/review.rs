use serde::Serialize;

use super::tag::TaggedOutput;
use crate::annotation::Target;

/// One token proposed for human review.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReviewItem {
    pub target: Target,
    pub form: String,
    pub entropy: f64,
    /// The two most probable tags with their posteriors.
    pub top: Vec<(String, f64)>,
    pub best_tag: String,
}

/// The `k` most uncertain tokens: entropy descending, then document id and
/// token index ascending.
pub fn review_queue(outputs: &[TaggedOutput], k: usize) -> Vec<ReviewItem> {
    let mut items: Vec<ReviewItem> = outputs
        .iter()
        .flat_map(|output| {
            output.tokens.iter().map(|token| ReviewItem {
                target: Target::token(output.doc_id.clone(), token.index),
                form: token.form.clone(),
                entropy: token.entropy,
                top: token.top(2),
                best_tag: token.best_tag.clone(),
            })
        })
        .collect();
    items.sort_by(|a, b| {
        b.entropy
            .total_cmp(&a.entropy)
            .then_with(|| a.target.doc_id.cmp(&b.target.doc_id))
            .then_with(|| a.target.start.cmp(&b.target.start))
    });
    items.truncate(k);
    items
}
