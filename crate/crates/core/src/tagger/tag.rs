use rayon::prelude::*;

use super::model::TaggerModel;
use crate::annotation::Document;
use crate::error::{Error, Result};
use crate::uncertainty::{ProbabilityDistribution, World};

/// Default maximum-posterior level below which tokens are flagged under an
/// open frame.
pub const OPEN_WORLD_THRESHOLD: f64 = 0.5;

/// The machine annotator's reading of one token.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedToken {
    pub index: usize,
    pub form: String,
    /// Tag on the Viterbi path.
    pub best_tag: String,
    pub posterior: ProbabilityDistribution,
    /// Posterior entropy in nats.
    pub entropy: f64,
    /// Set when the frame is open and no tag reaches the threshold.
    pub possibly_outside: bool,
}

impl TaggedToken {
    /// The `n` most probable tags, ties broken by tag.
    pub fn top(&self, n: usize) -> Vec<(String, f64)> {
        let frame = self.posterior.frame();
        let mut ranked: Vec<(usize, f64)> = self.posterior.weights().iter().copied().enumerate().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| frame.tag(a.0).cmp(frame.tag(b.0))));
        ranked
            .into_iter()
            .take(n)
            .map(|(i, p)| (frame.tag(i).to_string(), p))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedOutput {
    pub doc_id: String,
    pub tokens: Vec<TaggedToken>,
}

/// Tags every sentence of a document.
pub fn tag_document(model: &TaggerModel, document: &Document, threshold: f64) -> Result<TaggedOutput> {
    if document.token_count() == 0 {
        return Err(Error::EmptyDocument);
    }
    let sentences: Vec<Vec<TaggedToken>> = document
        .sentences()
        .par_iter()
        .filter(|s| !s.is_empty())
        .map(|sentence| {
            let observations = model.observe(sentence.iter().map(|t| t.form.as_str()));
            let path = model.viterbi(&observations, None)?;
            let posterior = model.posteriors(&observations, None)?;
            sentence
                .iter()
                .zip(path)
                .zip(posterior.gamma)
                .map(|((token, best), gamma)| {
                    let posterior = ProbabilityDistribution::normalized(model.frame(), &gamma)?;
                    let max = gamma.iter().copied().fold(0.0, f64::max);
                    Ok(TaggedToken {
                        index: token.index,
                        form: token.form.clone(),
                        best_tag: model.frame().tag(best).to_string(),
                        entropy: posterior.entropy(),
                        posterior,
                        possibly_outside: model.frame().world() == World::Open && max < threshold,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(TaggedOutput {
        doc_id: document.doc_id.clone(),
        tokens: sentences.into_iter().flatten().collect(),
    })
}
