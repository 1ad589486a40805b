use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::inference::ExpectedCounts;
use super::model::{TaggerModel, TrainConfig, TrainingMeta};
use super::vocab::Vocabulary;
use crate::aggregation::aggregate_target;
use crate::annotation::{AnnotationRecord, Layer, Target};
use crate::error::{Error, Result};
use crate::io::CorpusBundle;
use crate::uncertainty::{CombineMode, Frame};

/// Sentences per E-step work unit. Fixed so that accumulation order, and
/// therefore every floating-point sum, is independent of the thread count.
const CHUNK: usize = 32;

/// One training sentence with per-token constraint degrees over the frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSentence {
    pub doc_id: String,
    /// Document-level index of the first token.
    pub start: usize,
    pub forms: Vec<String>,
    pub constraints: Vec<Vec<f64>>,
}

/// A supervised target whose fused degrees were all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMask {
    pub target: Target,
    pub annotators: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingData {
    pub frame: Arc<Frame>,
    pub sentences: Vec<TrainingSentence>,
    /// Targets excluded from supervision because fusion left nothing.
    pub zero_masks: Vec<ZeroMask>,
    /// Targets whose records could not be converted, with the reason.
    pub skipped: Vec<(Target, String)>,
}

impl TrainingData {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.forms.len()).sum()
    }
}

/// Per-token constraints from the POS layer. Several records on one target
/// are fused conjunctively first; unannotated tokens get all-ones.
pub fn build_constraints(bundle: &CorpusBundle) -> Result<TrainingData> {
    let tagset = bundle
        .tagset(Layer::Pos)
        .ok_or_else(|| Error::InvalidFrame("no POS tag set is loaded".into()))?;
    let frame = tagset.frame().clone();
    let k = frame.len();

    let mut groups: BTreeMap<&Target, Vec<&AnnotationRecord>> = BTreeMap::new();
    for record in bundle.annotations.iter().filter(|r| r.layer == Layer::Pos) {
        groups.entry(&record.target).or_default().push(record);
    }

    let mut per_doc: BTreeMap<&str, Vec<Vec<f64>>> = BTreeMap::new();
    let mut zero_masks = Vec::new();
    let mut skipped = Vec::new();
    for (target, records) in groups {
        let Some(document) = bundle.document(&target.doc_id) else {
            skipped.push((target.clone(), format!("unknown document `{}`", target.doc_id)));
            continue;
        };
        if target.end >= document.token_count() || target.start > target.end {
            skipped.push((target.clone(), "target out of range".into()));
            continue;
        }
        let fused = match aggregate_target(&records, tagset, &bundle.scale, CombineMode::Conjunctive) {
            Ok(fused) => fused,
            Err(err) => {
                skipped.push((target.clone(), err.to_string()));
                continue;
            }
        };
        if fused.combined.degrees().iter().all(|&d| d == 0.0) {
            zero_masks.push(ZeroMask {
                target: target.clone(),
                annotators: fused.contributing,
            });
            continue;
        }
        let rows = per_doc
            .entry(document.doc_id.as_str())
            .or_insert_with(|| vec![vec![1.0; k]; document.token_count()]);
        for row in &mut rows[target.start..=target.end] {
            for (slot, degree) in row.iter_mut().zip(fused.combined.degrees()) {
                *slot = slot.min(*degree);
            }
        }
    }

    let mut sentences = Vec::new();
    for document in &bundle.documents {
        let rows = per_doc.get(document.doc_id.as_str());
        for sentence in document.sentences() {
            if sentence.is_empty() {
                continue;
            }
            let start = sentence[0].index;
            sentences.push(TrainingSentence {
                doc_id: document.doc_id.clone(),
                start,
                forms: sentence.iter().map(|t| t.form.clone()).collect(),
                constraints: sentence
                    .iter()
                    .map(|t| rows.map_or_else(|| vec![1.0; k], |r| r[t.index].clone()))
                    .collect(),
            });
        }
    }
    Ok(TrainingData {
        frame,
        sentences,
        zero_masks,
        skipped,
    })
}

/// Builds constraints from the bundle and trains on them.
pub fn train(bundle: &CorpusBundle, config: &TrainConfig) -> Result<TaggerModel> {
    let data = build_constraints(bundle)?;
    train_on(&data, config)
}

/// Constrained Baum-Welch from the seeded initialization.
pub fn train_on(data: &TrainingData, config: &TrainConfig) -> Result<TaggerModel> {
    let vocabulary = Vocabulary::from_counts(
        data.sentences.iter().flat_map(|s| s.forms.iter().map(String::as_str)),
        config.min_word_count,
    );
    let start = TaggerModel::initialize(data.frame.clone(), vocabulary, config.seed)?;
    train_from(start, data, config)
}

/// Constrained Baum-Welch from an explicit starting model.
///
/// Every M-step is a smoothed (MAP) re-estimate, so the monotone quantity is
/// the log-likelihood plus the add-λ log-prior; both traces are recorded.
pub fn train_from(start: TaggerModel, data: &TrainingData, config: &TrainConfig) -> Result<TaggerModel> {
    config.validate()?;
    if data.frame.len() < 2 {
        return Err(Error::InvalidFrame("training needs at least two tags".into()));
    }
    if data.frame.elements() != start.frame.elements() || data.frame.world() != start.frame.world() {
        return Err(Error::FrameMismatch);
    }
    let encoded: Vec<(Vec<usize>, &[Vec<f64>])> = data
        .sentences
        .iter()
        .filter(|s| !s.forms.is_empty())
        .map(|s| {
            (
                start.observe(s.forms.iter().map(String::as_str)),
                s.constraints.as_slice(),
            )
        })
        .collect();
    if encoded.is_empty() {
        return Err(Error::NoData);
    }

    let mut model = start;
    let mut meta = TrainingMeta {
        config: config.canonical(),
        config_hash: config.hash(),
        seed: config.seed,
        ..TrainingMeta::default()
    };
    let mut counts = expected_counts(&model, &encoded)?;
    meta.log_likelihood_trace.push(counts.log_likelihood);
    meta.objective_trace
        .push(counts.log_likelihood + log_prior(&model, config));
    while meta.iterations < config.max_iterations {
        model = maximize(&model, &counts, config);
        meta.iterations += 1;
        counts = expected_counts(&model, &encoded)?;
        let objective = counts.log_likelihood + log_prior(&model, config);
        let previous = *meta.objective_trace.last().expect("initialized above");
        meta.log_likelihood_trace.push(counts.log_likelihood);
        meta.objective_trace.push(objective);
        if (objective - previous) / previous.abs().max(f64::MIN_POSITIVE) < config.tolerance {
            meta.converged = true;
            break;
        }
    }
    model.meta = meta;
    Ok(model)
}

/// E-step over all sentences: fixed chunks in parallel, merged in order.
pub fn expected_counts(model: &TaggerModel, sentences: &[(Vec<usize>, &[Vec<f64>])]) -> Result<ExpectedCounts> {
    let k = model.tag_count();
    let v = model.vocabulary.size();
    let partials: Vec<Result<ExpectedCounts>> = sentences
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = ExpectedCounts::zeros(k, v);
            for (obs, constraints) in chunk {
                model.accumulate(obs, Some(constraints), &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = ExpectedCounts::zeros(k, v);
    for partial in partials {
        total.merge(&partial?);
    }
    Ok(total)
}

/// M-step with add-λ smoothing.
pub fn maximize(model: &TaggerModel, counts: &ExpectedCounts, config: &TrainConfig) -> TaggerModel {
    let smooth = |row: &[f64], lambda: f64| -> Vec<f64> {
        let total: f64 = row.iter().sum::<f64>() + lambda * row.len() as f64;
        row.iter().map(|c| (c + lambda) / total).collect()
    };
    TaggerModel {
        frame: model.frame.clone(),
        vocabulary: model.vocabulary.clone(),
        initial: smooth(&counts.initial, config.lambda_transition),
        transitions: counts
            .transitions
            .iter()
            .map(|r| smooth(r, config.lambda_transition))
            .collect(),
        emissions: counts
            .emissions
            .iter()
            .map(|r| smooth(r, config.lambda_emission))
            .collect(),
        meta: model.meta.clone(),
    }
}

/// Log of the (unnormalized) Dirichlet prior that add-λ smoothing maximizes.
pub fn log_prior(model: &TaggerModel, config: &TrainConfig) -> f64 {
    let sum_ln = |row: &[f64]| row.iter().map(|p| p.ln()).sum::<f64>();
    config.lambda_transition * (sum_ln(&model.initial) + model.transitions.iter().map(|r| sum_ln(r)).sum::<f64>())
        + config.lambda_emission * model.emissions.iter().map(|r| sum_ln(r)).sum::<f64>()
}
