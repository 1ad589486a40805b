use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::tag::{TaggedOutput, TaggedToken};
use crate::annotation::{to_possibility, AnnotationRecord, GtMode, Layer, Style, TagSet};
use crate::error::{Error, Result};
use crate::uncertainty::OrdinalScale;

/// Agreement between tagger output and gold annotations.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EvalMetrics {
    /// Viterbi tag equals a precise gold tag (precise ground truth only).
    pub token_correct: usize,
    pub token_total: usize,
    /// Viterbi tag lies in the support of set-valued or graded gold.
    pub set_correct: usize,
    pub set_total: usize,
    /// Summed cross-entropy (nats) against distributional and ordinal gold,
    /// with degrees normalized by their sum.
    pub cross_entropy_sum: f64,
    pub cross_entropy_total: usize,
    /// Evaluated gold records per ground-truth mode.
    pub per_gt_mode: BTreeMap<String, usize>,
}

impl EvalMetrics {
    pub fn token_accuracy(&self) -> Option<f64> {
        ratio(self.token_correct, self.token_total)
    }

    pub fn set_accuracy(&self) -> Option<f64> {
        ratio(self.set_correct, self.set_total)
    }

    pub fn mean_cross_entropy(&self) -> Option<f64> {
        (self.cross_entropy_total > 0).then(|| self.cross_entropy_sum / self.cross_entropy_total as f64)
    }
}

fn ratio(a: usize, b: usize) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

/// Scores POS-layer gold records against tagger output.
pub fn evaluate(
    outputs: &[TaggedOutput],
    gold: &[AnnotationRecord],
    tagset: &TagSet,
    scale: &OrdinalScale,
) -> Result<EvalMetrics> {
    let mut tokens: HashMap<(&str, usize), &TaggedToken> = HashMap::new();
    for output in outputs {
        for token in &output.tokens {
            tokens.insert((output.doc_id.as_str(), token.index), token);
        }
    }
    let mut metrics = EvalMetrics::default();
    for record in gold.iter().filter(|r| r.layer == Layer::Pos) {
        if !record.target.is_single_token() {
            return Err(Error::Alignment(format!(
                "gold target {} spans several tokens",
                record.target
            )));
        }
        let token = tokens
            .get(&(record.target.doc_id.as_str(), record.target.start))
            .ok_or_else(|| Error::Alignment(format!("no tagger output for {}", record.target)))?;
        let gold_dist = to_possibility(record, tagset, scale)?;
        let graded = record.gt_mode == GtMode::Graded;
        match record.style {
            Style::PreciseTag if !graded => {
                metrics.token_total += 1;
                metrics.token_correct += usize::from(record.entries[0].tag == token.best_tag);
            }
            Style::PreciseTag | Style::SetValued => {
                metrics.set_total += 1;
                metrics.set_correct += usize::from(gold_dist.degree(&token.best_tag).unwrap_or(0.0) > 0.0);
            }
            Style::Distributional | Style::Ordinal => {
                let degrees = gold_dist.degrees();
                let total: f64 = degrees.iter().sum();
                let mut cross = 0.0;
                for (i, d) in degrees.iter().enumerate() {
                    if *d > 0.0 {
                        let tag = gold_dist.frame().tag(i);
                        let p = token.posterior.weight(tag).unwrap_or(0.0);
                        cross -= d / total * p.ln();
                    }
                }
                metrics.cross_entropy_sum += cross;
                metrics.cross_entropy_total += 1;
            }
        }
        *metrics.per_gt_mode.entry(record.gt_mode.to_string()).or_default() += 1;
    }
    Ok(metrics)
}

/// Accuracy of predicted state ids under the best one-to-one relabelling
/// onto gold ids, by exhaustive search over permutations of `k` labels.
pub fn best_one_to_one_accuracy(predicted: &[usize], gold: &[usize], k: usize) -> Result<f64> {
    if predicted.len() != gold.len() {
        return Err(Error::Alignment(format!(
            "{} predictions for {} gold labels",
            predicted.len(),
            gold.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &g) in predicted.iter().zip(gold) {
        if p >= k || g >= k {
            return Err(Error::Alignment(format!("label outside 0..{k}")));
        }
        confusion[p][g] += 1;
    }
    let mut mapping: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut mapping, 0, &mut |m| {
        best = best.max((0..k).map(|p| confusion[p][m[p]]).sum());
    });
    Ok(best as f64 / predicted.len() as f64)
}

fn permute(items: &mut [usize], from: usize, visit: &mut dyn FnMut(&[usize])) {
    if from == items.len() {
        visit(items);
        return;
    }
    for i in from..items.len() {
        items.swap(from, i);
        permute(items, from + 1, visit);
        items.swap(from, i);
    }
}

/// Accuracy of always predicting the most frequent training tag (ties to the
/// smaller tag).
pub fn majority_baseline(train: &[&str], test: &[&str]) -> Result<f64> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for tag in train {
        *counts.entry(tag).or_default() += 1;
    }
    let (majority, _) = counts
        .iter()
        .fold(None, |best: Option<(&str, usize)>, (tag, n)| match best {
            Some((_, m)) if m >= *n => best,
            _ => Some((tag, *n)),
        })
        .expect("train is non-empty");
    Ok(test.iter().filter(|t| **t == majority).count() as f64 / test.len() as f64)
}
