//! Seeded synthetic corpora drawn from a known HMM, for benchmarking
//! learning from weakened labels.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annotation::{AnnotationRecord, Document, Entry, GtMode, Layer, Style, TagSet, Target};
use crate::error::Result;
use crate::io::CorpusBundle;
use crate::uncertainty::World;

/// Annotator id of generated gold labels.
pub const GOLD_ANNOTATOR: &str = "gold";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub tags: usize,
    pub vocabulary: usize,
    pub train_sentences: usize,
    pub test_sentences: usize,
    pub min_length: usize,
    pub max_length: usize,
    pub sentences_per_document: usize,
    /// Emission mass a tag puts on its own block of words.
    pub own_mass: f64,
    /// Transition mass on each tag's preferred successor.
    pub successor_mass: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            tags: 5,
            vocabulary: 50,
            train_sentences: 200,
            test_sentences: 50,
            min_length: 5,
            max_length: 15,
            sentences_per_document: 10,
            own_mass: 0.8,
            successor_mass: 0.6,
            seed: 42,
        }
    }
}

/// The generating model and the corpora drawn from it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub tags: Vec<String>,
    pub words: Vec<String>,
    pub initial: Vec<f64>,
    pub transitions: Vec<Vec<f64>>,
    pub emissions: Vec<Vec<f64>>,
    /// Documents, POS tag set and one precise gold record per token.
    pub train: CorpusBundle,
    pub test: CorpusBundle,
}

fn random_row(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| 0.1 + rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn sample(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let mut u = rng.random::<f64>();
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

fn pseudowords(rng: &mut ChaCha8Rng, count: usize) -> Vec<String> {
    const ONSETS: [&str; 12] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t"];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut words: Vec<String> = Vec::with_capacity(count);
    while words.len() < count {
        let syllables = rng.random_range(1..=3);
        let word: String = (0..syllables)
            .map(|_| {
                format!(
                    "{}{}",
                    ONSETS[rng.random_range(0..ONSETS.len())],
                    VOWELS[rng.random_range(0..VOWELS.len())]
                )
            })
            .collect();
        if !words.contains(&word) {
            words.push(word);
        }
    }
    words
}

impl SyntheticCorpus {
    pub fn generate(config: &SyntheticConfig) -> Result<SyntheticCorpus> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let k = config.tags;
        let v = config.vocabulary;
        let tags: Vec<String> = (1..=k).map(|i| format!("T{i}")).collect();
        let words = pseudowords(&mut rng, v);

        let initial = random_row(&mut rng, k);
        let transitions: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let rest = random_row(&mut rng, k);
                let next = (i + 1) % k;
                (0..k)
                    .map(|j| {
                        (1.0 - config.successor_mass) * rest[j] + if j == next { config.successor_mass } else { 0.0 }
                    })
                    .collect()
            })
            .collect();
        let block = v / k;
        let emissions: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let own = random_row(&mut rng, block);
                let rest = random_row(&mut rng, v);
                (0..v)
                    .map(|w| {
                        let mine = w / block == i && w < block * k;
                        (1.0 - config.own_mass) * rest[w] + if mine { config.own_mass * own[w % block] } else { 0.0 }
                    })
                    .collect()
            })
            .collect();

        let tagset = TagSet::new(
            Layer::Pos,
            World::Closed,
            tags.iter().map(|t| (t.clone(), format!("synthetic tag {t}"), None)),
        )?;
        let mut draw = |count: usize, prefix: &str| -> Result<CorpusBundle> {
            let mut bundle = CorpusBundle::default();
            bundle.tagsets.insert(Layer::Pos, tagset.clone());
            let sentences: Vec<Vec<(usize, usize)>> = (0..count)
                .map(|_| {
                    let len = rng.random_range(config.min_length..=config.max_length);
                    let mut state = sample(&mut rng, &initial);
                    (0..len)
                        .map(|t| {
                            if t > 0 {
                                state = sample(&mut rng, &transitions[state]);
                            }
                            (state, sample(&mut rng, &emissions[state]))
                        })
                        .collect()
                })
                .collect();
            for (d, chunk) in sentences.chunks(config.sentences_per_document.max(1)).enumerate() {
                let doc_id = format!("{prefix}-{d:03}");
                let document = Document::new(
                    doc_id.clone(),
                    None,
                    chunk.iter().map(|s| s.iter().map(|(_, w)| words[*w].clone())),
                )?;
                for (index, (tag, _)) in chunk.iter().flatten().enumerate() {
                    bundle.annotations.push(AnnotationRecord::new(
                        Target::token(doc_id.clone(), index),
                        Layer::Pos,
                        GOLD_ANNOTATOR,
                        GtMode::Precise,
                        Style::PreciseTag,
                        vec![Entry::tag(tags[*tag].clone())],
                    ));
                }
                bundle.documents.push(document);
            }
            Ok(bundle)
        };
        let train = draw(config.train_sentences, "train")?;
        let test = draw(config.test_sentences, "test")?;
        Ok(SyntheticCorpus {
            tags,
            words,
            initial,
            transitions,
            emissions,
            train,
            test,
        })
    }
}

/// Gold tag per token, keyed by (document, index).
pub fn gold_tags(bundle: &CorpusBundle) -> BTreeMap<(String, usize), String> {
    bundle
        .annotations
        .iter()
        .filter(|r| r.layer == Layer::Pos && r.style == Style::PreciseTag)
        .map(|r| ((r.target.doc_id.clone(), r.target.start), r.entries[0].tag.clone()))
        .collect()
}

/// Replaces a `fraction` of precise records with two-element sets holding
/// the true tag and one other tag drawn at random.
pub fn weaken(bundle: &CorpusBundle, fraction: f64, seed: u64) -> CorpusBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = bundle.clone();
    let frame = match bundle.tagset(Layer::Pos) {
        Some(tagset) => tagset.frame().clone(),
        None => return out,
    };
    let mut positions: Vec<usize> = (0..out.annotations.len())
        .filter(|&i| out.annotations[i].style == Style::PreciseTag)
        .collect();
    positions.shuffle(&mut rng);
    let chosen = (positions.len() as f64 * fraction).round() as usize;
    positions.truncate(chosen);
    positions.sort_unstable();
    for i in positions {
        let record = &mut out.annotations[i];
        let truth = record.entries[0].tag.clone();
        let others: Vec<&str> = frame
            .elements()
            .iter()
            .map(String::as_str)
            .filter(|t| *t != truth)
            .collect();
        let Some(other) = others.choose(&mut rng) else {
            continue;
        };
        let mut pair = [truth, other.to_string()];
        pair.sort();
        record.style = Style::SetValued;
        record.entries = pair.into_iter().map(Entry::tag).collect();
    }
    out
}

/// The same bundle without any annotations.
pub fn strip_labels(bundle: &CorpusBundle) -> CorpusBundle {
    CorpusBundle {
        annotations: Vec::new(),
        ..bundle.clone()
    }
}
