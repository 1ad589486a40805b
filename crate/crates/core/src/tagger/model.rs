use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::io::format_number;
use crate::uncertainty::{Frame, ProbabilityDistribution, TOLERANCE};

/// Hyperparameters of constrained EM training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Add-λ pseudo-count for initial and transition rows.
    pub lambda_transition: f64,
    /// Add-λ pseudo-count for emission rows.
    pub lambda_emission: f64,
    pub max_iterations: usize,
    /// Stop when the relative objective improvement falls below this.
    pub tolerance: f64,
    pub seed: u64,
    /// Forms seen fewer times fall into the unknown-word classes.
    pub min_word_count: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda_transition: 0.1,
            lambda_emission: 0.01,
            max_iterations: 100,
            tolerance: 1e-6,
            seed: 42,
            min_word_count: 2,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda_transition", self.lambda_transition),
            ("lambda_emission", self.lambda_emission),
            ("tolerance", self.tolerance),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidRecord(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(())
    }

    /// Stable `key=value;...` rendering stored in model files.
    pub fn canonical(&self) -> String {
        format!(
            "lambda_transition={};lambda_emission={};max_iterations={};tolerance={};seed={};min_word_count={}",
            format_number(self.lambda_transition),
            format_number(self.lambda_emission),
            self.max_iterations,
            format_number(self.tolerance),
            self.seed,
            self.min_word_count
        )
    }

    pub fn hash(&self) -> String {
        short_hash(self.canonical().as_bytes())
    }
}

pub(crate) fn short_hash(bytes: &[u8]) -> String {
    hex::encode(&Sha256::digest(bytes)[..8])
}

/// Hash of a frame's world flag and ordered tags.
pub fn frame_hash(frame: &Frame) -> String {
    let mut text = frame.world().to_string();
    for tag in frame.elements() {
        text.push('\n');
        text.push_str(tag);
    }
    short_hash(text.as_bytes())
}

/// What training did.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingMeta {
    /// Number of completed M-steps.
    pub iterations: usize,
    pub converged: bool,
    /// Penalized objective (log-likelihood plus smoothing prior) after each
    /// M-step; entry 0 is the initialization.
    pub objective_trace: Vec<f64>,
    /// Constrained data log-likelihood at the same points.
    pub log_likelihood_trace: Vec<f64>,
    pub config: String,
    pub config_hash: String,
    pub seed: u64,
}

impl TrainingMeta {
    pub fn final_log_likelihood(&self) -> Option<f64> {
        self.log_likelihood_trace.last().copied()
    }
}

/// First-order HMM over a tag frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerModel {
    pub(crate) frame: Arc<Frame>,
    pub(crate) vocabulary: Vocabulary,
    pub(crate) initial: Vec<f64>,
    pub(crate) transitions: Vec<Vec<f64>>,
    pub(crate) emissions: Vec<Vec<f64>>,
    pub meta: TrainingMeta,
}

fn check_row(row: &[f64], len: usize, what: &str) -> Result<()> {
    if row.len() != len {
        return Err(Error::ModelMismatch(format!(
            "{what} has {} entries, expected {len}",
            row.len()
        )));
    }
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::ModelMismatch(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let total: f64 = row.iter().sum();
    if (total - 1.0).abs() > TOLERANCE {
        return Err(Error::ModelMismatch(format!("{what} sums to {total}")));
    }
    Ok(())
}

impl TaggerModel {
    /// Assembles a model from explicit parameter tables. Emission rows have
    /// one column per vocabulary word plus the four unknown-word classes.
    pub fn from_parameters(
        frame: Arc<Frame>,
        vocabulary: Vocabulary,
        initial: Vec<f64>,
        transitions: Vec<Vec<f64>>,
        emissions: Vec<Vec<f64>>,
    ) -> Result<TaggerModel> {
        let k = frame.len();
        if k == 0 {
            return Err(Error::InvalidFrame("frame has no elements".into()));
        }
        check_row(&initial, k, "initial distribution")?;
        if transitions.len() != k || emissions.len() != k {
            return Err(Error::ModelMismatch("one row per tag is required".into()));
        }
        for (i, row) in transitions.iter().enumerate() {
            check_row(row, k, &format!("transition row {}", frame.tag(i)))?;
        }
        for (i, row) in emissions.iter().enumerate() {
            check_row(row, vocabulary.size(), &format!("emission row {}", frame.tag(i)))?;
        }
        Ok(TaggerModel {
            frame,
            vocabulary,
            initial,
            transitions,
            emissions,
            meta: TrainingMeta::default(),
        })
    }

    /// Starting point for EM: uniform initial and transition rows, emission
    /// rows uniform up to a seeded perturbation.
    pub fn initialize(frame: Arc<Frame>, vocabulary: Vocabulary, seed: u64) -> Result<TaggerModel> {
        let k = frame.len();
        let v = vocabulary.size();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let emissions = (0..k)
            .map(|_| {
                let raw: Vec<f64> = (0..v).map(|_| 1.0 + 0.5 * rng.random::<f64>()).collect();
                let total: f64 = raw.iter().sum();
                raw.into_iter().map(|x| x / total).collect()
            })
            .collect();
        TaggerModel::from_parameters(
            frame,
            vocabulary,
            vec![1.0 / k as f64; k],
            vec![vec![1.0 / k as f64; k]; k],
            emissions,
        )
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn tag_count(&self) -> usize {
        self.frame.len()
    }

    pub fn initial(&self) -> ProbabilityDistribution {
        ProbabilityDistribution::from_weights(&self.frame, self.initial.clone()).expect("validated on construction")
    }

    pub fn transition_row(&self, from: usize) -> ProbabilityDistribution {
        ProbabilityDistribution::from_weights(&self.frame, self.transitions[from].clone())
            .expect("validated on construction")
    }

    pub fn initial_weights(&self) -> &[f64] {
        &self.initial
    }

    pub fn transition_weights(&self) -> &[Vec<f64>] {
        &self.transitions
    }

    pub fn emission_weights(&self) -> &[Vec<f64>] {
        &self.emissions
    }

    /// Emission columns for a sequence of forms.
    pub fn observe<'a, I>(&self, forms: I) -> Vec<usize>
    where
        I: IntoIterator<Item = &'a str>,
    {
        forms.into_iter().map(|f| self.vocabulary.column(f)).collect()
    }

    /// True when every parameter is strictly positive.
    pub fn is_strictly_positive(&self) -> bool {
        self.initial.iter().all(|&p| p > 0.0)
            && self.transitions.iter().flatten().all(|&p| p > 0.0)
            && self.emissions.iter().flatten().all(|&p| p > 0.0)
    }
}
