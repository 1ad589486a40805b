use super::model::TaggerModel;
use crate::error::{Error, Result};

/// Marginal tag posteriors of one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentencePosterior {
    /// `gamma[t][j]`: probability of tag `j` at token `t`.
    pub gamma: Vec<Vec<f64>>,
    /// Log-likelihood of the sentence (times its constraint weights).
    pub log_likelihood: f64,
}

/// Expected sufficient statistics accumulated over sentences.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCounts {
    pub initial: Vec<f64>,
    pub transitions: Vec<Vec<f64>>,
    pub emissions: Vec<Vec<f64>>,
    pub log_likelihood: f64,
    pub sentences: usize,
}

impl ExpectedCounts {
    pub fn zeros(tags: usize, columns: usize) -> ExpectedCounts {
        ExpectedCounts {
            initial: vec![0.0; tags],
            transitions: vec![vec![0.0; tags]; tags],
            emissions: vec![vec![0.0; columns]; tags],
            log_likelihood: 0.0,
            sentences: 0,
        }
    }

    /// Adds `other` into `self`; callers merge in a fixed order so sums are
    /// reproducible.
    pub fn merge(&mut self, other: &ExpectedCounts) {
        let add = |a: &mut [f64], b: &[f64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.initial, &other.initial);
        for (a, b) in self.transitions.iter_mut().zip(&other.transitions) {
            add(a, b);
        }
        for (a, b) in self.emissions.iter_mut().zip(&other.emissions) {
            add(a, b);
        }
        self.log_likelihood += other.log_likelihood;
        self.sentences += other.sentences;
    }
}

struct Lattice {
    /// Emission probability times constraint degree, per token and tag.
    local: Vec<Vec<f64>>,
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    scale: Vec<f64>,
}

impl TaggerModel {
    fn check_inputs(&self, observations: &[usize], constraints: Option<&[Vec<f64>]>) -> Result<()> {
        if observations.is_empty() {
            return Err(Error::EmptyDocument);
        }
        let columns = self.vocabulary.size();
        if let Some(&bad) = observations.iter().find(|&&o| o >= columns) {
            return Err(Error::ModelMismatch(format!("observation column {bad} out of range")));
        }
        if let Some(constraints) = constraints {
            if constraints.len() != observations.len() {
                return Err(Error::ModelMismatch(format!(
                    "{} constraints for {} tokens",
                    constraints.len(),
                    observations.len()
                )));
            }
            if constraints.iter().any(|c| c.len() != self.tag_count()) {
                return Err(Error::ModelMismatch("constraint width differs from the frame".into()));
            }
        }
        Ok(())
    }

    fn local_scores(&self, observations: &[usize], constraints: Option<&[Vec<f64>]>) -> Vec<Vec<f64>> {
        observations
            .iter()
            .enumerate()
            .map(|(t, &o)| {
                (0..self.tag_count())
                    .map(|j| {
                        let weight = constraints.map_or(1.0, |c| c[t][j]);
                        self.emissions[j][o] * weight
                    })
                    .collect()
            })
            .collect()
    }

    fn lattice(&self, observations: &[usize], constraints: Option<&[Vec<f64>]>) -> Result<Lattice> {
        self.check_inputs(observations, constraints)?;
        let k = self.tag_count();
        let n = observations.len();
        let local = self.local_scores(observations, constraints);
        let mut alpha = vec![vec![0.0; k]; n];
        let mut scale = vec![0.0; n];
        for t in 0..n {
            for j in 0..k {
                let prior = if t == 0 {
                    self.initial[j]
                } else {
                    (0..k).map(|i| alpha[t - 1][i] * self.transitions[i][j]).sum()
                };
                alpha[t][j] = prior * local[t][j];
            }
            scale[t] = alpha[t].iter().sum();
            if scale[t].is_nan() || scale[t] <= 0.0 {
                return Err(Error::ModelMismatch(format!(
                    "token {t} has zero probability under the model and constraints"
                )));
            }
            alpha[t].iter_mut().for_each(|a| *a /= scale[t]);
        }
        let mut beta = vec![vec![1.0; k]; n];
        for t in (0..n - 1).rev() {
            for i in 0..k {
                beta[t][i] = (0..k)
                    .map(|j| self.transitions[i][j] * local[t + 1][j] * beta[t + 1][j])
                    .sum::<f64>()
                    / scale[t + 1];
            }
        }
        Ok(Lattice {
            local,
            alpha,
            beta,
            scale,
        })
    }

    /// Scaled forward-backward. Constraint degrees multiply the emission
    /// term as soft evidence; `None` leaves every tag unconstrained.
    pub fn posteriors(&self, observations: &[usize], constraints: Option<&[Vec<f64>]>) -> Result<SentencePosterior> {
        let lattice = self.lattice(observations, constraints)?;
        let gamma = lattice
            .alpha
            .iter()
            .zip(&lattice.beta)
            .map(|(a, b)| normalize(a.iter().zip(b).map(|(x, y)| x * y).collect()))
            .collect();
        Ok(SentencePosterior {
            gamma,
            log_likelihood: lattice.scale.iter().map(|c| c.ln()).sum(),
        })
    }

    /// Log-likelihood of a sentence, marginalizing over tag sequences.
    pub fn log_likelihood(&self, observations: &[usize], constraints: Option<&[Vec<f64>]>) -> Result<f64> {
        Ok(self
            .lattice(observations, constraints)?
            .scale
            .iter()
            .map(|c| c.ln())
            .sum())
    }

    /// Adds one sentence's expected counts to `acc`.
    #[allow(clippy::needless_range_loop)] // indices mirror the recurrences
    pub fn accumulate(
        &self,
        observations: &[usize],
        constraints: Option<&[Vec<f64>]>,
        acc: &mut ExpectedCounts,
    ) -> Result<()> {
        let lattice = self.lattice(observations, constraints)?;
        let k = self.tag_count();
        let n = observations.len();
        for t in 0..n {
            let gamma = normalize(
                lattice.alpha[t]
                    .iter()
                    .zip(&lattice.beta[t])
                    .map(|(x, y)| x * y)
                    .collect(),
            );
            for j in 0..k {
                if t == 0 {
                    acc.initial[j] += gamma[j];
                }
                acc.emissions[j][observations[t]] += gamma[j];
            }
            if t + 1 < n {
                for i in 0..k {
                    let lead = lattice.alpha[t][i] / lattice.scale[t + 1];
                    for j in 0..k {
                        acc.transitions[i][j] +=
                            lead * self.transitions[i][j] * lattice.local[t + 1][j] * lattice.beta[t + 1][j];
                    }
                }
            }
        }
        acc.log_likelihood += lattice.scale.iter().map(|c| c.ln()).sum::<f64>();
        acc.sentences += 1;
        Ok(())
    }

    /// Most probable tag sequence as frame positions. Among equally scored
    /// predecessors and final states the lexicographically smaller tag wins.
    pub fn viterbi(&self, observations: &[usize], constraints: Option<&[Vec<f64>]>) -> Result<Vec<usize>> {
        self.check_inputs(observations, constraints)?;
        let k = self.tag_count();
        let n = observations.len();
        let local = self.local_scores(observations, constraints);
        let prefer = |a: usize, b: usize| self.frame.tag(a) < self.frame.tag(b);
        let pick = |scores: &mut dyn Iterator<Item = (usize, f64)>| {
            let mut best: Option<(usize, f64)> = None;
            for (i, s) in scores {
                best = match best {
                    Some((bi, bs)) if bs > s || (bs == s && !prefer(i, bi)) => Some((bi, bs)),
                    _ => Some((i, s)),
                };
            }
            best.expect("frame is non-empty")
        };
        let mut delta: Vec<f64> = (0..k).map(|j| self.initial[j].ln() + local[0][j].ln()).collect();
        let mut back = vec![vec![0usize; k]; n];
        for t in 1..n {
            let mut next = vec![0.0; k];
            for j in 0..k {
                let (arg, score) = pick(&mut (0..k).map(|i| (i, delta[i] + self.transitions[i][j].ln())));
                back[t][j] = arg;
                next[j] = score + local[t][j].ln();
            }
            delta = next;
        }
        let (last, score) = pick(&mut delta.iter().copied().enumerate());
        if score == f64::NEG_INFINITY {
            return Err(Error::ModelMismatch("every tag sequence has zero probability".into()));
        }
        let mut path = vec![last; n];
        for t in (1..n).rev() {
            path[t - 1] = back[t][path[t]];
        }
        Ok(path)
    }

    /// Joint log-probability of observations and a tag path, including
    /// constraint degrees.
    pub fn path_log_score(
        &self,
        observations: &[usize],
        path: &[usize],
        constraints: Option<&[Vec<f64>]>,
    ) -> Result<f64> {
        self.check_inputs(observations, constraints)?;
        if path.len() != observations.len() || path.iter().any(|&j| j >= self.tag_count()) {
            return Err(Error::ModelMismatch("path does not fit the sentence".into()));
        }
        let local = self.local_scores(observations, constraints);
        let mut score = self.initial[path[0]].ln() + local[0][path[0]].ln();
        for t in 1..path.len() {
            score += self.transitions[path[t - 1]][path[t]].ln() + local[t][path[t]].ln();
        }
        Ok(score)
    }
}

fn normalize(mut weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    weights
}
