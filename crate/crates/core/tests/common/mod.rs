//! Exhaustive reference computations shared by the integration tests.

#![allow(dead_code)]

pub mod gen;
pub mod laws;

use std::sync::Arc;

use gradtag_core::tagger::{TaggerModel, Vocabulary};
use gradtag_core::uncertainty::{Frame, World};
use rand::Rng;

pub fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

pub fn random_row<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    normalize((0..len).map(|_| 0.05 + rng.random::<f64>()).collect())
}

pub fn frame(tags: usize) -> Arc<Frame> {
    Frame::new((0..tags).map(|i| format!("T{i}")), World::Closed)
        .unwrap()
        .into_shared()
}

/// A model over `tags` tags and `words` known forms `w0..`, all parameters random.
pub fn random_model<R: Rng>(rng: &mut R, tags: usize, words: usize) -> TaggerModel {
    let vocab = Vocabulary::new((0..words).map(|i| format!("w{i}")));
    let columns = vocab.size();
    TaggerModel::from_parameters(
        frame(tags),
        vocab,
        random_row(rng, tags),
        (0..tags).map(|_| random_row(rng, tags)).collect(),
        (0..tags).map(|_| random_row(rng, columns)).collect(),
    )
    .unwrap()
}

/// Every tag sequence of length `n` over `k` tags.
pub fn all_paths(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut paths = vec![Vec::new()];
    for _ in 0..n {
        paths = paths
            .into_iter()
            .flat_map(|p| {
                (0..k).map(move |j| {
                    let mut q = p.clone();
                    q.push(j);
                    q
                })
            })
            .collect();
    }
    paths
}

/// Every observation sequence of length 1..=max_len over `columns` symbols.
pub fn all_sequences(columns: usize, max_len: usize) -> Vec<Vec<usize>> {
    (1..=max_len).flat_map(|n| all_paths(columns, n)).collect()
}

/// Joint weight of a path: initial × transitions × emissions × constraint degrees.
pub fn path_weight(model: &TaggerModel, obs: &[usize], path: &[usize], constraints: Option<&[Vec<f64>]>) -> f64 {
    let pi = model.initial_weights();
    let a = model.transition_weights();
    let b = model.emission_weights();
    let c = |t: usize, j: usize| constraints.map_or(1.0, |c| c[t][j]);
    let mut w = pi[path[0]] * b[path[0]][obs[0]] * c(0, path[0]);
    for t in 1..obs.len() {
        w *= a[path[t - 1]][path[t]] * b[path[t]][obs[t]] * c(t, path[t]);
    }
    w
}

pub struct Enumerated {
    pub likelihood: f64,
    pub gamma: Vec<Vec<f64>>,
    /// Expected transition counts summed over positions.
    pub xi: Vec<Vec<f64>>,
    pub best_path: Vec<usize>,
    pub best_weight: f64,
}

/// Brute-force marginals and expected counts by summing over all paths.
pub fn enumerate(model: &TaggerModel, obs: &[usize], constraints: Option<&[Vec<f64>]>) -> Enumerated {
    let k = model.tag_count();
    let n = obs.len();
    let mut likelihood = 0.0;
    let mut gamma = vec![vec![0.0; k]; n];
    let mut xi = vec![vec![0.0; k]; k];
    let mut best_path = Vec::new();
    let mut best_weight = -1.0;
    for path in all_paths(k, n) {
        let w = path_weight(model, obs, &path, constraints);
        likelihood += w;
        for (t, &j) in path.iter().enumerate() {
            gamma[t][j] += w;
            if t > 0 {
                xi[path[t - 1]][j] += w;
            }
        }
        if w > best_weight {
            best_weight = w;
            best_path = path;
        }
    }
    for row in gamma.iter_mut().chain(xi.iter_mut()) {
        row.iter_mut().for_each(|x| *x /= likelihood);
    }
    Enumerated {
        likelihood,
        gamma,
        xi,
        best_path,
        best_weight,
    }
}
