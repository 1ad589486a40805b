//! Axioms of the uncertainty calculi, checked on one random instance.

use std::sync::Arc;

use gradtag_core::uncertainty::{
    CombineMode, Frame, FuzzyTagSet, IndiscernibilityPartition, PossibilityDistribution, ProbabilityDistribution,
    TagSubset, World,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-9;

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn random_degrees(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    (0..k)
        .map(|_| match rng.random_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random::<f64>(),
        })
        .collect()
}

fn random_subset(rng: &mut ChaCha8Rng, frame: &Arc<Frame>) -> TagSubset {
    TagSubset::from_mask(frame, (0..frame.len()).map(|_| rng.random_bool(0.5)).collect()).unwrap()
}

fn random_partition(rng: &mut ChaCha8Rng, frame: &Arc<Frame>) -> IndiscernibilityPartition {
    let mut tags: Vec<&str> = frame.elements().iter().map(String::as_str).collect();
    tags.shuffle(rng);
    let mut granules: Vec<Vec<&str>> = Vec::new();
    for tag in tags {
        match granules.last_mut() {
            Some(last) if rng.random_bool(0.5) => last.push(tag),
            _ => granules.push(vec![tag]),
        }
    }
    IndiscernibilityPartition::new(frame, granules).unwrap()
}

/// Brute-force Π(A) = max over members.
fn possibility_oracle(degrees: &[f64], set: &TagSubset) -> f64 {
    set.positions().map(|i| degrees[i]).fold(0.0, f64::max)
}

/// Runs every law on one instance drawn from `seed`, over at most `max_tags` tags.
pub fn check(seed: u64, max_tags: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=max_tags);
    let world = if rng.random_bool(0.5) {
        World::Open
    } else {
        World::Closed
    };
    let frame = Frame::new((0..k).map(|i| format!("t{i}")), world)
        .unwrap()
        .into_shared();
    let a = random_subset(&mut rng, &frame);
    let b = random_subset(&mut rng, &frame);
    let union = a.union(&b).unwrap();
    let meet = a.intersection(&b).unwrap();

    // possibility: maxitivity, duality with necessity, monotonicity
    let degrees = random_degrees(&mut rng, k);
    let pi = PossibilityDistribution::from_degrees(&frame, degrees.clone()).unwrap();
    let p = |s: &TagSubset| pi.possibility_of(s).unwrap();
    let n = |s: &TagSubset| pi.necessity_of(s).unwrap();
    ensure(
        p(&a) == possibility_oracle(&degrees, &a),
        "possibility is the max over members",
    )?;
    ensure(p(&union) == p(&a).max(p(&b)), "maxitivity")?;
    ensure(n(&meet) == n(&a).min(n(&b)), "minitivity of necessity")?;
    ensure(p(&TagSubset::empty(&frame)) == 0.0, "possibility of the empty event")?;
    ensure(
        p(&TagSubset::full(&frame)) == pi.height(),
        "possibility of the frame is the height",
    )?;
    ensure(p(&meet) <= p(&a) && p(&a) <= p(&union), "possibility monotonicity")?;
    ensure(n(&meet) <= n(&a) && n(&a) <= n(&union), "necessity monotonicity")?;
    if pi.is_normal() {
        ensure(n(&a) <= p(&a), "necessity below possibility")?;
        ensure(n(&a) == 0.0 || p(&a) == 1.0, "N(A) > 0 implies Π(A) = 1")?;
    }
    ensure(pi.is_subnormal() == (pi.height() < 1.0), "subnormal flag")?;

    // probability: additivity, monotonicity, normalization
    let weights = super::random_row(&mut rng, k);
    let prob = ProbabilityDistribution::from_weights(&frame, weights.clone()).unwrap();
    let pr = |s: &TagSubset| prob.probability_of(s).unwrap();
    ensure(
        (weights.iter().sum::<f64>() - 1.0).abs() < EPS,
        "probabilities sum to one",
    )?;
    ensure((pr(&union) + pr(&meet) - pr(&a) - pr(&b)).abs() < EPS, "additivity")?;
    ensure(
        (pr(&a) + pr(&a.complement()) - 1.0).abs() < EPS,
        "complement additivity",
    )?;
    ensure(
        pr(&meet) <= pr(&a) + EPS && pr(&a) <= pr(&union) + EPS,
        "probability monotonicity",
    )?;
    ensure(pr(&TagSubset::empty(&frame)) == 0.0, "probability of the empty event")?;
    ensure(prob.entropy() <= (k as f64).ln() + EPS, "entropy bound")?;

    // rough sets: bounds and duality
    let partition = random_partition(&mut rng, &frame);
    let approx = partition.approximate(&a).unwrap();
    let complement = partition.approximate(&a.complement()).unwrap();
    ensure(
        approx.lower.is_subset_of(&a).unwrap(),
        "lower approximation inside the set",
    )?;
    ensure(
        a.is_subset_of(&approx.upper).unwrap(),
        "set inside the upper approximation",
    )?;
    ensure(approx.lower == complement.upper.complement(), "lower = ¬upper(¬A)")?;
    ensure(approx.upper == complement.lower.complement(), "upper = ¬lower(¬A)")?;
    let approx_b = partition.approximate(&b).unwrap();
    let approx_union = partition.approximate(&union).unwrap();
    ensure(
        approx_union.upper == approx.upper.union(&approx_b.upper).unwrap(),
        "upper approximation distributes over union",
    )?;
    ensure(
        partition.approximate(&meet).unwrap().lower == approx.lower.intersection(&approx_b.lower).unwrap(),
        "lower approximation distributes over intersection",
    )?;

    // fuzzy connectives: De Morgan and involution
    let fa = FuzzyTagSet::new(
        &frame,
        frame
            .elements()
            .iter()
            .map(String::as_str)
            .zip(random_degrees(&mut rng, k)),
    )
    .unwrap();
    let fb = FuzzyTagSet::new(
        &frame,
        frame
            .elements()
            .iter()
            .map(String::as_str)
            .zip(random_degrees(&mut rng, k)),
    )
    .unwrap();
    ensure(
        fa.union(&fb).unwrap().complement() == fa.complement().intersection(&fb.complement()).unwrap(),
        "De Morgan",
    )?;
    ensure(fa.complement().complement() == fa, "involution")?;
    ensure(FuzzyTagSet::crisp(&a).support() == a, "crisp support")?;

    // possibilistic fusion
    let other = PossibilityDistribution::from_degrees(&frame, random_degrees(&mut rng, k)).unwrap();
    let (conj, conflict) = pi.combine(&other, CombineMode::Conjunctive).unwrap();
    let (conj2, conflict2) = other.combine(&pi, CombineMode::Conjunctive).unwrap();
    let (disj, _) = pi.combine(&other, CombineMode::Disjunctive).unwrap();
    ensure(
        conj.degrees() == conj2.degrees() && conflict == conflict2,
        "conjunction commutes",
    )?;
    ensure((0.0..=1.0).contains(&conflict), "conflict in [0, 1]")?;
    ensure(
        (conflict - (1.0 - conj.height())).abs() < EPS,
        "conflict is one minus height",
    )?;
    ensure(
        pi.combine(&pi, CombineMode::Conjunctive).unwrap().0.degrees() == pi.degrees(),
        "idempotence",
    )?;
    ensure(
        disj.degrees().iter().zip(pi.degrees()).all(|(d, x)| d >= x),
        "disjunction dominates its inputs",
    )?;
    Ok(())
}
