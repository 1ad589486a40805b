//! Machine annotator against exhaustive oracles.

mod common;

use common::*;
use gradtag_core::annotation::{AnnotationRecord, Document, Entry, GtMode, Layer, Style, TagSet, Target};
use gradtag_core::io::CorpusBundle;
use gradtag_core::tagger::*;
use gradtag_core::uncertainty::{entropy, ProbabilityDistribution, World};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-9;

#[test]
fn forward_backward_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let k = rng.random_range(2..=4);
        let words = rng.random_range(1..=3);
        let model = random_model(&mut rng, k, words);
        for obs in all_sequences(model.vocabulary().size(), 3) {
            let oracle = enumerate(&model, &obs, None);
            let post = model.posteriors(&obs, None).unwrap();
            assert!((post.log_likelihood - oracle.likelihood.ln()).abs() < EPS);
            for (got, want) in post.gamma.iter().flatten().zip(oracle.gamma.iter().flatten()) {
                assert!((got - want).abs() < EPS);
            }
        }
    }
}

#[test]
fn constrained_posteriors_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let k = rng.random_range(2..=4);
        let model = random_model(&mut rng, k, 4);
        let n = rng.random_range(1..=3);
        let obs: Vec<usize> = (0..n).map(|_| rng.random_range(0..model.vocabulary().size())).collect();
        let constraints: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut row: Vec<f64> = (0..k)
                    .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() })
                    .collect();
                row[rng.random_range(0..k)] = 1.0;
                row
            })
            .collect();
        let oracle = enumerate(&model, &obs, Some(&constraints));
        let post = model.posteriors(&obs, Some(&constraints)).unwrap();
        assert!((post.log_likelihood - oracle.likelihood.ln()).abs() < EPS);
        for (got, want) in post.gamma.iter().flatten().zip(oracle.gamma.iter().flatten()) {
            assert!((got - want).abs() < EPS);
        }
    }
}

#[test]
fn expected_counts_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let k = rng.random_range(2..=3);
        let model = random_model(&mut rng, k, 3);
        let n = rng.random_range(1..=3);
        let obs: Vec<usize> = (0..n).map(|_| rng.random_range(0..model.vocabulary().size())).collect();
        let mut acc = ExpectedCounts::zeros(k, model.vocabulary().size());
        model.accumulate(&obs, None, &mut acc).unwrap();
        let oracle = enumerate(&model, &obs, None);
        for j in 0..k {
            assert!((acc.initial[j] - oracle.gamma[0][j]).abs() < EPS);
            for i in 0..k {
                assert!((acc.transitions[i][j] - oracle.xi[i][j]).abs() < EPS);
            }
            for &o in &obs {
                let want: f64 = (0..n).filter(|&t| obs[t] == o).map(|t| oracle.gamma[t][j]).sum();
                assert!((acc.emissions[j][o] - want).abs() < EPS);
            }
        }
    }
}

#[test]
fn one_hot_constraints_pin_the_posterior() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let model = random_model(&mut rng, 4, 5);
        let n = rng.random_range(1..=6);
        let obs: Vec<usize> = (0..n).map(|_| rng.random_range(0..model.vocabulary().size())).collect();
        let gold: Vec<usize> = (0..n).map(|_| rng.random_range(0..4)).collect();
        let constraints: Vec<Vec<f64>> = gold
            .iter()
            .map(|&g| (0..4).map(|j| if j == g { 1.0 } else { 0.0 }).collect())
            .collect();
        let post = model.posteriors(&obs, Some(&constraints)).unwrap();
        for (row, want) in post.gamma.iter().zip(&constraints) {
            for (a, b) in row.iter().zip(want) {
                assert!((a - b).abs() < EPS);
            }
        }
    }
}

#[test]
fn single_token_posterior_by_hand() {
    // initial (0.6, 0.4); emissions of `x`: 0.2 under A, 0.5 under B
    let vocab = Vocabulary::new(["x"]);
    let frame = gradtag_core::uncertainty::Frame::new(["A", "B"], World::Closed)
        .unwrap()
        .into_shared();
    let model = TaggerModel::from_parameters(
        frame,
        vocab,
        vec![0.6, 0.4],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        vec![vec![0.2, 0.2, 0.2, 0.2, 0.2], vec![0.5, 0.125, 0.125, 0.125, 0.125]],
    )
    .unwrap();
    let post = model.posteriors(&[0], None).unwrap();
    // 0.12 / (0.12 + 0.2) and 0.2 / 0.32
    assert!((post.gamma[0][0] - 0.375).abs() < EPS);
    assert!((post.gamma[0][1] - 0.625).abs() < EPS);
    assert!((post.log_likelihood - 0.32f64.ln()).abs() < EPS);
}

fn deterministic_model() -> TaggerModel {
    let frame = gradtag_core::uncertainty::Frame::new(["A", "B"], World::Closed)
        .unwrap()
        .into_shared();
    TaggerModel::from_parameters(
        frame,
        Vocabulary::new(["x", "y"]),
        vec![1.0, 0.0],
        vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        vec![vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]],
    )
    .unwrap()
}

#[test]
fn deterministic_model_has_zero_entropy() {
    let model = deterministic_model();
    let doc = Document::new("d", None, [vec!["x", "y", "x"], vec!["x", "y"]]).unwrap();
    let out = tag_document(&model, &doc, OPEN_WORLD_THRESHOLD).unwrap();
    assert_eq!(out.tokens.len(), 5);
    for token in &out.tokens {
        assert_eq!(token.entropy, 0.0);
    }
    let tags: Vec<&str> = out.tokens.iter().map(|t| t.best_tag.as_str()).collect();
    assert_eq!(tags, ["A", "B", "A", "A", "B"]);
}

#[test]
fn empty_document_is_rejected() {
    let model = deterministic_model();
    let doc = Document::new("d", None, Vec::<Vec<String>>::new()).unwrap();
    assert_eq!(tag_document(&model, &doc, 0.5), Err(gradtag_core::Error::EmptyDocument));
}

#[test]
fn viterbi_is_the_enumerated_argmax_and_beats_random_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let k = rng.random_range(2..=4);
        let model = random_model(&mut rng, k, 5);
        let n = rng.random_range(1..=4);
        let obs: Vec<usize> = (0..n).map(|_| rng.random_range(0..model.vocabulary().size())).collect();
        let path = model.viterbi(&obs, None).unwrap();
        let oracle = enumerate(&model, &obs, None);
        assert_eq!(path, oracle.best_path);
    }
    let model = random_model(&mut rng, 4, 5);
    let obs: Vec<usize> = (0..12)
        .map(|_| rng.random_range(0..model.vocabulary().size()))
        .collect();
    let best = model.viterbi(&obs, None).unwrap();
    let best_score = model.path_log_score(&obs, &best, None).unwrap();
    for _ in 0..1000 {
        let path: Vec<usize> = (0..obs.len()).map(|_| rng.random_range(0..4)).collect();
        assert!(best_score >= model.path_log_score(&obs, &path, None).unwrap());
    }
}

#[test]
fn viterbi_ties_go_to_the_smaller_tag() {
    // frame order B, A: ties must still resolve to `A`
    let frame = gradtag_core::uncertainty::Frame::new(["B", "A"], World::Closed)
        .unwrap()
        .into_shared();
    let model = TaggerModel::from_parameters(
        frame,
        Vocabulary::new(["x"]),
        vec![0.5, 0.5],
        vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        vec![vec![0.2; 5], vec![0.2; 5]],
    )
    .unwrap();
    let path = model.viterbi(&[0, 0, 0], None).unwrap();
    assert_eq!(path, [1, 1, 1]);
}

fn toy_data(rng: &mut ChaCha8Rng, k: usize, words: usize, sentences: usize, masked: f64) -> TrainingData {
    let frame = frame(k);
    TrainingData {
        frame,
        sentences: (0..sentences)
            .map(|s| {
                let n = rng.random_range(1..=4);
                TrainingSentence {
                    doc_id: format!("d{s}"),
                    start: 0,
                    forms: (0..n).map(|_| format!("w{}", rng.random_range(0..words))).collect(),
                    constraints: (0..n)
                        .map(|_| {
                            if rng.random_bool(masked) {
                                let mut row: Vec<f64> =
                                    (0..k).map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 }).collect();
                                row[rng.random_range(0..k)] = 1.0;
                                row
                            } else {
                                vec![1.0; k]
                            }
                        })
                        .collect(),
                }
            })
            .collect(),
        zero_masks: Vec::new(),
        skipped: Vec::new(),
    }
}

#[test]
fn unconstrained_toy_likelihood_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let data = toy_data(&mut rng, 2, 3, 6, 0.0);
    let config = TrainConfig {
        min_word_count: 1,
        max_iterations: 5,
        ..TrainConfig::default()
    };
    let model = train_on(&data, &config).unwrap();
    let mut total = 0.0;
    for s in &data.sentences {
        let obs = model.observe(s.forms.iter().map(String::as_str));
        total += enumerate(&model, &obs, None).likelihood.ln();
    }
    assert!((model.meta.final_log_likelihood().unwrap() - total).abs() < EPS);
}

#[test]
fn supervised_single_iteration_is_smoothed_relative_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k = 3;
    let mut data = toy_data(&mut rng, k, 4, 20, 0.0);
    let mut gold = Vec::new();
    for s in &mut data.sentences {
        let tags: Vec<usize> = s.forms.iter().map(|_| rng.random_range(0..k)).collect();
        s.constraints = tags
            .iter()
            .map(|&g| (0..k).map(|j| if j == g { 1.0 } else { 0.0 }).collect())
            .collect();
        gold.push(tags);
    }
    let config = TrainConfig {
        min_word_count: 1,
        max_iterations: 1,
        ..TrainConfig::default()
    };
    let model = train_on(&data, &config).unwrap();
    assert_eq!(model.meta.iterations, 1);

    let (lt, le) = (config.lambda_transition, config.lambda_emission);
    let v = model.vocabulary().size();
    let mut init = vec![0.0; k];
    let mut trans = vec![vec![0.0; k]; k];
    let mut emit = vec![vec![0.0; v]; k];
    for (s, tags) in data.sentences.iter().zip(&gold) {
        init[tags[0]] += 1.0;
        for t in 0..tags.len() {
            emit[tags[t]][model.vocabulary().column(&s.forms[t])] += 1.0;
            if t > 0 {
                trans[tags[t - 1]][tags[t]] += 1.0;
            }
        }
    }
    let smooth = |row: &Vec<f64>, l: f64| {
        let total: f64 = row.iter().sum::<f64>() + l * row.len() as f64;
        row.iter().map(|c| (c + l) / total).collect::<Vec<_>>()
    };
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < EPS);
    assert!(close(model.initial_weights(), &smooth(&init, lt)));
    for i in 0..k {
        assert!(close(&model.transition_weights()[i], &smooth(&trans[i], lt)));
        assert!(close(&model.emission_weights()[i], &smooth(&emit[i], le)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn em_objective_never_decreases(seed in any::<u64>(), k in 2usize..=4, masked in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = toy_data(&mut rng, k, 5, 12, masked);
        let config = TrainConfig { min_word_count: 1, max_iterations: 30, seed, ..TrainConfig::default() };
        let model = train_on(&data, &config).unwrap();
        for w in model.meta.objective_trace.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12, "{:?}", model.meta.objective_trace);
        }
        prop_assert!(model.is_strictly_positive());
    }

    #[test]
    fn widening_constraints_never_lowers_likelihood(seed in any::<u64>(), k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let narrow = toy_data(&mut rng, k, 3, 5, 0.8);
        let mut wide = narrow.clone();
        for s in &mut wide.sentences {
            for row in &mut s.constraints {
                let j = rng.random_range(0..k);
                row[j] = 1.0;
            }
        }
        let config = TrainConfig { min_word_count: 1, max_iterations: 1, seed, ..TrainConfig::default() };
        let from_narrow = train_on(&narrow, &config).unwrap();
        let from_wide = train_on(&wide, &config).unwrap();
        let start = TaggerModel::initialize(narrow.frame.clone(), from_narrow.vocabulary().clone(), seed).unwrap();
        let likelihood = |model: &TaggerModel, data: &TrainingData| -> f64 {
            data.sentences.iter().map(|s| {
                let obs = model.observe(s.forms.iter().map(String::as_str));
                enumerate(model, &obs, Some(&s.constraints)).likelihood.ln()
            }).sum()
        };
        for model in [&start, &from_narrow, &from_wide] {
            prop_assert!(likelihood(model, &wide) >= likelihood(model, &narrow) - 1e-12);
        }
        let wide_best = likelihood(&from_wide, &wide).max(likelihood(&from_narrow, &wide));
        prop_assert!(wide_best >= likelihood(&from_narrow, &narrow) - 1e-12);
    }
}

fn pos_bundle(world: World) -> CorpusBundle {
    let mut bundle = CorpusBundle::default();
    let tagset = TagSet::new(
        Layer::Pos,
        world,
        ["DDS", "NA", "VAFIN", "VKFIN"].map(|t| (t.to_string(), String::new(), None)),
    )
    .unwrap();
    bundle.tagsets.insert(Layer::Pos, tagset);
    bundle.documents.push(
        Document::new(
            "d1",
            None,
            [vec!["Dat", "is", "vredebrake"], vec!["dat", "is", "vrede"]],
        )
        .unwrap(),
    );
    bundle
}

fn record(index: usize, annotator: &str, style: Style, entries: Vec<Entry>) -> AnnotationRecord {
    AnnotationRecord::new(
        Target::token("d1", index),
        Layer::Pos,
        annotator,
        GtMode::Precise,
        style,
        entries,
    )
}

#[test]
fn constraints_follow_annotation_styles() {
    let mut bundle = pos_bundle(World::Closed);
    bundle.annotations = vec![
        record(0, "a", Style::PreciseTag, vec![Entry::tag("DDS")]),
        record(1, "a", Style::SetValued, vec![Entry::tag("VKFIN"), Entry::tag("VAFIN")]),
        record(
            4,
            "a",
            Style::Ordinal,
            vec![Entry::rank("VKFIN", 3), Entry::rank("VAFIN", 2)],
        ),
        record(2, "a", Style::PreciseTag, vec![Entry::tag("NA")]),
        record(2, "b", Style::PreciseTag, vec![Entry::tag("DDS")]),
    ];
    let data = build_constraints(&bundle).unwrap();
    let c = |s: usize, t: usize| data.sentences[s].constraints[t].clone();
    assert_eq!(c(0, 0), [1.0, 0.0, 0.0, 0.0]);
    assert_eq!(c(0, 1), [0.0, 0.0, 1.0, 1.0]);
    let ordinal = c(1, 1);
    assert_eq!(ordinal[0], 0.0);
    assert!((ordinal[2] - 1.0 / 3.0).abs() < 1e-12 && (ordinal[3] - 2.0 / 3.0).abs() < 1e-12);
    // conflicting annotators: excluded from supervision
    assert_eq!(c(0, 2), [1.0; 4]);
    assert_eq!(data.zero_masks.len(), 1);
    assert_eq!(data.zero_masks[0].target, Target::token("d1", 2));
    assert_eq!(c(1, 0), [1.0; 4]);
}

#[test]
fn open_frames_flag_flat_posteriors() {
    let bundle = pos_bundle(World::Open);
    let config = TrainConfig {
        max_iterations: 0,
        ..TrainConfig::default()
    };
    let model = train(&bundle, &config).unwrap();
    let out = tag_document(&model, &bundle.documents[0], OPEN_WORLD_THRESHOLD).unwrap();
    assert!(out.tokens.iter().all(|t| t.possibly_outside));
    let closed = train(&pos_bundle(World::Closed), &config).unwrap();
    let out = tag_document(&closed, &bundle.documents[0], OPEN_WORLD_THRESHOLD).unwrap();
    assert!(out.tokens.iter().all(|t| !t.possibly_outside));
}

#[test]
fn training_needs_sentences_and_two_tags() {
    let mut bundle = pos_bundle(World::Closed);
    bundle.documents.clear();
    assert_eq!(
        train(&bundle, &TrainConfig::default()).unwrap_err(),
        gradtag_core::Error::NoData
    );
}

#[test]
fn training_is_reproducible_across_thread_counts() {
    let corpus = gradtag_core::synthetic::SyntheticCorpus::generate(&Default::default()).unwrap();
    let config = TrainConfig {
        max_iterations: 5,
        ..TrainConfig::default()
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            serialize_model(&train(&gradtag_core::synthetic::weaken(&corpus.train, 0.5, 1), &config).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn model_file_round_trips() {
    let corpus = gradtag_core::synthetic::SyntheticCorpus::generate(&Default::default()).unwrap();
    let model = train(
        &corpus.train,
        &TrainConfig {
            max_iterations: 3,
            ..TrainConfig::default()
        },
    )
    .unwrap();
    let text = serialize_model(&model);
    let parsed = parse_model(&text).unwrap();
    assert_eq!(parsed, model);
    assert_eq!(serialize_model(&parsed), text);
    assert!(text.contains(&format!("#frame_hash={}", frame_hash(model.frame()))));
    assert!(text.contains("#seed=42\n"));
}

#[test]
fn tagged_rows_carry_entropy() {
    let model = deterministic_model();
    let doc = Document::new("d", None, [vec!["x", "y"]]).unwrap();
    let out = tag_document(&model, &doc, 0.5).unwrap();
    let text = serialize_outputs(std::slice::from_ref(&out));
    assert_eq!(
        text,
        "d\tPOS\t0\t0\tmachine\tunknown\tdist\tA:1|B:0\t#entropy=0\t#viterbi=A\n\
         d\tPOS\t1\t1\tmachine\tunknown\tdist\tA:0|B:1\t#entropy=0\t#viterbi=B\n"
    );
    assert_eq!(serialize_outputs(&[tag_document(&model, &doc, 0.5).unwrap()]), text);
}

fn output_from(doc: &str, posteriors: &[Vec<f64>]) -> TaggedOutput {
    let frame = frame(posteriors[0].len());
    TaggedOutput {
        doc_id: doc.to_string(),
        tokens: posteriors
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let posterior = ProbabilityDistribution::from_weights(&frame, p.clone()).unwrap();
                TaggedToken {
                    index: i,
                    form: format!("f{i}"),
                    best_tag: "T0".into(),
                    entropy: posterior.entropy(),
                    posterior,
                    possibly_outside: false,
                }
            })
            .collect(),
    }
}

#[test]
fn review_queue_is_an_entropy_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let outputs: Vec<TaggedOutput> = (0..10)
        .map(|d| {
            output_from(
                &format!("doc{d}"),
                &(0..100).map(|_| random_row(&mut rng, 4)).collect::<Vec<_>>(),
            )
        })
        .collect();
    let queue = review_queue(&outputs, 1000);
    assert_eq!(queue.len(), 1000);
    // selection sort oracle over independently computed entropies
    let mut pool: Vec<(f64, String, usize)> = outputs
        .iter()
        .flat_map(|o| {
            o.tokens
                .iter()
                .map(|t| (entropy(t.posterior.weights()), o.doc_id.clone(), t.index))
        })
        .collect();
    for item in &queue {
        let best = (0..pool.len())
            .max_by(|&a, &b| {
                pool[a]
                    .0
                    .total_cmp(&pool[b].0)
                    .then_with(|| pool[b].1.cmp(&pool[a].1))
                    .then_with(|| pool[b].2.cmp(&pool[a].2))
            })
            .unwrap();
        let (h, doc, index) = pool.swap_remove(best);
        assert_eq!((item.target.doc_id.as_str(), item.target.start), (doc.as_str(), index));
        assert_eq!(item.entropy, h);
        assert_eq!(item.top.len(), 2);
        assert!(item.top[0].1 >= item.top[1].1);
    }
    assert_eq!(review_queue(&outputs, 5).len(), 5);
    assert_eq!(review_queue(&outputs, 5000).len(), 1000);
}

#[test]
fn uniform_posteriors_review_in_document_order() {
    let outputs = vec![
        output_from("b", &vec![vec![0.25; 4]; 3]),
        output_from("a", &vec![vec![0.25; 4]; 3]),
    ];
    let order: Vec<(String, usize)> = review_queue(&outputs, 10)
        .into_iter()
        .map(|i| (i.target.doc_id, i.target.start))
        .collect();
    let expected: Vec<(String, usize)> = ["a", "b"]
        .iter()
        .flat_map(|d| (0..3).map(move |i| (d.to_string(), i)))
        .collect();
    assert_eq!(order, expected);
}

#[test]
fn evaluation_examples() {
    let bundle = pos_bundle(World::Closed);
    let tagset = bundle.tagset(Layer::Pos).unwrap();
    let frame = tagset.frame().clone();
    let output = TaggedOutput {
        doc_id: "d1".into(),
        tokens: ["DDS", "VKFIN", "NA"]
            .iter()
            .enumerate()
            .map(|(i, tag)| TaggedToken {
                index: i,
                form: String::new(),
                best_tag: tag.to_string(),
                posterior: ProbabilityDistribution::new(&frame, [(*tag, 1.0)]).unwrap(),
                entropy: 0.0,
                possibly_outside: false,
            })
            .collect(),
    };
    let outputs = [output];
    let gold = vec![
        record(0, "g", Style::PreciseTag, vec![Entry::tag("DDS")]),
        record(1, "g", Style::PreciseTag, vec![Entry::tag("VKFIN")]),
        record(2, "g", Style::PreciseTag, vec![Entry::tag("NA")]),
    ];
    let m = evaluate(&outputs, &gold, tagset, &bundle.scale).unwrap();
    assert_eq!(m.token_accuracy(), Some(1.0));
    assert_eq!(m.per_gt_mode["precise"], 3);

    let disjoint = vec![record(1, "g", Style::PreciseTag, vec![Entry::tag("NA")])];
    assert_eq!(
        evaluate(&outputs, &disjoint, tagset, &bundle.scale)
            .unwrap()
            .token_accuracy(),
        Some(0.0)
    );

    let sets = vec![record(
        1,
        "g",
        Style::SetValued,
        vec![Entry::tag("VAFIN"), Entry::tag("VKFIN")],
    )];
    let m = evaluate(&outputs, &sets, tagset, &bundle.scale).unwrap();
    assert_eq!((m.set_accuracy(), m.token_accuracy()), (Some(1.0), None));

    let mut graded = record(
        1,
        "g",
        Style::PreciseTag,
        vec![Entry::tag("VKFIN"), Entry::tag("VAFIN")],
    );
    graded.gt_mode = GtMode::Graded;
    let m = evaluate(&outputs, &[graded], tagset, &bundle.scale).unwrap();
    assert_eq!((m.set_accuracy(), m.token_accuracy()), (Some(1.0), None));
    assert_eq!(m.per_gt_mode["graded"], 1);

    let dist = vec![record(1, "g", Style::Distributional, vec![Entry::degree("VKFIN", 1.0)])];
    let m = evaluate(&outputs, &dist, tagset, &bundle.scale).unwrap();
    assert_eq!(m.mean_cross_entropy(), Some(0.0));

    let missing = vec![record(5, "g", Style::PreciseTag, vec![Entry::tag("NA")])];
    assert!(matches!(
        evaluate(&outputs, &missing, tagset, &bundle.scale),
        Err(gradtag_core::Error::Alignment(_))
    ));
}
