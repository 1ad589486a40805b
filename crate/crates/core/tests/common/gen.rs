//! Random valid corpus bundles.

use gradtag_core::annotation::{
    AnnotationRecord, DocDate, Document, Entry, GtMode, Layer, Style, TagSet, Target, UncertaintySource,
};
use gradtag_core::io::CorpusBundle;
use gradtag_core::uncertainty::World;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FORMS: [&str; 8] = ["Dat", "is", "vredebrake", "na", "deme", "·", "1350", "we+"];

fn tagset(rng: &mut ChaCha8Rng, layer: Layer, prefix: &str) -> TagSet {
    let world = if rng.random_bool(0.5) {
        World::Open
    } else {
        World::Closed
    };
    let k = rng.random_range(2..=10);
    TagSet::new(
        layer,
        world,
        (0..k).map(|i| {
            let date = rng.random_bool(0.3).then(|| format!("{}", 1300 + i));
            (format!("{prefix}{i}"), format!("tag number {i}"), date)
        }),
    )
    .unwrap()
}

fn entries(rng: &mut ChaCha8Rng, tags: &[String], style: Style, graded: bool) -> Vec<Entry> {
    let mut pool: Vec<&String> = tags.iter().collect();
    let mut pick = |n: usize| -> Vec<String> {
        let mut out = Vec::new();
        for _ in 0..n.min(pool.len()) {
            let i = rng.random_range(0..pool.len());
            out.push(pool.swap_remove(i).clone());
        }
        out
    };
    match style {
        Style::PreciseTag => {
            let n = if graded { 2 } else { 1 };
            pick(n).into_iter().map(Entry::tag).collect()
        }
        Style::SetValued => pick(2).into_iter().map(Entry::tag).collect(),
        Style::Distributional => {
            let chosen = pick(3);
            let n = chosen.len();
            chosen
                .into_iter()
                .enumerate()
                .map(|(i, t)| {
                    Entry::degree(
                        t,
                        if i == 0 {
                            1.0
                        } else {
                            1.0 / (n as f64 + 0.37 * i as f64)
                        },
                    )
                })
                .collect()
        }
        Style::Ordinal => {
            let chosen = pick(2);
            let mut ranks = [4, 3, 2].into_iter();
            chosen
                .into_iter()
                .map(|t| Entry::rank(t, ranks.next().unwrap()))
                .collect()
        }
    }
}

/// A bundle with up to 3 documents of ≤ 50 tokens, two layers with ≤ 10
/// tags each, and records in every style.
pub fn bundle(seed: u64) -> CorpusBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bundle = CorpusBundle::default();
    bundle.tagsets.insert(Layer::Pos, tagset(&mut rng, Layer::Pos, "P"));
    bundle
        .tagsets
        .insert(Layer::Construction, tagset(&mut rng, Layer::Construction, "C"));
    for d in 0..rng.random_range(1..=3) {
        let total = rng.random_range(1..=50);
        let mut sentences: Vec<Vec<&str>> = vec![Vec::new()];
        for _ in 0..total {
            if !sentences.last().unwrap().is_empty() && rng.random_bool(0.15) {
                sentences.push(Vec::new());
            }
            sentences.last_mut().unwrap().push(FORMS.choose(&mut rng).unwrap());
        }
        let date = match rng.random_range(0..4) {
            0 => None,
            1 => Some(DocDate::parse("1350").unwrap()),
            2 => Some(DocDate::parse("1402-03").unwrap()),
            _ => Some(DocDate::parse("1499-12-31").unwrap()),
        };
        bundle
            .documents
            .push(Document::new(format!("doc{d}"), date, sentences).unwrap());
    }
    let records = rng.random_range(0..30);
    for _ in 0..records {
        let doc = bundle.documents.choose(&mut rng).unwrap();
        let layer = if rng.random_bool(0.7) {
            Layer::Pos
        } else {
            Layer::Construction
        };
        let start = rng.random_range(0..doc.token_count());
        let end = if layer == Layer::Pos {
            start
        } else {
            let sentence = &doc.sentences()[doc.sentence_of(start).unwrap()];
            rng.random_range(start..=sentence.last().unwrap().index)
        };
        let gt_mode = *[GtMode::Precise, GtMode::Graded, GtMode::Unknown]
            .choose(&mut rng)
            .unwrap();
        let style = *[
            Style::PreciseTag,
            Style::SetValued,
            Style::Distributional,
            Style::Ordinal,
        ]
        .choose(&mut rng)
        .unwrap();
        let tags = bundle.tagsets[&layer].frame().elements().to_vec();
        let entries = entries(&mut rng, &tags, style, gt_mode == GtMode::Graded);
        let mut record = AnnotationRecord::new(
            Target::span(doc.doc_id.clone(), start, end),
            layer,
            format!("ann{}", rng.random_range(1..=3)),
            gt_mode,
            style,
            entries,
        );
        if rng.random_bool(0.5) {
            record.source = Some(
                *[
                    UncertaintySource::Ambiguity,
                    UncertaintySource::Epistemic,
                    UncertaintySource::Unclear,
                ]
                .choose(&mut rng)
                .unwrap(),
            );
        }
        if rng.random_bool(0.3) {
            record.timestamp = Some(format!("2024-05-{:02}T10:00:00Z", rng.random_range(1..=28)));
        }
        if rng.random_bool(0.3) {
            record
                .extensions
                .insert("note".into(), format!("n{}", rng.random::<u16>()));
        }
        bundle.annotations.push(record);
    }
    bundle
}
