//! Subcommand implementations. Each writes its report to `--out` when given
//! and to `out` otherwise; diagnostics go to `err`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use gradtag_core::aggregation::corpus_conflict_report;
use gradtag_core::annotation::{classify_case, Layer, Target};
use gradtag_core::io::{format_number, CorpusBundle, CorpusDir, LoadedCorpus};
use gradtag_core::tagger::{
    build_constraints, evaluate, frame_hash, parse_model, review_queue, serialize_model, serialize_outputs,
    tag_document, train_on, TaggedOutput, TaggerModel, MACHINE_ANNOTATOR,
};
use gradtag_core::uncertainty::CombineMode;
use gradtag_core::Error;

use crate::config::CliConfig;
use crate::CliError;

/// Rewrites an error's file path relative to `root` so messages do not
/// depend on where the corpus lives.
fn relative_to(root: &Path, error: Error) -> Error {
    match error {
        Error::InFile { path, error } => {
            let relative = Path::new(&path)
                .strip_prefix(root)
                .map(|p| p.display().to_string())
                .unwrap_or(path);
            Error::InFile { path: relative, error }
        }
        other => other,
    }
}

pub(crate) fn load(config: &CliConfig) -> Result<(CorpusDir, LoadedCorpus), CliError> {
    let root = config
        .corpus
        .as_ref()
        .ok_or_else(|| CliError::usage("no corpus given (use --corpus or `corpus=` in the config file)"))?;
    let dir = CorpusDir::new(root);
    let loaded = dir
        .load_with_scale(config.scale.as_deref())
        .map_err(|e| relative_to(root, e))?;
    Ok((dir, loaded))
}

pub(crate) fn load_model(config: &CliConfig) -> Result<TaggerModel, CliError> {
    let path = config
        .model
        .as_ref()
        .ok_or_else(|| CliError::usage("no model given (use --model)"))?;
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_model(&text).map_err(|e| {
        CliError::Core(Error::InFile {
            path: path.display().to_string(),
            error: Box::new(e),
        })
    })
}

fn emit(config: &CliConfig, out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    let io = |path: &Path, e: std::io::Error| {
        CliError::Core(Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    };
    match &config.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
            }
            fs::write(path, text).map_err(|e| io(path, e))
        }
        None => out.write_all(text.as_bytes()).map_err(|e| io(Path::new("-"), e)),
    }
}

fn origin_line(loaded: &LoadedCorpus, index: usize) -> String {
    let origin = &loaded.origins[index];
    format!("{}:{}", origin.file.display(), origin.line)
}

/// Location of the first POS record on `target`.
fn target_origin(loaded: &LoadedCorpus, target: &Target) -> String {
    loaded
        .bundle
        .annotations
        .iter()
        .position(|r| r.layer == Layer::Pos && &r.target == target)
        .map_or_else(|| "-:0".to_string(), |i| origin_line(loaded, i))
}

/// Writes every record diagnostic; returns how many there were.
fn report_diagnostics(loaded: &LoadedCorpus, err: &mut dyn Write) -> usize {
    let diagnostics = loaded.bundle.diagnostics();
    for (index, diagnostic) in &diagnostics {
        let _ = writeln!(
            err,
            "{}:{}:{}: {}",
            origin_line(loaded, *index),
            diagnostic.code,
            diagnostic.target,
            diagnostic.message
        );
    }
    diagnostics.len()
}

pub fn validate(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let (_, loaded) = load(config)?;
    let count = report_diagnostics(&loaded, err);
    let bundle = &loaded.bundle;
    let tokens: usize = bundle.documents.iter().map(|d| d.token_count()).sum();
    let _ = writeln!(
        out,
        "{} documents, {} tokens, {} records, {} diagnostics",
        bundle.documents.len(),
        tokens,
        bundle.annotations.len(),
        count
    );
    if count == 0 {
        Ok(())
    } else {
        Err(CliError::Diagnostics(count))
    }
}

pub fn stats(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let (_, loaded) = load(config)?;
    let bundle = &loaded.bundle;
    let mut text = String::new();
    let sentences: usize = bundle.documents.iter().map(|d| d.sentences().len()).sum();
    let tokens: usize = bundle.documents.iter().map(|d| d.token_count()).sum();
    let _ = writeln!(text, "documents\t{}", bundle.documents.len());
    let _ = writeln!(text, "sentences\t{sentences}");
    let _ = writeln!(text, "tokens\t{tokens}");
    let _ = writeln!(text, "records\t{}", bundle.annotations.len());
    for tagset in bundle.tagsets.values() {
        let _ = writeln!(
            text,
            "tagset.{}\t{} tags, {} world, version {}",
            tagset.layer(),
            tagset.entries().len(),
            tagset.world(),
            tagset.version()
        );
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for record in &bundle.annotations {
        for key in [
            format!("layer.{}", record.layer),
            format!("style.{}", record.style),
            format!("gt_mode.{}", record.gt_mode),
            format!("annotator.{}", record.annotator),
            format!("source.{}", record.source.map_or("none", |s| s.as_str())),
        ] {
            *counts.entry(key).or_default() += 1;
        }
    }
    for (key, count) in counts {
        let _ = writeln!(text, "{key}\t{count}");
    }
    emit(config, out, &text)
}

#[derive(Default)]
struct CaseCounts {
    records: usize,
    targets: BTreeSet<(String, usize, usize, Layer)>,
    sentences: BTreeSet<(String, usize)>,
}

pub fn cases(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let (_, loaded) = load(config)?;
    let bundle = &loaded.bundle;
    let invalid = report_diagnostics(&loaded, err);
    let mut table: BTreeMap<u8, CaseCounts> = (1..=10).map(|c| (c, CaseCounts::default())).collect();
    for record in &bundle.annotations {
        let (Some(tagset), Some(document)) = (bundle.tagset(record.layer), bundle.document(&record.target.doc_id))
        else {
            continue;
        };
        let (Ok(case), Some(sentence)) = (classify_case(record, tagset), document.sentence_of(record.target.start))
        else {
            continue;
        };
        let row = table.get_mut(&case.value()).expect("all ten cases present");
        let t = &record.target;
        row.records += 1;
        row.targets.insert((t.doc_id.clone(), t.start, t.end, record.layer));
        row.sentences.insert((t.doc_id.clone(), sentence));
    }
    let mut text = String::from("CASE\tRECORDS\tTARGETS\tSENTENCES\n");
    for (case, row) in &table {
        let _ = writeln!(
            text,
            "{case}\t{}\t{}\t{}",
            row.records,
            row.targets.len(),
            row.sentences.len()
        );
    }
    emit(config, out, &text)?;
    if invalid == 0 {
        Ok(())
    } else {
        Err(CliError::Diagnostics(invalid))
    }
}

pub fn train(config: &CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let (_, loaded) = load(config)?;
    let data = build_constraints(&loaded.bundle)?;
    for zero in &data.zero_masks {
        let _ = writeln!(
            err,
            "{}:ZeroMask:{}: fused annotations of {} exclude every tag; token left unsupervised",
            target_origin(&loaded, &zero.target),
            zero.target,
            zero.annotators.join(",")
        );
    }
    for (target, reason) in &data.skipped {
        let _ = writeln!(
            err,
            "{}:SkippedTarget:{target}: {reason}",
            target_origin(&loaded, target)
        );
    }
    let model = train_on(&data, &config.train)?;
    emit(config, out, &serialize_model(&model))?;
    if config.out.is_some() {
        let meta = &model.meta;
        let _ = writeln!(out, "iterations\t{}", meta.iterations);
        let _ = writeln!(out, "converged\t{}", meta.converged);
        if let Some(ll) = meta.final_log_likelihood() {
            let _ = writeln!(out, "log_likelihood\t{}", format_number(ll));
        }
        let _ = writeln!(out, "config_hash\t{}", meta.config_hash);
    }
    Ok(())
}

/// Tags every non-empty document, after checking the model fits the corpus.
pub(crate) fn tag_all(
    model: &TaggerModel,
    bundle: &CorpusBundle,
    threshold: f64,
) -> Result<Vec<TaggedOutput>, CliError> {
    if let Some(tagset) = bundle.tagset(Layer::Pos) {
        if frame_hash(tagset.frame()) != frame_hash(model.frame()) {
            return Err(Error::ModelMismatch("the model was trained on a different POS tag set".into()).into());
        }
    }
    bundle
        .documents
        .iter()
        .filter(|d| d.token_count() > 0)
        .map(|d| tag_document(model, d, threshold).map_err(CliError::from))
        .collect()
}

pub fn tag(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let model = load_model(config)?;
    let (_, loaded) = load(config)?;
    let outputs = tag_all(&model, &loaded.bundle, config.threshold)?;
    emit(config, out, &serialize_outputs(&outputs))
}

fn optional(value: Option<f64>) -> String {
    value.map_or_else(|| "NA".to_string(), format_number)
}

pub fn eval(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let model = load_model(config)?;
    let (_, loaded) = load(config)?;
    let bundle = &loaded.bundle;
    let tagset = bundle
        .tagset(Layer::Pos)
        .ok_or_else(|| CliError::usage("the corpus has no POS tag set to evaluate against"))?;
    let outputs = tag_all(&model, bundle, config.threshold)?;
    let gold: Vec<_> = bundle
        .annotations
        .iter()
        .filter(|r| r.annotator != MACHINE_ANNOTATOR)
        .cloned()
        .collect();
    let metrics = evaluate(&outputs, &gold, tagset, &bundle.scale)?;
    let mut text = String::new();
    let _ = writeln!(text, "token_accuracy\t{}", optional(metrics.token_accuracy()));
    let _ = writeln!(text, "token_correct\t{}", metrics.token_correct);
    let _ = writeln!(text, "token_total\t{}", metrics.token_total);
    let _ = writeln!(text, "set_accuracy\t{}", optional(metrics.set_accuracy()));
    let _ = writeln!(text, "set_correct\t{}", metrics.set_correct);
    let _ = writeln!(text, "set_total\t{}", metrics.set_total);
    let _ = writeln!(text, "mean_cross_entropy\t{}", optional(metrics.mean_cross_entropy()));
    let _ = writeln!(text, "cross_entropy_total\t{}", metrics.cross_entropy_total);
    for (mode, count) in &metrics.per_gt_mode {
        let _ = writeln!(text, "gt_mode.{mode}\t{count}");
    }
    emit(config, out, &text)
}

pub fn review(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let model = load_model(config)?;
    let (_, loaded) = load(config)?;
    let outputs = tag_all(&model, &loaded.bundle, config.threshold)?;
    let mut text = String::from("RANK\tDOC\tINDEX\tFORM\tENTROPY\tBEST\tTOP\n");
    for (rank, item) in review_queue(&outputs, config.k).iter().enumerate() {
        let top: Vec<String> = item
            .top
            .iter()
            .map(|(tag, p)| format!("{tag}:{}", format_number(*p)))
            .collect();
        let _ = writeln!(
            text,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            rank + 1,
            item.target.doc_id,
            item.target.start,
            item.form,
            format_number(item.entropy),
            item.best_tag,
            top.join("|")
        );
    }
    emit(config, out, &text)
}

pub fn aggregate(config: &CliConfig, mode: &str, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mode = match mode {
        "conjunctive" => CombineMode::Conjunctive,
        "disjunctive" => CombineMode::Disjunctive,
        other => {
            return Err(CliError::usage(format!(
                "unknown mode `{other}`; use conjunctive or disjunctive"
            )))
        }
    };
    let (_, loaded) = load(config)?;
    let report = corpus_conflict_report(&loaded.bundle, mode);
    for (target, layer, reason) in &report.skipped {
        let _ = writeln!(err, "-:0:SkippedTarget:{target} {layer}: {reason}");
    }
    emit(config, out, &report.to_tsv())
}

pub fn serve(config: &CliConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let (dir, _) = load(config)?;
    let model = config.model.as_ref().map(|_| load_model(config)).transpose()?;
    let state = crate::service::AppState::open(dir, config.scale.clone(), model, config.threshold)?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::usage(e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", config.port))
            .await
            .map_err(|e| CliError::usage(format!("cannot bind port {}: {e}", config.port)))?;
        let addr = listener.local_addr().map_err(|e| CliError::usage(e.to_string()))?;
        let _ = writeln!(out, "listening on http://{addr}");
        let _ = out.flush();
        axum::serve(listener, crate::service::router(state))
            .await
            .map_err(|e| CliError::usage(e.to_string()))
    })
}
