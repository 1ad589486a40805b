//! HTTP/JSON annotation service.
//!
//! Reads take a shared lock on the session and never wait for each other.
//! Writes are serialized through one async mutex: each write takes the
//! corpus directory lock, appends to the document's log, reloads the corpus
//! from disk and swaps the new session in under a short exclusive lock, so
//! a reader sees either the state before or after a write.
//!
//! A document's revision is the number of rows (records plus tombstones) in
//! its annotation log. It only grows, and it survives restarts because it is
//! read back from the file.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use gradtag_core::aggregation::corpus_conflict_report;
use gradtag_core::annotation::{case_for, classify_case, AnnotationRecord, Diagnostic, GtMode, Layer, Style};
use gradtag_core::io::{format_entries, parse_annotation_log, parse_record_row, CorpusDir, LoadedCorpus, WriteLock};
use gradtag_core::tagger::{review_queue, TaggedOutput, TaggerModel};
use gradtag_core::uncertainty::CombineMode;
use gradtag_core::Error;

use crate::CliError;

/// Number of tags returned per suggested token.
pub const SUGGESTION_TOP: usize = 3;

struct Session {
    loaded: LoadedCorpus,
    /// Revision per document id; documents without a log are at 0.
    revisions: BTreeMap<String, u64>,
    /// Machine tagging of every non-empty document, computed once per model.
    tagged: Option<Arc<Vec<TaggedOutput>>>,
}

struct Shared {
    dir: CorpusDir,
    scale: Option<PathBuf>,
    model: Option<TaggerModel>,
    threshold: f64,
    session: RwLock<Arc<Session>>,
    writer: tokio::sync::Mutex<()>,
}

/// Shared service state; cheap to clone.
#[derive(Clone)]
pub struct AppState {
    shared: Arc<Shared>,
}

fn revisions(dir: &CorpusDir, loaded: &LoadedCorpus) -> Result<BTreeMap<String, u64>, Error> {
    let mut out = BTreeMap::new();
    for document in &loaded.bundle.documents {
        let path = dir.annotations_dir().join(format!("{}.tsv", document.doc_id));
        let revision = if path.is_file() {
            let text = fs::read_to_string(&path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let log = parse_annotation_log(&text)?;
            (log.rows.len() + log.tombstones.len()) as u64
        } else {
            0
        };
        out.insert(document.doc_id.clone(), revision);
    }
    Ok(out)
}

impl AppState {
    /// Loads the corpus and, when a model is given, tags it once.
    pub fn open(
        dir: CorpusDir,
        scale: Option<PathBuf>,
        model: Option<TaggerModel>,
        threshold: f64,
    ) -> Result<AppState, CliError> {
        let shared = Shared {
            session: RwLock::new(Arc::new(Session {
                loaded: LoadedCorpus {
                    bundle: Default::default(),
                    origins: Vec::new(),
                },
                revisions: BTreeMap::new(),
                tagged: None,
            })),
            dir,
            scale,
            model,
            threshold,
            writer: tokio::sync::Mutex::new(()),
        };
        let state = AppState {
            shared: Arc::new(shared),
        };
        let session = state.load_session(None)?;
        *state.shared.session.write().expect("session lock poisoned") = Arc::new(session);
        Ok(state)
    }

    fn load_session(&self, previous_tagging: Option<Arc<Vec<TaggedOutput>>>) -> Result<Session, CliError> {
        let s = &self.shared;
        let loaded = s.dir.load_with_scale(s.scale.as_deref())?;
        let revisions = revisions(&s.dir, &loaded)?;
        let tagged = match (&s.model, previous_tagging) {
            (Some(_), Some(previous)) => Some(previous),
            (Some(model), None) => Some(Arc::new(crate::commands::tag_all(model, &loaded.bundle, s.threshold)?)),
            (None, _) => None,
        };
        Ok(Session {
            loaded,
            revisions,
            tagged,
        })
    }

    fn session(&self) -> Arc<Session> {
        self.shared.session.read().expect("session lock poisoned").clone()
    }

    /// Runs `write` under the single-writer mutex and the directory lock,
    /// then reloads the session from disk.
    async fn write<T>(
        &self,
        write: impl FnOnce(&CorpusDir, &WriteLock, &Session) -> Result<T, ApiError>,
    ) -> Result<T, ApiError> {
        let _queue = self.shared.writer.lock().await;
        let current = self.session();
        let value = {
            let lock = self.shared.dir.lock().map_err(ApiError::from)?;
            write(&self.shared.dir, &lock, &current)?
        };
        // document text never changes, so the machine tagging carries over
        let next = self.load_session(current.tagged.clone()).map_err(ApiError::from_cli)?;
        *self.shared.session.write().expect("session lock poisoned") = Arc::new(next);
        Ok(value)
    }
}

/// A JSON error body: `{"error": CODE, "message": ..., "diagnostics": [...]}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    diagnostics: Vec<Diagnostic>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code,
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }

    fn validation(message: impl Into<String>, diagnostics: Vec<Diagnostic>) -> ApiError {
        ApiError {
            diagnostics,
            ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ValidationFailed", message)
        }
    }

    fn unknown_document(doc: &str) -> ApiError {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "UnknownDocument",
            format!("unknown document `{doc}`"),
        )
    }

    fn from_cli(err: CliError) -> ApiError {
        match err {
            CliError::Core(e) => e.into(),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "InternalError", other.to_string()),
        }
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> ApiError {
        let status = match err.root() {
            Error::ClosedWorldViolation(_) | Error::DuplicateTag(_) => StatusCode::CONFLICT,
            Error::Locked(_) => StatusCode::SERVICE_UNAVAILABLE,
            Error::UnknownDocument(_) => StatusCode::NOT_FOUND,
            Error::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, err.root().code(), err.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "error": self.code,
            "message": self.message,
            "diagnostics": self.diagnostics,
        });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// The annotation-file columns of one record. `entries` uses the file
/// syntax (`A|B`, `A/3|B/2`, `A:0.7|B:0.3`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordFields {
    pub doc: String,
    pub layer: String,
    pub start: usize,
    pub end: usize,
    pub annotator: String,
    pub gt_mode: String,
    pub style: String,
    pub entries: String,
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NewAnnotation {
    #[serde(flatten)]
    pub record: RecordFields,
    pub expected_revision: u64,
}

impl RecordFields {
    /// Builds the file row and parses it, so the service accepts exactly
    /// what the file format accepts.
    fn to_record(&self) -> ApiResult<AnnotationRecord> {
        let mut columns = vec![
            self.doc.clone(),
            self.layer.clone(),
            self.start.to_string(),
            self.end.to_string(),
            self.annotator.clone(),
            self.gt_mode.clone(),
            self.style.clone(),
            self.entries.clone(),
        ];
        columns.extend(self.source.clone());
        columns.extend(self.timestamp.as_ref().map(|ts| format!("#ts={ts}")));
        if columns.iter().any(|c| c.contains(['\t', '\n', '\r'])) {
            return Err(ApiError::validation(
                "fields may not contain tabs or line breaks",
                Vec::new(),
            ));
        }
        parse_record_row(&columns.join("\t"), 1).map_err(|e| ApiError::validation(e.root().to_string(), Vec::new()))
    }
}

fn record_json(record: &AnnotationRecord, record_id: &str, case: Option<u8>) -> Value {
    json!({
        "record_id": record_id,
        "doc": record.target.doc_id,
        "layer": record.layer,
        "start": record.target.start,
        "end": record.target.end,
        "annotator": record.annotator,
        "gt_mode": record.gt_mode,
        "style": record.style,
        "entries": format_entries(&record.entries),
        "source": record.source,
        "timestamp": record.timestamp,
        "extensions": record.extensions,
        "case": case,
    })
}

async fn list_documents(State(state): State<AppState>) -> Json<Value> {
    let session = state.session();
    let documents: Vec<Value> = session
        .loaded
        .bundle
        .documents
        .iter()
        .map(|d| {
            json!({
                "doc": d.doc_id,
                "date": d.date.as_ref().map(|x| x.to_string()),
                "sentences": d.sentences().len(),
                "tokens": d.token_count(),
                "revision": session.revisions.get(&d.doc_id).copied().unwrap_or(0),
            })
        })
        .collect();
    Json(json!(documents))
}

async fn get_document(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let session = state.session();
    let document = session
        .loaded
        .bundle
        .document(&id)
        .ok_or_else(|| ApiError::unknown_document(&id))?;
    Ok(Json(json!({
        "doc": document.doc_id,
        "date": document.date.as_ref().map(|x| x.to_string()),
        "sentences": document.sentences(),
        "revision": session.revisions.get(&id).copied().unwrap_or(0),
    })))
}

async fn list_tagsets(State(state): State<AppState>) -> Json<Value> {
    let session = state.session();
    let tagsets: Vec<Value> = session
        .loaded
        .bundle
        .tagsets
        .values()
        .map(|t| {
            let tags: Vec<Value> = t
                .entries()
                .iter()
                .map(|e| {
                    json!({
                        "tag": e.tag,
                        "description": e.description,
                        "added_version": e.added_version,
                        "added_date": e.added_date,
                    })
                })
                .collect();
            json!({
                "layer": t.layer(),
                "world": t.world().to_string(),
                "version": t.version(),
                "tags": tags,
            })
        })
        .collect();
    Json(json!(tagsets))
}

async fn get_scale(State(state): State<AppState>) -> Json<Value> {
    Json(json!(state.session().loaded.bundle.scale.levels()))
}

#[derive(Debug, Deserialize)]
struct DocQuery {
    doc: String,
}

async fn list_annotations(State(state): State<AppState>, Query(q): Query<DocQuery>) -> ApiResult<Json<Value>> {
    let session = state.session();
    let bundle = &session.loaded.bundle;
    if bundle.document(&q.doc).is_none() {
        return Err(ApiError::unknown_document(&q.doc));
    }
    let records: Vec<Value> = bundle
        .annotations
        .iter()
        .zip(&session.loaded.origins)
        .filter(|(r, _)| r.target.doc_id == q.doc)
        .map(|(r, origin)| {
            let case = bundle
                .tagset(r.layer)
                .and_then(|t| classify_case(r, t).ok())
                .map(|c| c.value());
            record_json(r, &origin.record_id, case)
        })
        .collect();
    Ok(Json(json!({
        "doc": q.doc,
        "revision": session.revisions.get(&q.doc).copied().unwrap_or(0),
        "records": records,
    })))
}

fn check_revision(session: &Session, doc: &str, expected: u64) -> ApiResult<u64> {
    let current = *session
        .revisions
        .get(doc)
        .ok_or_else(|| ApiError::unknown_document(doc))?;
    if current != expected {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            "RevisionConflict",
            format!("document `{doc}` is at revision {current}, not {expected}"),
        ));
    }
    Ok(current)
}

async fn post_annotation(
    State(state): State<AppState>,
    Json(input): Json<NewAnnotation>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let record = input.record.to_record()?;
    let (record_id, revision, case) = state
        .write(|dir, lock, session| {
            let bundle = &session.loaded.bundle;
            if bundle.document(&record.target.doc_id).is_none() {
                return Err(ApiError::unknown_document(&record.target.doc_id));
            }
            let diagnostics = bundle.diagnose(&record);
            if !diagnostics.is_empty() {
                return Err(ApiError::validation("the record is not valid", diagnostics));
            }
            let revision = check_revision(session, &record.target.doc_id, input.expected_revision)?;
            let tagset = bundle.tagset(record.layer).expect("diagnose checked the layer");
            let case = classify_case(&record, tagset)?;
            let record_id = dir.append_annotation(&record, lock)?;
            Ok((record_id, revision + 1, case.value()))
        })
        .await?;
    Ok((
        StatusCode::CREATED,
        Json(json!({
            "record_id": record_id,
            "revision": revision,
            "case": case,
            "record": record_json(&record, &record_id, Some(case)),
        })),
    ))
}

#[derive(Debug, Deserialize)]
struct RevisionQuery {
    expected_revision: u64,
}

async fn delete_annotation(
    State(state): State<AppState>,
    Path(record_id): Path<String>,
    Query(q): Query<RevisionQuery>,
) -> ApiResult<Json<Value>> {
    let (doc, revision) = state
        .write(|dir, lock, session| {
            let loaded = &session.loaded;
            let index = loaded
                .origins
                .iter()
                .position(|o| o.record_id == record_id)
                .ok_or_else(|| {
                    ApiError::new(
                        StatusCode::NOT_FOUND,
                        "UnknownRecord",
                        format!("no live record `{record_id}`"),
                    )
                })?;
            let doc = loaded.bundle.annotations[index].target.doc_id.clone();
            let revision = check_revision(session, &doc, q.expected_revision)?;
            dir.append_tombstone(&record_id, lock)?;
            Ok((doc, revision + 1))
        })
        .await?;
    Ok(Json(
        json!({ "record_id": record_id, "doc": doc, "revision": revision }),
    ))
}

#[derive(Debug, Deserialize)]
struct NewTag {
    tag: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    date: Option<String>,
}

async fn register_tag(
    State(state): State<AppState>,
    Path(layer): Path<String>,
    Json(input): Json<NewTag>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let layer: Layer = layer
        .parse()
        .map_err(|e: String| ApiError::new(StatusCode::NOT_FOUND, "UnknownLayer", e))?;
    let fields = [Some(&input.tag), Some(&input.description), input.date.as_ref()];
    if input.tag.is_empty()
        || input.tag.contains('|')
        || fields.iter().flatten().any(|f| f.contains(['\t', '\n', '\r']))
    {
        return Err(ApiError::validation(
            "tags may not be empty or contain `|`, tabs or line breaks",
            Vec::new(),
        ));
    }
    let version = state
        .write(|dir, lock, session| {
            let tagset = session.loaded.bundle.tagset(layer).ok_or_else(|| {
                ApiError::new(
                    StatusCode::NOT_FOUND,
                    "UnknownLayer",
                    format!("no tag set for layer {layer}"),
                )
            })?;
            let grown = tagset.register_tag(&input.tag, &input.description, input.date.clone())?;
            dir.write_tagset(&grown, lock)?;
            Ok(grown.version())
        })
        .await?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "layer": layer, "tag": input.tag, "version": version })),
    ))
}

fn tagged(session: &Session) -> ApiResult<&[TaggedOutput]> {
    session.tagged.as_deref().map(Vec::as_slice).ok_or_else(|| {
        ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "NoModelLoaded",
            "no tagger model is loaded",
        )
    })
}

#[derive(Debug, Deserialize)]
struct SuggestQuery {
    doc: String,
    start: usize,
    end: usize,
}

async fn suggest(State(state): State<AppState>, Query(q): Query<SuggestQuery>) -> ApiResult<Json<Value>> {
    let session = state.session();
    let outputs = tagged(&session)?;
    if session.loaded.bundle.document(&q.doc).is_none() {
        return Err(ApiError::unknown_document(&q.doc));
    }
    let world = state
        .shared
        .model
        .as_ref()
        .expect("tagging implies a model")
        .frame()
        .world();
    // accepting a suggestion records the posterior as a distribution
    let case_preview = case_for(world, GtMode::Unknown, Style::Distributional).value();
    let suggestions: Vec<Value> = outputs
        .iter()
        .filter(|o| o.doc_id == q.doc)
        .flat_map(|o| o.tokens.iter())
        .filter(|t| q.start <= t.index && t.index <= q.end)
        .map(|t| {
            let top: Vec<Value> = t
                .top(SUGGESTION_TOP)
                .into_iter()
                .map(|(tag, p)| json!({ "tag": tag, "probability": p }))
                .collect();
            json!({
                "index": t.index,
                "form": t.form,
                "top": top,
                "entropy": t.entropy,
                "best_tag": t.best_tag,
                "possibly_outside": t.possibly_outside,
                "case_preview": case_preview,
            })
        })
        .collect();
    Ok(Json(json!(suggestions)))
}

#[derive(Debug, Deserialize)]
struct ReviewQuery {
    k: Option<usize>,
}

/// Review-queue length when `k` is not given.
pub const DEFAULT_REVIEW_K: usize = 20;

async fn review(State(state): State<AppState>, Query(q): Query<ReviewQuery>) -> ApiResult<Json<Value>> {
    let session = state.session();
    let items = review_queue(tagged(&session)?, q.k.unwrap_or(DEFAULT_REVIEW_K));
    let items: Vec<Value> = items
        .iter()
        .map(|item| {
            let top: Vec<Value> = item
                .top
                .iter()
                .map(|(tag, p)| json!({ "tag": tag, "probability": p }))
                .collect();
            json!({
                "doc": item.target.doc_id,
                "index": item.target.start,
                "form": item.form,
                "entropy": item.entropy,
                "best_tag": item.best_tag,
                "top": top,
            })
        })
        .collect();
    Ok(Json(json!(items)))
}

#[derive(Debug, Deserialize)]
struct ConflictQuery {
    mode: Option<String>,
}

async fn conflicts(State(state): State<AppState>, Query(q): Query<ConflictQuery>) -> ApiResult<Json<Value>> {
    let mode = match q.mode.as_deref().unwrap_or("conjunctive") {
        "conjunctive" => CombineMode::Conjunctive,
        "disjunctive" => CombineMode::Disjunctive,
        other => {
            return Err(ApiError::validation(
                format!("unknown mode `{other}`; use conjunctive or disjunctive"),
                Vec::new(),
            ))
        }
    };
    let session = state.session();
    let report = corpus_conflict_report(&session.loaded.bundle, mode);
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|row| {
            let cases: Vec<u8> = row.cases.iter().map(|c| c.value()).collect();
            json!({
                "doc": row.target.doc_id,
                "layer": row.layer,
                "start": row.target.start,
                "end": row.target.end,
                "conflict": row.conflict,
                "cases": cases,
                "annotators": row.annotators,
            })
        })
        .collect();
    let by_year: Vec<Value> = report
        .graded_by_year
        .iter()
        .map(|(year, count)| json!({ "year": year, "graded": count }))
        .collect();
    let skipped: Vec<Value> = report
        .skipped
        .iter()
        .map(|(target, layer, reason)| {
            json!({ "doc": target.doc_id, "layer": layer, "start": target.start, "end": target.end, "reason": reason })
        })
        .collect();
    Ok(Json(
        json!({ "rows": rows, "graded_by_year": by_year, "skipped": skipped }),
    ))
}

/// All API routes.
pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/documents", get(list_documents))
        .route("/api/documents/{id}", get(get_document))
        .route("/api/tagsets", get(list_tagsets))
        .route("/api/tagsets/{layer}/tags", post(register_tag))
        .route("/api/scale", get(get_scale))
        .route("/api/annotations", get(list_annotations).post(post_annotation))
        .route("/api/annotations/{record_id}", delete(delete_annotation))
        .route("/api/suggest", get(suggest))
        .route("/api/review", get(review))
        .route("/api/conflicts", get(conflicts))
        .with_state(state)
}
