//! Corpus bundles and the on-disk corpus directory.
//!
//! ```text
//! <corpus>/
//!   scale.tsv              optional; the default 4-level scale otherwise
//!   tagsets/*.tsv          one file per layer
//!   documents/*.tsv        one file per document
//!   annotations/*.tsv      annotation logs (append-only when written by the server)
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::annotations::{format_record_row, parse_annotation_log, resolve, serialize_annotations, AnnotationContext};
use super::document::{parse_document, serialize_document};
use super::tagset::{parse_scale, parse_tagset, serialize_scale, serialize_tagset};
use crate::annotation::{
    validate_record, validate_target, AnnotationRecord, Diagnostic, DiagnosticCode, Document, Layer, TagSet,
};
use crate::error::{Error, Result};
use crate::uncertainty::{OrdinalScale, World};

/// Everything needed to interpret a corpus's annotations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorpusBundle {
    pub documents: Vec<Document>,
    pub tagsets: BTreeMap<Layer, TagSet>,
    pub scale: OrdinalScale,
    pub annotations: Vec<AnnotationRecord>,
}

/// One input to [`CorpusBundle::import`].
#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    /// Document text; `name` supplies the id when the text has no `#doc=` header.
    Document {
        name: &'a str,
        text: &'a str,
    },
    TagSet(&'a str),
    Scale(&'a str),
    Annotations(&'a str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImportMode {
    /// Sources may come in any order.
    #[default]
    WholeFile,
    /// Sources are consumed in order; annotations must follow their document.
    Streaming,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ImportOptions {
    pub mode: ImportMode,
    /// Register unknown tags in open tag sets instead of failing.
    pub register_open_tags: bool,
}

impl CorpusBundle {
    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn document_position(&self, doc_id: &str) -> Option<usize> {
        self.documents.iter().position(|d| d.doc_id == doc_id)
    }

    pub fn tagset(&self, layer: Layer) -> Option<&TagSet> {
        self.tagsets.get(&layer)
    }

    pub fn token_counts(&self) -> HashMap<String, usize> {
        self.documents
            .iter()
            .map(|d| (d.doc_id.clone(), d.token_count()))
            .collect()
    }

    /// Diagnostics for one record: tag set, scale and target checks.
    pub fn diagnose(&self, record: &AnnotationRecord) -> Vec<Diagnostic> {
        let mut out = match self.tagset(record.layer) {
            Some(tagset) => validate_record(record, tagset, &self.scale),
            None => vec![Diagnostic {
                code: DiagnosticCode::UnknownLayer,
                target: record.target.clone(),
                message: format!("no tag set is loaded for layer {}", record.layer),
            }],
        };
        out.extend(validate_target(record, self.document(&record.target.doc_id)));
        out
    }

    /// `(record index, diagnostic)` for every problem in the bundle.
    pub fn diagnostics(&self) -> Vec<(usize, Diagnostic)> {
        self.annotations
            .iter()
            .enumerate()
            .flat_map(|(i, r)| self.diagnose(r).into_iter().map(move |d| (i, d)))
            .collect()
    }

    fn add_document(&mut self, name: &str, text: &str) -> Result<()> {
        let mut document = parse_document(text)?;
        if document.doc_id.is_empty() {
            document.doc_id = name.to_string();
        }
        if self.document(&document.doc_id).is_some() {
            return Err(Error::DuplicateDocument(document.doc_id));
        }
        self.documents.push(document);
        Ok(())
    }

    fn add_tagset(&mut self, text: &str) -> Result<()> {
        let tagset = parse_tagset(text)?;
        if self.tagsets.contains_key(&tagset.layer()) {
            return Err(Error::parse(1, format!("second tag set for layer {}", tagset.layer())));
        }
        self.tagsets.insert(tagset.layer(), tagset);
        Ok(())
    }

    fn add_annotations(&mut self, text: &str, register_open_tags: bool) -> Result<()> {
        let log = parse_annotation_log(text)?;
        let counts = self.token_counts();
        for (_, line, record) in log.live() {
            if register_open_tags {
                self.register_missing_tags(record)?;
            }
            resolve(
                record,
                line,
                AnnotationContext {
                    documents: &counts,
                    tagsets: &self.tagsets,
                },
            )?;
            if let Some(tagset) = self.tagset(record.layer) {
                if let Some(tag) = record.tags().find(|t| !tagset.contains(t)) {
                    return Err(Error::UnknownTag(tag.to_string()));
                }
            }
            self.annotations.push(record.clone());
        }
        Ok(())
    }

    fn register_missing_tags(&mut self, record: &AnnotationRecord) -> Result<()> {
        let Some(tagset) = self.tagsets.get_mut(&record.layer) else {
            return Ok(());
        };
        if tagset.world() != World::Open {
            return Ok(());
        }
        for tag in record.tags() {
            if !tagset.contains(tag) {
                *tagset = tagset.register_tag(tag, "", None)?;
            }
        }
        Ok(())
    }

    /// Builds a bundle from in-memory sources.
    pub fn import(sources: &[Source<'_>], options: ImportOptions) -> Result<CorpusBundle> {
        let mut bundle = CorpusBundle::default();
        let consume = |bundle: &mut CorpusBundle, source: &Source<'_>| match *source {
            Source::Document { name, text } => bundle.add_document(name, text),
            Source::TagSet(text) => bundle.add_tagset(text),
            Source::Scale(text) => {
                bundle.scale = parse_scale(text)?;
                Ok(())
            }
            Source::Annotations(text) => bundle.add_annotations(text, options.register_open_tags),
        };
        match options.mode {
            ImportMode::Streaming => {
                for source in sources {
                    consume(&mut bundle, source)?;
                }
            }
            ImportMode::WholeFile => {
                let (annotations, rest): (Vec<_>, Vec<_>) =
                    sources.iter().partition(|s| matches!(s, Source::Annotations(_)));
                for source in rest.into_iter().chain(annotations) {
                    consume(&mut bundle, source)?;
                }
            }
        }
        Ok(bundle)
    }
}

/// Where a loaded record came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Origin {
    /// Path relative to the corpus root.
    pub file: PathBuf,
    pub line: usize,
    /// `<file stem>:<row sequence number>`; stable because logs are append-only.
    pub record_id: String,
}

/// A bundle read from disk with per-record provenance.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub bundle: CorpusBundle,
    /// Parallel to `bundle.annotations`.
    pub origins: Vec<Origin>,
}

/// Handle to a corpus directory.
#[derive(Debug, Clone)]
pub struct CorpusDir {
    root: PathBuf,
}

/// Exclusive write access to a corpus directory; released on drop.
#[derive(Debug)]
pub struct WriteLock {
    path: PathBuf,
}

impl Drop for WriteLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn sorted_tsv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "tsv"))
        .collect();
    files.sort();
    Ok(files)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tsv.tmp");
    {
        let mut file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        file.write_all(contents.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
        file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    }
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn layer_file_name(layer: Layer) -> String {
    format!("{}.tsv", layer.as_str().to_lowercase())
}

impl CorpusDir {
    pub fn new(root: impl Into<PathBuf>) -> CorpusDir {
        CorpusDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn documents_dir(&self) -> PathBuf {
        self.root.join("documents")
    }

    pub fn tagsets_dir(&self) -> PathBuf {
        self.root.join("tagsets")
    }

    pub fn annotations_dir(&self) -> PathBuf {
        self.root.join("annotations")
    }

    pub fn scale_path(&self) -> PathBuf {
        self.root.join("scale.tsv")
    }

    fn relative(&self, path: &Path) -> PathBuf {
        path.strip_prefix(&self.root).unwrap_or(path).to_path_buf()
    }

    /// Reads the corpus. Syntax errors fail; semantic problems are left for
    /// [`CorpusBundle::diagnostics`].
    pub fn load(&self) -> Result<LoadedCorpus> {
        self.load_with_scale(None)
    }

    /// Like [`CorpusDir::load`], reading the scale from `scale_path` when given.
    pub fn load_with_scale(&self, scale_path: Option<&Path>) -> Result<LoadedCorpus> {
        if !self.root.is_dir() {
            return Err(Error::Io {
                path: self.root.display().to_string(),
                message: "not a directory".into(),
            });
        }
        let mut bundle = CorpusBundle::default();
        let scale_path = scale_path.map(Path::to_path_buf).unwrap_or_else(|| self.scale_path());
        if scale_path.is_file() {
            bundle.scale = parse_scale(&read(&scale_path)?).map_err(|e| Error::in_file(&scale_path, e))?;
        }
        for path in sorted_tsv_files(&self.tagsets_dir())? {
            bundle.add_tagset(&read(&path)?).map_err(|e| Error::in_file(&path, e))?;
        }
        for path in sorted_tsv_files(&self.documents_dir())? {
            bundle
                .add_document(&stem(&path), &read(&path)?)
                .map_err(|e| Error::in_file(&path, e))?;
        }
        let mut origins = Vec::new();
        for path in sorted_tsv_files(&self.annotations_dir())? {
            let log = parse_annotation_log(&read(&path)?).map_err(|e| Error::in_file(&path, e))?;
            let file = self.relative(&path);
            let file_stem = stem(&path);
            for (seq, line, record) in log.live() {
                bundle.annotations.push(record.clone());
                origins.push(Origin {
                    file: file.clone(),
                    line,
                    record_id: format!("{file_stem}:{seq}"),
                });
            }
        }
        Ok(LoadedCorpus { bundle, origins })
    }

    /// Takes the single-writer lock.
    pub fn lock(&self) -> Result<WriteLock> {
        fs::create_dir_all(&self.root).map_err(|e| Error::io(&self.root, e))?;
        let path = self.root.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut file) => {
                let _ = writeln!(file, "{}", std::process::id());
                Ok(WriteLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked(path.display().to_string())),
            Err(e) => Err(Error::io(&path, e)),
        }
    }

    /// Writes the whole bundle in canonical form, replacing any `.tsv` files
    /// already in the corpus subdirectories.
    pub fn save(&self, bundle: &CorpusBundle, _lock: &WriteLock) -> Result<()> {
        let dirs = [self.documents_dir(), self.tagsets_dir(), self.annotations_dir()];
        for dir in &dirs {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            for stale in sorted_tsv_files(dir)? {
                fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
            }
        }
        write_atomic(&self.scale_path(), &serialize_scale(&bundle.scale))?;
        for tagset in bundle.tagsets.values() {
            write_atomic(
                &self.tagsets_dir().join(layer_file_name(tagset.layer())),
                &serialize_tagset(tagset),
            )?;
        }
        for document in &bundle.documents {
            write_atomic(
                &self.documents_dir().join(format!("{}.tsv", document.doc_id)),
                &serialize_document(document),
            )?;
        }
        let mut by_doc: BTreeMap<&str, Vec<AnnotationRecord>> = BTreeMap::new();
        for record in &bundle.annotations {
            by_doc
                .entry(record.target.doc_id.as_str())
                .or_default()
                .push(record.clone());
        }
        for (doc_id, records) in by_doc {
            write_atomic(
                &self.annotations_dir().join(format!("{doc_id}.tsv")),
                &serialize_annotations(&records),
            )?;
        }
        Ok(())
    }

    /// Rewrites one tag set file.
    pub fn write_tagset(&self, tagset: &TagSet, _lock: &WriteLock) -> Result<()> {
        let dir = self.tagsets_dir();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        // a hand-written file for this layer may use another name
        for path in sorted_tsv_files(&dir)? {
            if parse_tagset(&read(&path)?).is_ok_and(|t| t.layer() == tagset.layer()) {
                return write_atomic(&path, &serialize_tagset(tagset));
            }
        }
        write_atomic(&dir.join(layer_file_name(tagset.layer())), &serialize_tagset(tagset))
    }

    fn annotation_log_path(&self, doc_id: &str) -> PathBuf {
        self.annotations_dir().join(format!("{doc_id}.tsv"))
    }

    fn append_line(&self, path: &Path, line: &str) -> Result<usize> {
        let dir = self.annotations_dir();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let existing = if path.is_file() { read(path)? } else { String::new() };
        let rows = parse_annotation_log(&existing)
            .map_err(|e| Error::in_file(path, e))?
            .rows
            .len();
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let mut text = String::new();
        if !existing.is_empty() && !existing.ends_with('\n') {
            text.push('\n');
        }
        text.push_str(line);
        text.push('\n');
        file.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
        file.sync_all().map_err(|e| Error::io(path, e))?;
        Ok(rows)
    }

    /// Appends a record to its document's log and returns the record id.
    pub fn append_annotation(&self, record: &AnnotationRecord, _lock: &WriteLock) -> Result<String> {
        let path = self.annotation_log_path(&record.target.doc_id);
        let seq = self.append_line(&path, &format_record_row(record))?;
        Ok(format!("{}:{seq}", record.target.doc_id))
    }

    /// Retracts a record by appending a tombstone to the log that holds it.
    pub fn append_tombstone(&self, record_id: &str, _lock: &WriteLock) -> Result<()> {
        let (file_stem, seq) = record_id
            .rsplit_once(':')
            .ok_or_else(|| Error::InvalidRecord(format!("bad record id `{record_id}`")))?;
        let seq: usize = seq
            .parse()
            .map_err(|_| Error::InvalidRecord(format!("bad record id `{record_id}`")))?;
        let path = self.annotations_dir().join(format!("{file_stem}.tsv"));
        let log = parse_annotation_log(&read(&path)?).map_err(|e| Error::in_file(&path, e))?;
        if seq >= log.rows.len() || log.tombstones.contains(&seq) {
            return Err(Error::InvalidRecord(format!("no live record `{record_id}`")));
        }
        self.append_line(&path, &format!("#tombstone={seq}"))?;
        Ok(())
    }
}
