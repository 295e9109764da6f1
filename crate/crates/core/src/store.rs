//! Persistent climb store: one JSON file per climb plus an in-memory cache.
//!
//! The cache is populated lazily from disk on first use and is updated in
//! the same critical section as every disk write, so after each operation
//! it equals what a fresh [`load_dir`] of the directory would return.
//! Mutations are serialized by a writer lock; readers take a cheap
//! snapshot and never block on disk I/O.
//!
//! Climb identity is content-derived: a SHA-256 over the start epoch and the
//! magnitude samples. Title edits and video links keep the id; cropping
//! produces a new one.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::DateTime;
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingest::{ClimbTrace, GapFlag};
use crate::metrics::{MetricsError, SmoothnessReport, SAMPLE_RATE_HZ};
use crate::videosync::VideoLink;

pub const SCHEMA_VERSION: u64 = 1;

/// Hex characters of the id used in filenames.
pub const FILE_ID_PREFIX_LEN: usize = 8;

const ID_BYTES: usize = 16;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("failed to write {path}: {source}")]
    StorageWriteFailure { path: PathBuf, source: io::Error },
    #[error("failed to read {path}: {source}")]
    StorageReadFailure { path: PathBuf, source: io::Error },
    #[error("malformed climb file: {0}")]
    MalformedClimbFile(String),
    #[error("unsupported schema_version {0}")]
    UnsupportedSchemaVersion(u64),
    #[error("unknown climb {0}")]
    UnknownClimb(String),
    #[error("id prefix {0} matches more than one climb")]
    AmbiguousId(String),
    #[error("cut time {cut_s} s outside (0, {duration_s}) s")]
    CutOutOfRange { cut_s: f64, duration_s: f64 },
    #[error("title must not be empty")]
    EmptyTitle,
}

/// Content-derived identifier of a trace.
pub fn climb_id(recorded_at_ms: i64, magnitudes: &[f64]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(recorded_at_ms.to_le_bytes());
    for m in magnitudes {
        hasher.update(m.to_bits().to_le_bytes());
    }
    hex::encode(&hasher.finalize()[..ID_BYTES])
}

/// Default title: the recording time as `YYYY-MM-DD HH:MM:SS` (UTC).
pub fn default_title(recorded_at_ms: i64) -> String {
    DateTime::from_timestamp_millis(recorded_at_ms)
        .map(|d| d.format("%Y-%m-%d %H:%M:%S").to_string())
        .unwrap_or_else(|| recorded_at_ms.to_string())
}

/// A persisted climb.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimbRecord {
    id: String,
    pub title: String,
    trace: ClimbTrace,
    pub video: Option<VideoLink>,
    pub crop_history: u32,
}

impl ClimbRecord {
    pub fn new(trace: ClimbTrace, title: Option<String>) -> Self {
        let title = title
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .unwrap_or_else(|| default_title(trace.start_epoch_ms));
        Self {
            id: climb_id(trace.start_epoch_ms, trace.values()),
            title,
            trace,
            video: None,
            crop_history: 0,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn recorded_at_ms(&self) -> i64 {
        self.trace.start_epoch_ms
    }

    pub fn trace(&self) -> &ClimbTrace {
        &self.trace
    }

    /// Swaps the trace and recomputes the id.
    pub fn set_trace(&mut self, trace: ClimbTrace) {
        self.id = climb_id(trace.start_epoch_ms, trace.values());
        self.trace = trace;
    }

    pub fn report(&self) -> Result<SmoothnessReport, MetricsError> {
        SmoothnessReport::compute(self.trace.series())
    }

    pub fn summary(&self) -> ClimbSummary {
        ClimbSummary {
            id: self.id.clone(),
            title: self.title.clone(),
            recorded_at_ms: self.recorded_at_ms(),
            duration: self.trace.duration(),
            display_score: self.report().ok().map(|r| r.display_score),
        }
    }

    pub fn file_name(&self) -> String {
        format!(
            "climb_{}_{}.json",
            self.recorded_at_ms(),
            &self.id[..FILE_ID_PREFIX_LEN]
        )
    }

    pub fn to_document(&self) -> ClimbDocument {
        ClimbDocument {
            schema_version: SCHEMA_VERSION,
            title: self.title.clone(),
            recorded_at_ms: self.recorded_at_ms(),
            sample_rate_hz: self.trace.sample_rate(),
            magnitudes: self.trace.values().to_vec(),
            gap_flags: self.trace.gap_flags.clone(),
            video: self.video.clone(),
            crop_history: self.crop_history,
        }
    }

    pub fn from_document(doc: ClimbDocument) -> Result<Self, StoreError> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(StoreError::UnsupportedSchemaVersion(doc.schema_version));
        }
        if doc.sample_rate_hz != SAMPLE_RATE_HZ {
            return Err(StoreError::MalformedClimbFile(format!(
                "sample_rate_hz must be {SAMPLE_RATE_HZ}, got {}",
                doc.sample_rate_hz
            )));
        }
        if let Some(v) = &doc.video {
            if !(v.fps.is_finite() && v.fps > 0.0) {
                return Err(StoreError::MalformedClimbFile(format!(
                    "video fps must be positive, got {}",
                    v.fps
                )));
            }
        }
        let trace = ClimbTrace::new(doc.magnitudes, doc.recorded_at_ms, doc.gap_flags)
            .map_err(|e| StoreError::MalformedClimbFile(e.to_string()))?;
        let mut record = ClimbRecord::new(trace, None);
        record.title = doc.title;
        record.video = doc.video;
        record.crop_history = doc.crop_history;
        Ok(record)
    }

    /// Canonical JSON bytes in the climb file schema.
    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(&self.to_document()).expect("climb documents always serialize")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, StoreError> {
        let value: serde_json::Value = serde_json::from_slice(bytes)
            .map_err(|e| StoreError::MalformedClimbFile(e.to_string()))?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(SCHEMA_VERSION) => {}
            Some(other) => return Err(StoreError::UnsupportedSchemaVersion(other)),
            None => {
                return Err(StoreError::MalformedClimbFile(
                    "missing or invalid schema_version".into(),
                ))
            }
        }
        let doc: ClimbDocument = serde_json::from_value(value)
            .map_err(|e| StoreError::MalformedClimbFile(e.to_string()))?;
        Self::from_document(doc)
    }
}

/// One row of a climb listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimbSummary {
    pub id: String,
    pub title: String,
    pub recorded_at_ms: i64,
    pub duration: f64,
    /// Absent for traces too short to score.
    pub display_score: Option<u32>,
}

/// On-disk and exchange representation of a climb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimbDocument {
    pub schema_version: u64,
    pub title: String,
    pub recorded_at_ms: i64,
    pub sample_rate_hz: u32,
    pub magnitudes: Vec<f64>,
    pub gap_flags: Vec<GapFlag>,
    pub video: Option<VideoLink>,
    pub crop_history: u32,
}

/// API view of a record: the document plus its id.
impl Serialize for ClimbRecord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            id: &'a str,
            #[serde(flatten)]
            doc: ClimbDocument,
        }
        View {
            id: &self.id,
            doc: self.to_document(),
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    pub records: Vec<ClimbRecord>,
    pub skipped: Vec<SkippedFile>,
}

#[derive(Debug, Clone, Default)]
struct CacheState {
    /// Newest first.
    records: Vec<ClimbRecord>,
    paths: HashMap<String, Vec<PathBuf>>,
}

impl CacheState {
    fn sort(&mut self) {
        self.records.sort_by(|a, b| {
            b.recorded_at_ms()
                .cmp(&a.recorded_at_ms())
                .then_with(|| a.id.cmp(&b.id))
        });
    }

    fn position(&self, id: &str) -> Option<usize> {
        self.records.iter().position(|r| r.id == id)
    }
}

fn is_climb_file(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
        && path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| !n.starts_with('.'))
}

fn scan_dir(dir: &Path) -> Result<(CacheState, Vec<SkippedFile>), StoreError> {
    let read_err = |source| StoreError::StorageReadFailure {
        path: dir.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(read_err)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(read_err)?;
    files.retain(|p| p.is_file() && is_climb_file(p));
    files.sort();

    let mut state = CacheState::default();
    let mut skipped = Vec::new();
    for path in files {
        let parsed = fs::read(&path)
            .map_err(|e| e.to_string())
            .and_then(|b| ClimbRecord::from_json(&b).map_err(|e| e.to_string()));
        match parsed {
            Ok(record) => {
                let paths = state.paths.entry(record.id.clone()).or_default();
                if paths.is_empty() {
                    state.records.push(record);
                }
                paths.push(path);
            }
            Err(reason) => skipped.push(SkippedFile { path, reason }),
        }
    }
    state.sort();
    Ok((state, skipped))
}

/// Reads every climb file in `dir` without touching any cache.
///
/// Malformed files are skipped and reported. Several files carrying the
/// same climb collapse into one record.
pub fn load_dir(dir: impl AsRef<Path>) -> Result<LoadReport, StoreError> {
    let (state, skipped) = scan_dir(dir.as_ref())?;
    Ok(LoadReport {
        records: state.records,
        skipped,
    })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|source| {
            let _ = fs::remove_file(&tmp);
            StoreError::StorageWriteFailure {
                path: path.to_path_buf(),
                source,
            }
        })
}

fn remove_file(path: &Path) -> Result<(), StoreError> {
    match fs::remove_file(path) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(()),
        Err(source) => Err(StoreError::StorageWriteFailure {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Directory-backed climb store with a coherent in-memory cache.
#[derive(Debug)]
pub struct ClimbStore {
    dir: PathBuf,
    cache: RwLock<Option<Arc<CacheState>>>,
    writer: Mutex<()>,
}

impl ClimbStore {
    /// Opens (creating if needed) a storage directory. Nothing is read until
    /// the first query.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| StoreError::StorageWriteFailure {
            path: dir.clone(),
            source,
        })?;
        Ok(Self {
            dir,
            cache: RwLock::new(None),
            writer: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn snapshot(&self) -> Result<Arc<CacheState>, StoreError> {
        if let Some(state) = self.cache.read().as_ref() {
            return Ok(Arc::clone(state));
        }
        let _w = self.writer.lock();
        self.snapshot_locked()
    }

    /// Caller holds the writer lock.
    fn snapshot_locked(&self) -> Result<Arc<CacheState>, StoreError> {
        if let Some(state) = self.cache.read().as_ref() {
            return Ok(Arc::clone(state));
        }
        let (state, _) = scan_dir(&self.dir)?;
        let state = Arc::new(state);
        *self.cache.write() = Some(Arc::clone(&state));
        Ok(state)
    }

    /// Re-reads the directory, replacing the cache.
    pub fn load_all(&self) -> Result<LoadReport, StoreError> {
        let _w = self.writer.lock();
        let (state, skipped) = scan_dir(&self.dir)?;
        let records = state.records.clone();
        *self.cache.write() = Some(Arc::new(state));
        Ok(LoadReport { records, skipped })
    }

    /// Cached records, newest first.
    pub fn records(&self) -> Result<Vec<ClimbRecord>, StoreError> {
        Ok(self.snapshot()?.records.clone())
    }

    pub fn get(&self, id: &str) -> Result<ClimbRecord, StoreError> {
        let state = self.snapshot()?;
        state
            .position(id)
            .map(|i| state.records[i].clone())
            .ok_or_else(|| StoreError::UnknownClimb(id.to_string()))
    }

    /// Full id of the single climb whose id starts with `prefix`.
    pub fn resolve(&self, prefix: &str) -> Result<String, StoreError> {
        let state = self.snapshot()?;
        let mut hits = state
            .records
            .iter()
            .filter(|r| !prefix.is_empty() && r.id.starts_with(prefix));
        match (hits.next(), hits.next()) {
            (Some(r), None) => Ok(r.id.clone()),
            (Some(_), Some(_)) => Err(StoreError::AmbiguousId(prefix.to_string())),
            (None, _) => Err(StoreError::UnknownClimb(prefix.to_string())),
        }
    }

    /// Writes `record` and replaces `replaced` (if any) in one step.
    /// Caller holds the writer lock.
    fn commit(&self, record: ClimbRecord, replaced: Option<&str>) -> Result<PathBuf, StoreError> {
        let current = self.snapshot_locked()?;
        let path = self.dir.join(record.file_name());
        let mut stale: Vec<PathBuf> = [Some(record.id.as_str()), replaced]
            .into_iter()
            .flatten()
            .filter_map(|id| current.paths.get(id))
            .flatten()
            .filter(|p| **p != path)
            .cloned()
            .collect();
        stale.dedup();

        let result = write_atomic(&path, &record.to_json())
            .and_then(|_| stale.iter().try_for_each(|p| remove_file(p)));
        if let Err(e) = result {
            // Disk state is uncertain; force a reload on next access.
            *self.cache.write() = None;
            return Err(e);
        }

        let mut next = (*current).clone();
        for id in [Some(record.id.as_str()), replaced].into_iter().flatten() {
            if let Some(i) = next.position(id) {
                next.records.remove(i);
            }
            next.paths.remove(id);
        }
        next.paths.insert(record.id.clone(), vec![path.clone()]);
        next.records.push(record);
        next.sort();
        *self.cache.write() = Some(Arc::new(next));
        Ok(path)
    }

    /// Persists a record, inserting or replacing it by id.
    pub fn save(&self, record: &ClimbRecord) -> Result<PathBuf, StoreError> {
        let _w = self.writer.lock();
        self.commit(record.clone(), None)
    }

    /// Applies `edit` to the stored climb `id` and persists the result. If
    /// the edit changes the trace, the record moves to its new id.
    pub fn update<F>(&self, id: &str, edit: F) -> Result<ClimbRecord, StoreError>
    where
        F: FnOnce(&mut ClimbRecord) -> Result<(), StoreError>,
    {
        let _w = self.writer.lock();
        let state = self.snapshot_locked()?;
        let mut record = state
            .position(id)
            .map(|i| state.records[i].clone())
            .ok_or_else(|| StoreError::UnknownClimb(id.to_string()))?;
        edit(&mut record)?;
        self.commit(record.clone(), Some(id))?;
        Ok(record)
    }

    /// Loads an exported climb and persists it. Importing a climb that is
    /// already stored returns the stored copy unchanged.
    pub fn import_climb(&self, bytes: &[u8]) -> Result<ClimbRecord, StoreError> {
        let record = ClimbRecord::from_json(bytes)?;
        let _w = self.writer.lock();
        let state = self.snapshot_locked()?;
        if let Some(i) = state.position(&record.id) {
            return Ok(state.records[i].clone());
        }
        self.commit(record.clone(), None)?;
        Ok(record)
    }

    pub fn export_climb(&self, id: &str) -> Result<Vec<u8>, StoreError> {
        Ok(self.get(id)?.to_json())
    }

    pub fn delete(&self, id: &str) -> Result<(), StoreError> {
        let _w = self.writer.lock();
        let current = self.snapshot_locked()?;
        let index = current
            .position(id)
            .ok_or_else(|| StoreError::UnknownClimb(id.to_string()))?;
        let removed = current
            .paths
            .get(id)
            .into_iter()
            .flatten()
            .try_for_each(|p| remove_file(p));
        if let Err(e) = removed {
            *self.cache.write() = None;
            return Err(e);
        }
        let mut next = (*current).clone();
        next.records.remove(index);
        next.paths.remove(id);
        *self.cache.write() = Some(Arc::new(next));
        Ok(())
    }

    /// Drops every sample after `cut_s` seconds. Requires `0 < cut_s < duration`.
    pub fn crop(&self, id: &str, cut_s: f64) -> Result<ClimbRecord, StoreError> {
        self.update(id, |record| {
            let duration_s = record.trace().duration();
            if !(cut_s > 0.0 && cut_s < duration_s) {
                return Err(StoreError::CutOutOfRange { cut_s, duration_s });
            }
            let trace = record.trace().truncated(cut_s);
            record.set_trace(trace);
            record.crop_history += 1;
            Ok(())
        })
    }

    pub fn rename(&self, id: &str, title: &str) -> Result<ClimbRecord, StoreError> {
        let title = title.trim();
        if title.is_empty() {
            return Err(StoreError::EmptyTitle);
        }
        self.update(id, |record| {
            record.title = title.to_string();
            Ok(())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn trace(n: usize, epoch: i64, slope: f64) -> ClimbTrace {
        ClimbTrace::new(
            (0..n).map(|i| 1.0 + slope * i as f64).collect(),
            epoch,
            vec![],
        )
        .unwrap()
    }

    fn fresh() -> (TempDir, ClimbStore) {
        let dir = TempDir::new().unwrap();
        let store = ClimbStore::open(dir.path()).unwrap();
        (dir, store)
    }

    #[test]
    fn save_inserts_once() {
        let (_d, store) = fresh();
        let rec = ClimbRecord::new(trace(40, 1_000, 0.01), None);
        let path = store.save(&rec).unwrap();
        assert!(path.exists());
        assert_eq!(
            path.file_name().unwrap().to_str().unwrap(),
            format!("climb_1000_{}.json", &rec.id()[..8])
        );
        store.save(&rec).unwrap();
        assert_eq!(store.records().unwrap().len(), 1);
    }

    #[test]
    fn title_edit_keeps_id_and_file() {
        let (d, store) = fresh();
        let rec = ClimbRecord::new(trace(40, 1_000, 0.01), None);
        let p1 = store.save(&rec).unwrap();
        let mut edited = rec.clone();
        edited.title = "pink v2 route".into();
        let p2 = store.save(&edited).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(store.records().unwrap(), vec![edited.clone()]);
        assert_eq!(load_dir(d.path()).unwrap().records, vec![edited]);
    }

    #[test]
    fn default_title_is_timestamp() {
        assert_eq!(default_title(1_554_034_800_123), "2019-03-31 12:20:00");
    }

    #[test]
    fn load_skips_corrupt_files() {
        let (d, store) = fresh();
        for i in 0..3 {
            store
                .save(&ClimbRecord::new(trace(30, 1_000 * i, 0.01), None))
                .unwrap();
        }
        fs::write(d.path().join("broken.json"), b"{\"schema_version\":1,").unwrap();
        fs::write(d.path().join("video.mp4"), b"\0\0").unwrap();
        let report = store.load_all().unwrap();
        assert_eq!(report.records.len(), 3);
        assert_eq!(report.skipped.len(), 1);
        let times: Vec<i64> = report.records.iter().map(|r| r.recorded_at_ms()).collect();
        assert_eq!(times, vec![2_000, 1_000, 0]);
        assert_eq!(store.load_all().unwrap(), report);
    }

    #[test]
    fn empty_dir_loads_nothing() {
        let (_d, store) = fresh();
        assert!(store.load_all().unwrap().records.is_empty());
    }

    #[test]
    fn lazy_cache_sees_existing_files() {
        let (d, store) = fresh();
        let rec = ClimbRecord::new(trace(30, 5, 0.0), None);
        store.save(&rec).unwrap();
        let other = ClimbStore::open(d.path()).unwrap();
        assert_eq!(other.records().unwrap(), vec![rec]);
    }

    #[test]
    fn delete_rules() {
        let (d, store) = fresh();
        let recs: Vec<_> = (0..3)
            .map(|i| ClimbRecord::new(trace(30, i, 0.02), None))
            .collect();
        for r in &recs {
            store.save(r).unwrap();
        }
        store.delete(recs[1].id()).unwrap();
        let left = load_dir(d.path()).unwrap().records;
        assert_eq!(left, vec![recs[2].clone(), recs[0].clone()]);
        assert!(matches!(
            store.delete(recs[1].id()),
            Err(StoreError::UnknownClimb(_))
        ));
    }

    #[test]
    fn crop_moves_to_new_id() {
        let (d, store) = fresh();
        let rec = ClimbRecord::new(trace(201, 0, 0.001), Some("x".into()));
        store.save(&rec).unwrap();
        let cropped = store.crop(rec.id(), 6.0).unwrap();
        assert_eq!(cropped.trace().len(), 121);
        assert_eq!(cropped.trace().duration(), 6.0);
        assert_eq!(cropped.crop_history, 1);
        assert_eq!(cropped.title, "x");
        assert_ne!(cropped.id(), rec.id());
        assert_eq!(load_dir(d.path()).unwrap().records, vec![cropped.clone()]);
        assert!(matches!(
            store.crop(cropped.id(), 6.0),
            Err(StoreError::CutOutOfRange { .. })
        ));
        assert!(matches!(
            store.crop(cropped.id(), 0.0),
            Err(StoreError::CutOutOfRange { .. })
        ));
    }

    #[test]
    fn rename_rules() {
        let (d, store) = fresh();
        let rec = ClimbRecord::new(trace(30, 0, 0.01), None);
        store.save(&rec).unwrap();
        let renamed = store.rename(rec.id(), "  pink v2 route ").unwrap();
        assert_eq!(renamed.title, "pink v2 route");
        assert_eq!(renamed.id(), rec.id());
        let reloaded = ClimbStore::open(d.path()).unwrap();
        assert_eq!(reloaded.get(rec.id()).unwrap().title, "pink v2 route");
        assert!(matches!(
            store.rename(rec.id(), "   "),
            Err(StoreError::EmptyTitle)
        ));
        assert!(matches!(
            store.rename("nope", "t"),
            Err(StoreError::UnknownClimb(_))
        ));
    }

    #[test]
    fn import_rules() {
        let (_d, store) = fresh();
        let rec = ClimbRecord::new(trace(30, 0, 0.01), None);
        let bytes = rec.to_json();
        assert_eq!(store.import_climb(&bytes).unwrap(), rec);
        store.import_climb(&bytes).unwrap();
        assert_eq!(store.records().unwrap().len(), 1);
        assert!(matches!(
            store.import_climb(&bytes[..bytes.len() / 2]),
            Err(StoreError::MalformedClimbFile(_))
        ));
        let v2 = String::from_utf8(bytes)
            .unwrap()
            .replace("\"schema_version\":1", "\"schema_version\":2");
        assert!(matches!(
            store.import_climb(v2.as_bytes()),
            Err(StoreError::UnsupportedSchemaVersion(2))
        ));
    }

    #[test]
    fn document_layout() {
        let mut rec = ClimbRecord::new(trace(2, 7, 0.5), Some("t".into()));
        rec.video = Some(VideoLink {
            filename: "v.mp4".into(),
            offset_ms: -40,
            fps: 30.0,
        });
        let text = String::from_utf8(rec.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"schema_version":1,"title":"t","recorded_at_ms":7,"sample_rate_hz":20,"magnitudes":[1.0,1.5],"gap_flags":[],"video":{"filename":"v.mp4","offset_ms":-40,"fps":30.0},"crop_history":0}"#
        );
    }

    #[test]
    fn prefix_resolution() {
        let (_d, store) = fresh();
        let rec = ClimbRecord::new(trace(30, 0, 0.01), None);
        store.save(&rec).unwrap();
        assert_eq!(store.resolve(&rec.id()[..6]).unwrap(), rec.id());
        assert!(store.resolve("").is_err());
    }
}
