use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tracy_core::ingest::{parse_model, serialize_model, ParseError};
use tracy_core::model::{has_errors, validate, Diagnostic, DiagnosticCode};
use tracy_core::render::layout_prioritization_canvas;
use tracy_core::{
    apply_whatif, prioritize, CanvasLayout, EngineError, Model, PrioritizedReport, RankChange, WhatIfOverrides,
};

/// Content hash of a model's canonical serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Revision(String);

impl Revision {
    pub fn of_bytes(canonical: &[u8]) -> Self {
        Revision(hex::encode(Sha256::digest(canonical)))
    }

    pub fn of_model(model: &Model) -> Self {
        Self::of_bytes(&serialize_model(model))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Revision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Revision {
    fn from(token: &str) -> Self {
        Revision(token.to_string())
    }
}

/// Everything derived from one revision. Never mutated after construction.
#[derive(Debug)]
pub struct Snapshot {
    pub model: Model,
    pub canonical: Vec<u8>,
    pub revision: Revision,
    pub report: PrioritizedReport,
    pub layout: CanvasLayout,
}

impl Snapshot {
    /// Fails with the model's diagnostics when it has errors.
    pub fn build(model: Model) -> Result<Self, Vec<Diagnostic>> {
        let model = model.canonicalized();
        let diagnostics = validate(&model);
        if has_errors(&diagnostics) {
            return Err(diagnostics);
        }
        let report = prioritize(&model).map_err(engine_diagnostics)?;
        let layout = layout_prioritization_canvas(&model).map_err(engine_diagnostics)?;
        let canonical = serialize_model(&model);
        Ok(Snapshot {
            revision: Revision::of_bytes(&canonical),
            model,
            canonical,
            report,
            layout,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WhatIfRequest {
    pub base_revision: Revision,
    #[serde(default)]
    pub overrides: WhatIfOverrides,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatIfResponse {
    pub revision: Revision,
    pub report: PrioritizedReport,
    pub delta: Vec<RankChange>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("revision {expected} is stale; current is {current}")]
    Conflict { expected: Revision, current: Revision },
    #[error("document could not be parsed")]
    Parse(Vec<ParseError>),
    #[error("document has errors")]
    Invalid(Vec<Diagnostic>),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, thiserror::Error)]
pub enum OpenError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path} could not be parsed")]
    Parse { path: PathBuf, errors: Vec<ParseError> },
    #[error("{path} has errors")]
    Invalid {
        path: PathBuf,
        diagnostics: Vec<Diagnostic>,
    },
}

/// The single model a service instance serves.
///
/// Readers clone the current `Arc<Snapshot>` and never wait on writers for
/// longer than that clone. Writers are serialized by `write_lock`, which is
/// held across the revision check, the file write and the swap.
#[derive(Debug)]
pub struct ModelStore {
    path: Option<PathBuf>,
    current: RwLock<Arc<Snapshot>>,
    write_lock: Mutex<()>,
}

impl ModelStore {
    /// Loads and validates the model file. The file itself is not rewritten.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, OpenError> {
        let path = path.as_ref().to_path_buf();
        let bytes = fs::read(&path).map_err(|source| OpenError::Io {
            path: path.clone(),
            source,
        })?;
        let parsed = parse_model(&bytes).map_err(|errors| OpenError::Parse {
            path: path.clone(),
            errors,
        })?;
        let snapshot = Snapshot::build(parsed.model).map_err(|diagnostics| OpenError::Invalid {
            path: path.clone(),
            diagnostics,
        })?;
        Ok(Self::with_snapshot(Some(path), snapshot))
    }

    /// A store with no backing file; updates only change memory.
    pub fn in_memory(model: Model) -> Result<Self, Vec<Diagnostic>> {
        Ok(Self::with_snapshot(None, Snapshot::build(model)?))
    }

    fn with_snapshot(path: Option<PathBuf>, snapshot: Snapshot) -> Self {
        ModelStore {
            path,
            current: RwLock::new(Arc::new(snapshot)),
            write_lock: Mutex::new(()),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn update(&self, document: &[u8], expected: &Revision) -> Result<Revision, StoreError> {
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let current = self.snapshot();
        if &current.revision != expected {
            return Err(StoreError::Conflict {
                expected: expected.clone(),
                current: current.revision.clone(),
            });
        }
        let parsed = parse_model(document).map_err(StoreError::Parse)?;
        let next = Snapshot::build(parsed.model).map_err(StoreError::Invalid)?;
        if let Some(path) = &self.path {
            persist(path, &next.canonical).map_err(|source| StoreError::Io {
                path: path.clone(),
                source,
            })?;
        }
        let revision = next.revision.clone();
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(revision)
    }

    pub fn whatif(&self, request: &WhatIfRequest) -> Result<WhatIfResponse, StoreError> {
        let current = self.snapshot();
        if current.revision != request.base_revision {
            return Err(StoreError::Conflict {
                expected: request.base_revision.clone(),
                current: current.revision.clone(),
            });
        }
        let outcome = apply_whatif(&current.model, &request.overrides)
            .map_err(|err| StoreError::Invalid(engine_diagnostics(err)))?;
        Ok(WhatIfResponse {
            revision: current.revision.clone(),
            report: outcome.report,
            delta: outcome.delta,
        })
    }
}

fn engine_diagnostics(err: EngineError) -> Vec<Diagnostic> {
    match err {
        EngineError::InvalidModel(diagnostics) => diagnostics,
        EngineError::UnknownReference { kind, id } => {
            vec![Diagnostic::error(
                DiagnosticCode::MissingRef,
                id.clone(),
                format!("unknown {kind} {id:?}"),
            )]
        }
    }
}

/// Write to a sibling temp file, then rename over the target.
fn persist(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let mut file = fs::File::create(&tmp)?;
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tracy_core::sample::sales_model;

    #[test]
    fn revision_is_sha256_hex() {
        let r = Revision::of_bytes(b"");
        assert_eq!(
            r.as_str(),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn equal_models_equal_revisions() {
        let a = sales_model();
        let mut b = sales_model();
        b.debt_items.reverse();
        assert_eq!(Revision::of_model(&a), Revision::of_model(&b));
        b.debt_items.pop();
        assert_ne!(Revision::of_model(&a), Revision::of_model(&b));
    }

    #[test]
    fn stale_update_is_a_conflict() {
        let store = ModelStore::in_memory(sales_model()).unwrap();
        let before = store.snapshot().revision.clone();
        let err = store
            .update(&store.snapshot().canonical, &Revision::from("stale"))
            .unwrap_err();
        assert!(matches!(err, StoreError::Conflict { .. }));
        assert_eq!(store.snapshot().revision, before);
    }

    #[test]
    fn unknown_override_is_missing_ref() {
        let store = ModelStore::in_memory(sales_model()).unwrap();
        let mut overrides = WhatIfOverrides::default();
        overrides
            .asset_state_changes
            .insert("ghost".parse().unwrap(), tracy_core::AssetState::Operational);
        let request = WhatIfRequest {
            base_revision: store.snapshot().revision.clone(),
            overrides,
        };
        match store.whatif(&request).unwrap_err() {
            StoreError::Invalid(d) => assert_eq!(d[0].code, DiagnosticCode::MissingRef),
            other => panic!("{other:?}"),
        }
    }
}
