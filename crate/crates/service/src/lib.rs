//! HTTP+JSON facade over the prioritization engine.
//!
//! One model document per process. Reads are served from immutable
//! snapshots; `PUT /api/model` requires `If-Match` with the current revision
//! (a SHA-256 of the canonical document) and rewrites the file on success.
//! What-if requests never touch the file.
//!
//! | route | |
//! |---|---|
//! | `GET /api/state` | model, revision, report, canvas layout |
//! | `PUT /api/model` | replace the model (409 stale, 422 invalid, 428 no `If-Match`) |
//! | `POST /api/whatif` | `{base_revision, overrides}` to report plus delta |
//! | `GET /api/items/{id}/impact` | impact report |
//! | `GET /api/canvas/prioritization` | canvas layout |
//! | `GET /api/canvas/business-value?entity=<id>` | business-value canvas |
//!
//! Anything else is served from `TRACY_UI_DIR` when that is set.

mod http;
mod store;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub use http::{router, StateBody};
pub use store::{ModelStore, OpenError, Revision, Snapshot, StoreError, WhatIfRequest, WhatIfResponse};

pub const UI_DIR_ENV: &str = "TRACY_UI_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Open(#[from] OpenError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

/// Serves `model_path` on 127.0.0.1:`port` until interrupted.
/// `on_ready` receives the bound address.
pub fn serve(model_path: &Path, port: u16, on_ready: impl FnOnce(SocketAddr)) -> Result<(), ServeError> {
    let store = Arc::new(ModelStore::open(model_path)?);
    let ui_dir = std::env::var_os(UI_DIR_ENV).map(PathBuf::from);
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
        on_ready(listener.local_addr()?);
        axum::serve(listener, router(store, ui_dir))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}
