use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;
use tracy_core::render::{business_value_canvas, Selector};
use tracy_core::{CanvasLayout, EngineError, Id, Model, PrioritizedReport};

use crate::store::{ModelStore, Revision, StoreError, WhatIfRequest};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateBody {
    pub model: Model,
    pub revision: Revision,
    pub report: PrioritizedReport,
    pub layout: CanvasLayout,
}

#[derive(Debug, Deserialize)]
struct EntityQuery {
    entity: Option<String>,
}

pub fn router(store: Arc<ModelStore>, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/state", get(get_state))
        .route("/api/model", put(put_model))
        .route("/api/whatif", post(post_whatif))
        .route("/api/items/{id}/impact", get(get_impact))
        .route("/api/canvas/prioritization", get(get_prioritization))
        .route("/api/canvas/business-value", get(get_business_value))
        .with_state(store);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

fn etag(revision: &Revision) -> [(header::HeaderName, HeaderValue); 1] {
    let value = HeaderValue::from_str(&format!("\"{revision}\"")).expect("hex is a valid header value");
    [(header::ETAG, value)]
}

fn error_body(status: StatusCode, error: &str, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": error, "message": message.into() }))).into_response()
}

impl IntoResponse for StoreError {
    fn into_response(self) -> Response {
        let message = self.to_string();
        match self {
            StoreError::Conflict { current, .. } => (
                StatusCode::CONFLICT,
                Json(json!({ "error": "conflict", "message": message, "current_revision": current })),
            )
                .into_response(),
            StoreError::Parse(errors) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({ "error": "unprocessable", "message": message, "parse_errors": errors })),
            )
                .into_response(),
            StoreError::Invalid(diagnostics) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                Json(json!({ "error": "unprocessable", "message": message, "diagnostics": diagnostics })),
            )
                .into_response(),
            StoreError::Io { .. } => error_body(StatusCode::INTERNAL_SERVER_ERROR, "io", message),
        }
    }
}

async fn get_state(State(store): State<Arc<ModelStore>>) -> Response {
    let snap = store.snapshot();
    let body = StateBody {
        model: snap.model.clone(),
        revision: snap.revision.clone(),
        report: snap.report.clone(),
        layout: snap.layout.clone(),
    };
    (etag(&snap.revision), Json(body)).into_response()
}

/// Accepts `"token"`, `W/"token"` or a bare token.
fn if_match(headers: &HeaderMap) -> Option<Revision> {
    let raw = headers.get(header::IF_MATCH)?.to_str().ok()?.trim();
    let raw = raw.strip_prefix("W/").unwrap_or(raw);
    let token = raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')).unwrap_or(raw);
    Some(Revision::from(token))
}

async fn put_model(State(store): State<Arc<ModelStore>>, headers: HeaderMap, body: Bytes) -> Response {
    let Some(expected) = if_match(&headers) else {
        return error_body(
            StatusCode::PRECONDITION_REQUIRED,
            "precondition_required",
            "If-Match header is required",
        );
    };
    let result = tokio::task::spawn_blocking(move || store.update(&body, &expected)).await;
    match result {
        Ok(Ok(revision)) => (etag(&revision), Json(json!({ "revision": revision }))).into_response(),
        Ok(Err(err)) => err.into_response(),
        Err(join) => error_body(StatusCode::INTERNAL_SERVER_ERROR, "internal", join.to_string()),
    }
}

async fn post_whatif(State(store): State<Arc<ModelStore>>, body: Bytes) -> Response {
    let request: WhatIfRequest = match serde_json::from_slice(&body) {
        Ok(request) => request,
        Err(err) => return error_body(StatusCode::BAD_REQUEST, "bad_request", err.to_string()),
    };
    match store.whatif(&request) {
        Ok(response) => Json(response).into_response(),
        Err(err) => err.into_response(),
    }
}

fn not_found(err: EngineError) -> Response {
    error_body(StatusCode::NOT_FOUND, "not_found", err.to_string())
}

async fn get_impact(State(store): State<Arc<ModelStore>>, Path(id): Path<String>) -> Response {
    let snap = store.snapshot();
    match tracy_core::impact_of(&snap.model, &id) {
        Ok(report) => Json(report).into_response(),
        Err(err) => not_found(err),
    }
}

async fn get_prioritization(State(store): State<Arc<ModelStore>>) -> Response {
    let snap = store.snapshot();
    (etag(&snap.revision), Json(&snap.layout)).into_response()
}

async fn get_business_value(State(store): State<Arc<ModelStore>>, Query(query): Query<EntityQuery>) -> Response {
    let selector = match query.entity {
        None => Selector::All,
        Some(raw) => match raw.parse::<Id>() {
            Ok(id) => Selector::Entity(id),
            Err(err) => return error_body(StatusCode::NOT_FOUND, "not_found", err.to_string()),
        },
    };
    let snap = store.snapshot();
    match business_value_canvas(&snap.model, &selector) {
        Ok(canvas) => Json(canvas).into_response(),
        Err(err) => not_found(err),
    }
}
