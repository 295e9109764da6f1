//! Local HTTP review API over a [`ClimbStore`].
//!
//! | method | path                   | body                              |
//! |--------|------------------------|-----------------------------------|
//! | GET    | `/climbs`              |                                   |
//! | POST   | `/climbs`              | exported climb JSON               |
//! | GET    | `/climbs/{id}`         |                                   |
//! | PATCH  | `/climbs/{id}`         | `{"title": ...}`                  |
//! | DELETE | `/climbs/{id}`         |                                   |
//! | POST   | `/climbs/{id}/crop`    | `{"at_s": ...}`                   |
//! | POST   | `/climbs/{id}/video`   | `{"filename", "fps", "offset_ms"?}` |
//! | GET    | `/videos/{filename}`   | (range requests supported)        |
//!
//! Every score and statistic comes from [`ClimbRecord::report`], the same
//! function the CLI prints.

use std::io;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use climbtrace_core::graphout::{layout, GraphMode, GraphSpec};
use climbtrace_core::metrics::SmoothnessReport;
use climbtrace_core::store::{ClimbRecord, ClimbStore, ClimbSummary, StoreError};
use climbtrace_core::videosync::{attach_video, VideoError, VideoLink};

/// Box height of the detail graph returned with each climb.
pub const DETAIL_GRAPH_HEIGHT: f64 = 240.0;

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match &e {
            StoreError::UnknownClimb(_) => StatusCode::NOT_FOUND,
            StoreError::CutOutOfRange { .. }
            | StoreError::EmptyTitle
            | StoreError::AmbiguousId(_) => StatusCode::BAD_REQUEST,
            StoreError::MalformedClimbFile(_) | StoreError::UnsupportedSchemaVersion(_) => {
                StatusCode::CONFLICT
            }
            StoreError::StorageWriteFailure { .. } | StoreError::StorageReadFailure { .. } => {
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        Self::new(status, e.to_string())
    }
}

impl From<VideoError> for ApiError {
    fn from(e: VideoError) -> Self {
        match e {
            VideoError::Store(e) => e.into(),
            other => Self::bad_request(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (
            self.status,
            Json(ErrorBody {
                error: self.message,
            }),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Clone)]
struct AppState {
    store: Arc<ClimbStore>,
}

/// Runs a store operation off the async workers.
async fn blocking<T, F>(state: &AppState, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&ClimbStore) -> ApiResult<T> + Send + 'static,
{
    let store = Arc::clone(&state.store);
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(e.to_string()))
}

/// Full view of one climb.
#[derive(Debug, Clone, Serialize)]
pub struct ClimbDetail {
    pub record: ClimbRecord,
    /// Absent when the trace is too short to score.
    pub report: Option<SmoothnessReport>,
    pub graph: GraphSpec,
}

impl ClimbDetail {
    pub fn of(record: ClimbRecord) -> Self {
        let graph = layout(record.trace(), GraphMode::Detail, 0.0, DETAIL_GRAPH_HEIGHT)
            .expect("stored traces are non-empty");
        Self {
            report: record.report().ok(),
            record,
            graph,
        }
    }
}

#[derive(Debug, Deserialize)]
struct CropRequest {
    at_s: f64,
}

#[derive(Debug, Serialize)]
struct CropResponse {
    previous_id: String,
    #[serde(flatten)]
    summary: ClimbSummary,
}

#[derive(Debug, Deserialize)]
struct RenameRequest {
    title: String,
}

#[derive(Debug, Deserialize)]
struct VideoRequest {
    filename: String,
    fps: f64,
    offset_ms: Option<i64>,
}

async fn list_climbs(State(state): State<AppState>) -> ApiResult<Json<Vec<ClimbSummary>>> {
    blocking(&state, |store| {
        Ok(store.records()?.iter().map(ClimbRecord::summary).collect())
    })
    .await
    .map(Json)
}

async fn get_climb(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<ClimbDetail>> {
    blocking(&state, move |store| Ok(ClimbDetail::of(store.get(&id)?)))
        .await
        .map(Json)
}

async fn import_climb(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    blocking(&state, move |store| {
        let existed = ClimbRecord::from_json(&body)
            .ok()
            .is_some_and(|r| store.get(r.id()).is_ok());
        let record = store.import_climb(&body)?;
        let status = if existed {
            StatusCode::OK
        } else {
            StatusCode::CREATED
        };
        Ok((status, Json(record.summary())).into_response())
    })
    .await
}

async fn crop_climb(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<CropResponse>> {
    let req: CropRequest = parse_body(&body)?;
    blocking(&state, move |store| {
        let record = store.crop(&id, req.at_s)?;
        Ok(CropResponse {
            previous_id: id,
            summary: record.summary(),
        })
    })
    .await
    .map(Json)
}

async fn rename_climb(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<ClimbSummary>> {
    let req: RenameRequest = parse_body(&body)?;
    blocking(&state, move |store| Ok(store.rename(&id, &req.title)?.summary()))
        .await
        .map(Json)
}

async fn delete_climb(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<StatusCode> {
    blocking(&state, move |store| {
        store.delete(&id)?;
        Ok(StatusCode::NO_CONTENT)
    })
    .await
}

async fn attach(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<VideoLink>> {
    let req: VideoRequest = parse_body(&body)?;
    blocking(&state, move |store| {
        let record = attach_video(store, &id, &req.filename, req.fps, req.offset_ms)?;
        Ok(record.video.expect("video just attached"))
    })
    .await
    .map(Json)
}

fn is_local_origin(origin: &HeaderValue) -> bool {
    let Ok(origin) = origin.to_str() else {
        return false;
    };
    let rest = origin
        .strip_prefix("http://")
        .or_else(|| origin.strip_prefix("https://"))
        .unwrap_or("");
    let host = match rest.strip_prefix('[') {
        Some(v6) => v6.split(']').next().map(|h| format!("[{h}]")),
        None => rest.split(':').next().map(str::to_string),
    };
    matches!(
        host.as_deref(),
        Some("localhost") | Some("127.0.0.1") | Some("[::1]")
    )
}

/// Builds the API router over `store`. Files in the store directory are
/// served under `/videos`.
pub fn router(store: Arc<ClimbStore>) -> Router {
    let videos = ServeDir::new(store.dir());
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|origin, _| is_local_origin(origin)))
        .allow_methods([Method::GET, Method::POST, Method::PATCH, Method::DELETE])
        .allow_headers([header::CONTENT_TYPE, header::RANGE]);
    Router::new()
        .route("/climbs", get(list_climbs).post(import_climb))
        .route(
            "/climbs/{id}",
            get(get_climb).patch(rename_climb).delete(delete_climb),
        )
        .route("/climbs/{id}/crop", post(crop_climb))
        .route("/climbs/{id}/video", post(attach))
        .nest_service("/videos", videos)
        .layer(cors)
        .with_state(AppState { store })
}

pub async fn bind(addr: SocketAddr) -> io::Result<tokio::net::TcpListener> {
    tokio::net::TcpListener::bind(addr).await
}

/// Serves until ctrl-c.
pub async fn serve(listener: tokio::net::TcpListener, store: Arc<ClimbStore>) -> io::Result<()> {
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
