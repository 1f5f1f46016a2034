//! HTTP front end for corpus exploration.
//!
//! The model and its analytics are immutable and shared by every request.
//! Filtering is evaluated here rather than in the browser, so the CSV export
//! always matches the selection the user sees.
//!
//! | Method | Path | Body / query | Response |
//! |---|---|---|---|
//! | GET | `/api/topics` | | `{"topics":[{"id","label","words":[{"term","p"}]}]}` |
//! | GET | `/api/documents` | `?mode=rank\|probability` | `{"mode","k","docs":[{"id","title","top_words","ranks","probs"}]}` |
//! | GET | `/api/search` | `?q=word` | selection |
//! | POST | `/api/session` | | `{"session_id"}` |
//! | GET | `/api/session/{id}` | | filter state |
//! | POST | `/api/session/{id}/filter` | filter state | selection |
//! | POST | `/api/session/{id}/keep` | | selection |
//! | POST | `/api/session/{id}/exclude` | `{"docs":[..]}` | selection |
//! | POST | `/api/session/{id}/restore` | `{"docs":[..]}` | selection |
//! | GET | `/api/session/{id}/export.csv` | | CSV attachment |

mod error;
mod session;

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::header;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use topiclens::analytics::{DocumentsResponse, TopicsResponse};
use topiclens::filter::{self, FilterState, Selection};
use topiclens::{Analytics, DisplayMode};
use tower_http::services::ServeDir;

pub use error::ApiError;
pub use session::{Session, SessionStore};

pub const DEFAULT_PORT: u16 = 8080;
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(3600);

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub port: u16,
    pub session_ttl: Duration,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { port: DEFAULT_PORT, session_ttl: DEFAULT_SESSION_TTL, static_dir: None }
    }
}

#[derive(Clone)]
pub struct AppState {
    model: Arc<RwLock<Option<Arc<Analytics>>>>,
    sessions: Arc<SessionStore>,
}

impl AppState {
    pub fn new(analytics: Option<Analytics>, session_ttl: Duration) -> Self {
        Self {
            model: Arc::new(RwLock::new(analytics.map(Arc::new))),
            sessions: Arc::new(SessionStore::new(session_ttl)),
        }
    }

    pub fn set_model(&self, analytics: Analytics) {
        *self.model.write().expect("model lock poisoned") = Some(Arc::new(analytics));
    }

    fn analytics(&self) -> Result<Arc<Analytics>, ApiError> {
        self.model.read().expect("model lock poisoned").clone().ok_or(ApiError::NoModel)
    }

    pub fn sessions(&self) -> &SessionStore {
        &self.sessions
    }
}

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/topics", get(topics))
        .route("/api/documents", get(documents))
        .route("/api/search", get(search))
        .route("/api/session", post(create_session))
        .route("/api/session/{id}", get(session_state))
        .route("/api/session/{id}/filter", post(apply_filter))
        .route("/api/session/{id}/keep", post(keep))
        .route("/api/session/{id}/exclude", post(exclude))
        .route("/api/session/{id}/restore", post(restore))
        .route("/api/session/{id}/export.csv", get(export))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(index)),
    }
}

/// Binds `0.0.0.0:port` and serves until ctrl-c.
pub async fn serve(config: ServerConfig, analytics: Option<Analytics>) -> std::io::Result<()> {
    let state = AppState::new(analytics, config.session_ttl);
    let app = router(state, config.static_dir);
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn index() -> Html<&'static str> {
    Html(include_str!("index.html"))
}

async fn topics(State(app): State<AppState>) -> Result<Json<TopicsResponse>, ApiError> {
    Ok(Json(app.analytics()?.topics_json()))
}

#[derive(Deserialize)]
struct ModeQuery {
    mode: Option<String>,
}

async fn documents(
    State(app): State<AppState>,
    Query(q): Query<ModeQuery>,
) -> Result<Json<DocumentsResponse>, ApiError> {
    let analytics = app.analytics()?;
    let mode = match q.mode.as_deref() {
        None => DisplayMode::Rank,
        Some(raw) => raw.parse().map_err(|e: topiclens::Error| ApiError::BadRequest(e.to_string()))?,
    };
    Ok(Json(analytics.documents_json(mode)))
}

#[derive(Deserialize)]
struct SearchQuery {
    #[serde(default)]
    q: String,
}

async fn search(State(app): State<AppState>, Query(q): Query<SearchQuery>) -> Result<Json<Selection>, ApiError> {
    let analytics = app.analytics()?;
    Ok(Json(filter::search(&q.q, &analytics)))
}

#[derive(Serialize)]
struct Created {
    session_id: String,
}

async fn create_session(State(app): State<AppState>) -> Result<Json<Created>, ApiError> {
    app.analytics()?;
    Ok(Json(Created { session_id: app.sessions.create() }))
}

async fn session_state(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<FilterState>, ApiError> {
    let handle = app.sessions.get(&id).await.ok_or(ApiError::UnknownSession(id))?;
    let session = handle.lock().await;
    Ok(Json(session.state.clone()))
}

#[derive(Serialize)]
struct SelectionReply {
    #[serde(flatten)]
    selection: Selection,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
}

impl From<Selection> for SelectionReply {
    fn from(selection: Selection) -> Self {
        Self { selection, warning: None }
    }
}

fn parse_json<T: for<'de> Deserialize<'de> + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("invalid JSON body: {e}")))
}

async fn apply_filter(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SelectionReply>, ApiError> {
    let analytics = app.analytics()?;
    let handle = app.sessions.get(&id).await.ok_or(ApiError::UnknownSession(id))?;
    let state: FilterState = parse_json(&body)?;
    let selection = filter::apply(&state, &analytics)?;
    handle.lock().await.state = state;
    Ok(Json(selection.into()))
}

async fn keep(State(app): State<AppState>, Path(id): Path<String>) -> Result<Json<SelectionReply>, ApiError> {
    let analytics = app.analytics()?;
    let handle = app.sessions.get(&id).await.ok_or(ApiError::UnknownSession(id))?;
    let mut session = handle.lock().await;
    let current = filter::apply(&session.state, &analytics)?;
    let outcome = filter::keep(&session.state, &current);
    let selection = filter::apply(&outcome.state, &analytics)?;
    session.state = outcome.state;
    Ok(Json(SelectionReply { selection, warning: outcome.warning }))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct DocList {
    #[serde(default)]
    docs: BTreeSet<usize>,
}

async fn exclude(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SelectionReply>, ApiError> {
    update_docs(app, id, body, filter::exclude).await
}

async fn restore(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SelectionReply>, ApiError> {
    update_docs(app, id, body, filter::restore).await
}

async fn update_docs(
    app: AppState,
    id: String,
    body: Bytes,
    op: fn(&FilterState, &BTreeSet<usize>) -> FilterState,
) -> Result<Json<SelectionReply>, ApiError> {
    let analytics = app.analytics()?;
    let handle = app.sessions.get(&id).await.ok_or(ApiError::UnknownSession(id))?;
    let list: DocList = parse_json(&body)?;
    if let Some(&doc) = list.docs.iter().find(|&&d| d >= analytics.num_docs()) {
        return Err(ApiError::Unprocessable(format!("document {doc} out of range")));
    }
    let mut session = handle.lock().await;
    let next = op(&session.state, &list.docs);
    let selection = filter::apply(&next, &analytics)?;
    session.state = next;
    Ok(Json(selection.into()))
}

async fn export(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let analytics = app.analytics()?;
    let handle = app.sessions.get(&id).await.ok_or(ApiError::UnknownSession(id))?;
    let state = handle.lock().await.state.clone();
    let selection = filter::apply(&state, &analytics)?;
    let bytes = filter::export_csv_bytes(&selection, &analytics)?;
    Ok((
        [
            (header::CONTENT_TYPE, "text/csv; charset=utf-8"),
            (header::CONTENT_DISPOSITION, "attachment; filename=\"selection.csv\""),
        ],
        bytes,
    )
        .into_response())
}
