//! HTTP routes over the core operations.

mod error;
mod log;
mod routes;
mod sessions;

use std::ops::Deref;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::{FromRequest, FromRequestParts, Query, Request, State};
use axum::http::request::Parts;
use axum::http::{header, HeaderMap, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::Response;
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{Duration, Utc};
use parking_lot::Mutex;
use serde::de::DeserializeOwned;

use curio_core::Store;

pub use self::error::{ApiError, ApiResult};
pub use self::log::{InteractionLog, InteractionLogEntry};
pub use self::sessions::{Session, Sessions};

pub struct Config {
    /// Snapshot written after every successful mutation.
    pub snapshot: Option<PathBuf>,
    pub session_ttl: Duration,
    /// Accept the `seed` parameter on task requests (tests and demos).
    pub allow_seed: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            snapshot: None,
            session_ttl: Duration::hours(12),
            allow_seed: false,
        }
    }
}

pub struct Inner {
    pub store: Store,
    pub sessions: Sessions,
    pub log: InteractionLog,
    pub config: Config,
    persist_lock: Mutex<()>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl Deref for AppState {
    type Target = Inner;

    fn deref(&self) -> &Inner {
        &self.0
    }
}

impl AppState {
    pub fn new(store: Store, config: Config, log: InteractionLog) -> Self {
        AppState(Arc::new(Inner {
            store,
            sessions: Sessions::new(config.session_ttl),
            log,
            config,
            persist_lock: Mutex::new(()),
        }))
    }

    /// Writes the snapshot, if one is configured.
    pub fn persist(&self) -> ApiResult<()> {
        if let Some(path) = &self.config.snapshot {
            let _guard = self.persist_lock.lock();
            self.store.snapshot(path)?;
        }
        Ok(())
    }
}

fn bearer(headers: &HeaderMap) -> Option<&str> {
    headers
        .get(header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
}

/// The authenticated session of a request.
pub struct Auth(pub Session);

impl FromRequestParts<AppState> for Auth {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        bearer(&parts.headers)
            .and_then(|token| state.sessions.get(token))
            .map(Auth)
            .ok_or_else(ApiError::unauthenticated)
    }
}

/// JSON request body with errors reported as 422.
pub struct Body<T>(pub T);

impl<T: DeserializeOwned, S: Send + Sync> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        Json::<T>::from_request(req, state)
            .await
            .map(|Json(v)| Body(v))
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", e.body_text()))
    }
}

/// Query string with errors reported as 422.
pub struct Params<T>(pub T);

impl<T: DeserializeOwned, S: Send + Sync> FromRequestParts<S> for Params<T> {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, ApiError> {
        Query::<T>::from_request_parts(parts, state)
            .await
            .map(|Query(v)| Params(v))
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", e.body_text()))
    }
}

async fn log_mutations(State(state): State<AppState>, req: Request, next: Next) -> Response {
    if matches!(*req.method(), Method::GET | Method::HEAD | Method::OPTIONS) {
        return next.run(req).await;
    }
    let started = Instant::now();
    let method = req.method().to_string();
    let route = req.uri().path().to_owned();
    let user = bearer(req.headers()).and_then(|t| state.sessions.get(t)).map(|s| s.user);
    let response = next.run(req).await;
    state.log.append(InteractionLogEntry {
        timestamp: Utc::now(),
        user,
        method,
        route,
        outcome: response.status().as_u16(),
        latency_ms: started.elapsed().as_secs_f64() * 1000.0,
    });
    response
}

pub fn router(state: AppState) -> Router {
    use routes::*;
    Router::new()
        .route("/api/users/register", post(register))
        .route("/api/login", post(login))
        .route("/api/me", get(me))
        .route("/api/domains", get(list_domains))
        .route("/api/domains/{id}", get(domain_detail))
        .route("/api/tasks/next", get(next_tasks))
        .route("/api/objects/{id}", get(object_view))
        .route("/api/annotations", post(create_annotation).get(list))
        .route("/api/autocomplete", get(autocomplete))
        .route("/api/expertise", post(set_expertise))
        .route("/api/search", get(search))
        .route("/api/reviews", post(create_review))
        .route("/api/reviews/finalize", post(finalize))
        .route("/api/export/annotations", get(export))
        .route("/api/stats", get(stats))
        .route("/api/feedback", post(feedback))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route") })
        .layer(middleware::from_fn_with_state(state.clone(), log_mutations))
        .with_state(state)
}
