//! JSON service. Readers clone an `Arc` of the current snapshot and never
//! hold the lock while computing; reload builds a fresh snapshot on a
//! blocking thread and swaps the pointer.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;

use crate::config::AnalysisConfig;
use crate::error::{ErrorKind, Stage, StageError};
use crate::request::{handle, Endpoint, Params};
use crate::snapshot::Snapshot;

#[derive(Clone)]
pub struct AppState {
    current: Arc<RwLock<Arc<Snapshot>>>,
}

impl AppState {
    pub fn new(snapshot: Snapshot) -> Self {
        AppState {
            current: Arc::new(RwLock::new(Arc::new(snapshot))),
        }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    fn swap(&self, next: Snapshot) {
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error_response(err: &StageError) -> Response {
    let status = StatusCode::from_u16(err.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    json_response(status, serde_json::to_string(err).expect("error serializes"))
}

async fn run(state: AppState, endpoint: Endpoint, query: HashMap<String, String>) -> Response {
    let snap = state.snapshot();
    let params: Params = query.into_iter().collect();
    let result = tokio::task::spawn_blocking(move || handle(&snap, endpoint, &params)).await;
    match result {
        Ok(Ok(body)) => json_response(StatusCode::OK, body),
        Ok(Err(err)) => error_response(&err),
        Err(join) => error_response(&StageError::new(Stage::Request, ErrorKind::Data, "internal", join.to_string())),
    }
}

#[derive(Debug, Serialize)]
struct ReloadSummary {
    status: &'static str,
    tweets: usize,
    transactions: usize,
    source_digest: String,
}

async fn reload(State(state): State<AppState>) -> Response {
    let config: AnalysisConfig = state.snapshot().config.clone();
    let built = tokio::task::spawn_blocking(move || Snapshot::load(&config)).await;
    match built {
        Ok(Ok(next)) => {
            let summary = ReloadSummary {
                status: "reloaded",
                tweets: next.corpus.len(),
                transactions: next.transactions.len(),
                source_digest: next.corpus.source_digest().to_string(),
            };
            state.swap(next);
            json_response(StatusCode::OK, serde_json::to_string(&summary).expect("summary serializes"))
        }
        Ok(Err(err)) => error_response(&err),
        Err(join) => error_response(&StageError::new(Stage::Request, ErrorKind::Data, "internal", join.to_string())),
    }
}

async fn not_found() -> Response {
    let err = StageError::usage(Stage::Request, "not_found", "no such endpoint");
    json_response(StatusCode::NOT_FOUND, serde_json::to_string(&err).expect("error serializes"))
}

pub fn router(state: AppState) -> Router {
    let mut app = Router::new();
    for endpoint in Endpoint::ALL {
        app = app.route(
            &format!("/api/{}", endpoint.name()),
            get(move |State(s): State<AppState>, Query(q): Query<HashMap<String, String>>| run(s, endpoint, q)),
        );
    }
    app.route("/api/reload", post(reload)).fallback(not_found).with_state(state)
}

pub async fn serve(snapshot: Snapshot, addr: SocketAddr) -> Result<(), StageError> {
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| {
        StageError::new(Stage::Config, ErrorKind::Data, "port_busy", format!("cannot bind {addr}: {e}"))
    })?;
    axum::serve(listener, router(AppState::new(snapshot)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| StageError::new(Stage::Request, ErrorKind::Data, "io", e.to_string()))
}
