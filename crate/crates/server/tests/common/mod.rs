#![allow(dead_code)]

use std::path::{Path, PathBuf};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use tower::ServiceExt;
use tweetminer_server::http::{router, AppState};
use tweetminer_server::{AnalysisConfig, Snapshot};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn config() -> AnalysisConfig {
    AnalysisConfig::load(&fixture("analysis.conf")).unwrap()
}

pub fn snapshot() -> Snapshot {
    Snapshot::load(&config()).unwrap()
}

pub fn app() -> Router {
    router(AppState::new(snapshot()))
}

pub async fn call(app: &Router, method: Method, uri: &str) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).body(Body::empty()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, String) {
    call(app, Method::GET, uri).await
}

pub fn json(body: &str) -> serde_json::Value {
    serde_json::from_str(body).unwrap()
}

/// Copies the fixture inputs into `dir` and writes a config pointing at them.
pub fn copy_fixtures(dir: &Path) -> PathBuf {
    for name in ["tweets.jsonl", "aapl.csv", "analysis.conf"] {
        std::fs::copy(fixture(name), dir.join(name)).unwrap();
    }
    dir.join("analysis.conf")
}
