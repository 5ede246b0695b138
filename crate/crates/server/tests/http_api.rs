mod common;

use std::sync::Arc;

use axum::http::{Method, StatusCode};
use common::{app, call, get, json};
use tweetminer::dynamics::{align, support_series};
use tweetminer::market::close_series;
use tweetminer::{granger_test, Itemset};
use tweetminer_server::http::{router, AppState};
use tweetminer_server::request::{handle, Endpoint, Params};
use tweetminer_server::{AnalysisConfig, Snapshot};

#[tokio::test]
async fn terms_limit_and_order() {
    let app = app();
    let (status, body) = get(&app, "/api/terms?limit=50").await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    let terms = v["terms"].as_array().unwrap();
    let snap = common::snapshot();
    // the fixture has fewer than 50 distinct terms
    assert_eq!(terms.len(), snap.term_stats.terms.len());
    let keys: Vec<(i64, String)> = terms
        .iter()
        .map(|t| (-t["document_frequency"].as_i64().unwrap(), t["term"].as_str().unwrap().to_string()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let expected = serde_json::to_value(snap.term_stats.top(50)).unwrap();
    assert_eq!(v["terms"], expected);

    let (_, body) = get(&app, "/api/terms?limit=3").await;
    assert_eq!(json(&body)["terms"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn granger_matches_core_on_same_snapshot() {
    let app = app();
    let (status, body) = get(&app, "/api/granger?itemset=apple,stock&symbol=AAPL&lag=1").await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);

    let snap = common::snapshot();
    let itemset: Itemset = "apple,stock".parse().unwrap();
    let support = support_series::<f64>(&snap.by_day, &itemset).unwrap().values();
    let joined = align(&support, &close_series(snap.market("AAPL").unwrap()));
    let s: Vec<f64> = joined.iter().map(|p| p.1).collect();
    let p: Vec<f64> = joined.iter().map(|p| p.2).collect();
    for (key, effect, cause) in [("support_causes_price", &p, &s), ("price_causes_support", &s, &p)] {
        let expected = granger_test(effect, cause, 1).unwrap();
        let got = &v[key];
        assert_eq!(got["f_stat"].as_f64().unwrap(), expected.f_stat);
        assert_eq!(got["p_value"].as_f64().unwrap(), expected.p_value);
        assert_eq!(got["df1"].as_u64().unwrap() as usize, expected.df1);
        assert_eq!(got["df2"].as_u64().unwrap() as usize, expected.df2);
    }
    assert!(v["report"].as_str().unwrap().contains("Signif. codes:"));
}

#[tokio::test]
async fn every_endpoint_answers() {
    let app = app();
    for uri in [
        "/api/terms",
        "/api/associations?term=apple&min_corr=0.1",
        "/api/itemsets?min_support=0.1&max_len=2",
        "/api/rules?min_confidence=0.9",
        "/api/series?itemset=apple,stock&short=3&long=10",
        "/api/series?itemset=apple&symbol=AAPL",
        "/api/market?symbol=aapl",
        "/api/ccf?itemset=apple,stock&symbol=AAPL&max_lag=5",
        "/api/granger?itemset=apple,stock&symbol=AAPL&lag=2&transform=returns",
        "/api/forecast?symbol=AAPL&p=1&d=1&h=5",
        "/api/graph?kind=itemsets",
        "/api/graph?kind=rules&min_confidence=0.9",
    ] {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, StatusCode::OK, "{uri}: {body}");
        assert!(body.starts_with('{'), "{uri}");
    }
    let (_, body) = get(&app, "/api/ccf?itemset=apple,stock&symbol=AAPL&max_lag=5").await;
    assert_eq!(json(&body)["lags"].as_array().unwrap().len(), 11);
    let (_, body) = get(&app, "/api/forecast?symbol=AAPL&h=5").await;
    assert_eq!(json(&body)["forecast"].as_array().unwrap().len(), 5);
}

#[tokio::test]
async fn invalid_parameters_are_400_with_structured_body() {
    let app = app();
    for (uri, code) in [
        ("/api/terms?limit=many", "invalid_parameter"),
        ("/api/associations", "missing_parameter"),
        ("/api/itemsets?min_support=1.5", "invalid_min_support"),
        ("/api/series?short=3", "missing_parameter"),
        ("/api/series?itemset=apple&short=20&long=5", "invalid_window"),
        ("/api/market?symbol=MSFT", "unknown_symbol"),
        ("/api/granger?itemset=apple&symbol=AAPL&transform=log", "invalid_parameter"),
        ("/api/graph?kind=lattice", "invalid_parameter"),
    ] {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}: {body}");
        let v = json(&body);
        assert_eq!(v["code"], code, "{uri}: {body}");
        assert!(v["stage"].is_string() && v["message"].is_string());
        assert_eq!(v.as_object().unwrap().len(), 3);
    }
    let (status, body) = get(&app, "/api/nothing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(json(&body)["code"], "not_found");
}

#[tokio::test]
async fn degeneracies_are_422() {
    let app = app();
    for (uri, stage, code) in [
        ("/api/granger?itemset=zebra&symbol=AAPL", "granger", "zero_variance"),
        ("/api/ccf?itemset=zebra&symbol=AAPL", "ccf", "zero_variance"),
        ("/api/granger?itemset=apple&symbol=AAPL&lag=40", "granger", "too_short"),
    ] {
        let (status, body) = get(&app, uri).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{uri}: {body}");
        let v = json(&body);
        assert_eq!((v["stage"].as_str().unwrap(), v["code"].as_str().unwrap()), (stage, code), "{body}");
    }
}

#[tokio::test]
async fn repeated_requests_are_byte_identical() {
    let app = app();
    for uri in [
        "/api/itemsets",
        "/api/rules",
        "/api/granger?itemset=apple,stock&symbol=AAPL",
        "/api/graph?kind=rules",
        "/api/forecast?symbol=AAPL",
    ] {
        let (_, a) = get(&app, uri).await;
        let (_, b) = get(&app, uri).await;
        assert_eq!(a, b, "{uri}");
    }
    let other = common::app();
    assert_eq!(get(&app, "/api/rules").await.1, get(&other, "/api/rules").await.1);
}

#[tokio::test]
async fn responses_equal_the_shared_handler() {
    let app = app();
    let snap = common::snapshot();
    let params = Params::new().with("itemset", "apple,stock").with("symbol", "AAPL").with("max_lag", 4);
    let (_, body) = get(&app, "/api/ccf?itemset=apple,stock&symbol=AAPL&max_lag=4").await;
    assert_eq!(body, handle(&snap, Endpoint::Ccf, &params).unwrap());
}

#[tokio::test]
async fn reload_picks_up_new_files() {
    let dir = tempfile::tempdir().unwrap();
    let conf = common::copy_fixtures(dir.path());
    let app = router(AppState::new(Snapshot::load(&AnalysisConfig::load(&conf).unwrap()).unwrap()));
    let (_, before) = get(&app, "/api/terms").await;
    assert_eq!(json(&before)["n_transactions"], 1680);

    let text = std::fs::read_to_string(dir.path().join("tweets.jsonl")).unwrap();
    let head: String = text.lines().take(100).map(|l| format!("{l}\n")).collect();
    std::fs::write(dir.path().join("tweets.jsonl"), head).unwrap();
    let (status, body) = call(&app, Method::POST, "/api/reload").await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(json(&body)["tweets"], 100);
    let (_, after) = get(&app, "/api/terms").await;
    assert_eq!(json(&after)["n_transactions"], 100);

    std::fs::remove_file(dir.path().join("aapl.csv")).unwrap();
    let (status, body) = call(&app, Method::POST, "/api/reload").await;
    assert_eq!(status, StatusCode::INTERNAL_SERVER_ERROR);
    assert_eq!(json(&body)["stage"], "market");
    // A failed reload leaves the previous snapshot in place.
    assert_eq!(get(&app, "/api/terms").await.1, after);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn readers_see_whole_snapshots_during_reload() {
    let dir = tempfile::tempdir().unwrap();
    let conf = common::copy_fixtures(dir.path());
    let tweets = std::fs::read_to_string(dir.path().join("tweets.jsonl")).unwrap();
    let prices = std::fs::read_to_string(dir.path().join("aapl.csv")).unwrap();
    let take = |s: &str, n: usize| s.lines().take(n).map(|l| format!("{l}\n")).collect::<String>();
    let versions = [(tweets.clone(), prices.clone()), (take(&tweets, 1200), take(&prices, 80))];

    let cfg = AnalysisConfig::load(&conf).unwrap();
    let uri = "/api/granger?itemset=apple,stock&symbol=AAPL";
    let params = Params::new().with("itemset", "apple,stock").with("symbol", "AAPL");
    let mut expected = Vec::new();
    for (t, p) in &versions {
        std::fs::write(dir.path().join("tweets.jsonl"), t).unwrap();
        std::fs::write(dir.path().join("aapl.csv"), p).unwrap();
        expected.push(handle(&Snapshot::load(&cfg).unwrap(), Endpoint::Granger, &params).unwrap());
    }
    assert_ne!(expected[0], expected[1]);
    let expected = Arc::new(expected);

    let app = router(AppState::new(Snapshot::load(&cfg).unwrap()));
    let readers: Vec<_> = (0..8)
        .map(|_| {
            let app = app.clone();
            let expected = expected.clone();
            tokio::spawn(async move {
                for _ in 0..25 {
                    let (status, body) = get(&app, uri).await;
                    assert_eq!(status, StatusCode::OK);
                    assert!(expected.contains(&body), "mixed snapshot: {body}");
                }
            })
        })
        .collect();
    for i in 0..10 {
        let (t, p) = &versions[i % 2];
        std::fs::write(dir.path().join("tweets.jsonl"), t).unwrap();
        std::fs::write(dir.path().join("aapl.csv"), p).unwrap();
        let (status, _) = call(&app, Method::POST, "/api/reload").await;
        assert_eq!(status, StatusCode::OK);
    }
    for r in readers {
        r.await.unwrap();
    }
}
