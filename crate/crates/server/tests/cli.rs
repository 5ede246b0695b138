mod common;

use std::process::{Command, Output};

fn tweetminer(args: &[&str]) -> Output {
    let conf = common::fixture("analysis.conf");
    Command::new(env!("CARGO_BIN_EXE_tweetminer"))
        .arg("--config")
        .arg(conf)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[tokio::test]
async fn cli_json_equals_http_body() {
    let app = common::app();
    let cases: [(&[&str], &str); 9] = [
        (&["terms", "--limit", "10"], "/api/terms?limit=10"),
        (&["associations", "--term", "apple"], "/api/associations?term=apple"),
        (&["mine", "--min-support", "0.1"], "/api/itemsets?min_support=0.1"),
        (&["mine", "--rules", "--min-confidence", "0.7"], "/api/rules?min_confidence=0.7"),
        (&["series", "--itemset", "apple,stock", "--short", "3"], "/api/series?itemset=apple,stock&short=3"),
        (&["ccf", "--itemset", "apple,stock", "--symbol", "AAPL", "--max-lag", "6"], "/api/ccf?itemset=apple,stock&symbol=AAPL&max_lag=6"),
        (
            &["granger", "--itemset", "apple,stock", "--symbol", "AAPL", "--lag", "2", "--json"],
            "/api/granger?itemset=apple,stock&symbol=AAPL&lag=2",
        ),
        (&["forecast", "--symbol", "AAPL", "--h", "4"], "/api/forecast?symbol=AAPL&h=4"),
        (&["graph", "--kind", "rules"], "/api/graph?kind=rules"),
    ];
    for (args, uri) in cases {
        let out = tweetminer(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let (_, body) = common::get(&app, uri).await;
        assert_eq!(stdout(&out).trim_end(), body, "{args:?}");
    }
}

#[test]
fn granger_text_report() {
    let out = tweetminer(&["granger", "--itemset", "apple,stock", "--symbol", "AAPL"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("test 1\n\nGranger causality test\n\nModel 1: AAPL ~ Lags(AAPL, 1:1) + Lags(apple_stock, 1:1)\n"));
    assert!(text.contains("\ntest 2\n\nGranger causality test\n\nModel 1: apple_stock ~ Lags(apple_stock, 1:1) + Lags(AAPL, 1:1)\n"));
    // only the significant direction carries the legend
    assert_eq!(text.matches("Signif. codes:").count(), 1);
}

#[test]
fn exit_codes() {
    let ok = tweetminer(&["ingest"]);
    assert_eq!(ok.status.code(), Some(0));
    let summary = common::json(&stdout(&ok));
    assert_eq!(summary["tweets"], 1680);
    assert_eq!(summary["markets"][0]["bars"], 100);

    let usage = tweetminer(&["granger", "--itemset", "apple", "--symbol", "MSFT"]);
    assert_eq!(usage.status.code(), Some(2));
    let err = common::json(&String::from_utf8(usage.stderr).unwrap());
    assert_eq!(err["stage"], "market");
    assert_eq!(err["code"], "unknown_symbol");

    assert_eq!(tweetminer(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(tweetminer(&["mine", "--min-support", "2"]).status.code(), Some(2));

    let degenerate = tweetminer(&["granger", "--itemset", "zebra", "--symbol", "AAPL"]);
    assert_eq!(degenerate.status.code(), Some(4));
    let err = common::json(&String::from_utf8(degenerate.stderr).unwrap());
    assert_eq!(err["code"], "zero_variance");

    let data = tweetminer(&["--corpus", "/nonexistent/tweets.jsonl", "ingest"]);
    assert_eq!(data.status.code(), Some(3));
    let err = common::json(&String::from_utf8(data.stderr).unwrap());
    assert_eq!(err["stage"], "corpus");
}

#[test]
fn dot_graph_and_report() {
    let out = tweetminer(&["graph", "--format", "dot", "--max-len", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("digraph \"itemsets\" {"));

    let a = tweetminer(&["report", "--itemset", "apple,stock", "--symbol", "AAPL"]);
    let b = tweetminer(&["report", "--itemset", "apple,stock", "--symbol", "AAPL"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let report = common::json(&stdout(&a));
    assert_eq!(report["granger"]["status"], "ok");
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let tweets = common::fixture("tweets.jsonl");
    let market = format!("msft={}", common::fixture("aapl.csv").display());
    let out = Command::new(env!("CARGO_BIN_EXE_tweetminer"))
        .current_dir(dir.path())
        .args(["--corpus", tweets.to_str().unwrap(), "--market", &market, "--keywords", "iphone", "ingest"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = common::json(&stdout(&out));
    assert_eq!(summary["markets"][0]["symbol"], "MSFT");
    assert!(summary["tweets"].as_u64().unwrap() < 1680);
}
