//! Command-line interface. Query subcommands print the same compact JSON the
//! HTTP endpoints return.

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, GraphKind, MiningParams};
use crate::config::AnalysisConfig;
use crate::error::{Stage, StageError};
use crate::pipeline;
use crate::request::{handle, Endpoint, Params};
use crate::snapshot::Snapshot;

#[derive(Debug, Parser)]
#[command(name = "tweetminer", version, about = "Frequent keyword sets in tweets versus stock prices")]
pub struct Cli {
    /// key = value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Tweet corpus (.jsonl or .csv), overrides the config
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// Price file as SYMBOL=PATH, repeatable
    #[arg(long = "market", global = true, value_name = "SYMBOL=PATH")]
    pub markets: Vec<String>,
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    /// Keep only tweets containing one of these comma-separated keywords
    #[arg(long, global = true)]
    pub keywords: Option<String>,
    /// drop or roll_forward
    #[arg(long, global = true)]
    pub align_mode: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct MiningArgs {
    #[arg(long)]
    pub min_support: Option<f64>,
    #[arg(long)]
    pub max_len: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and tokenize the inputs, print a summary
    Ingest,
    /// Most frequent terms
    Terms {
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Terms correlated with one term
    Associations {
        #[arg(long)]
        term: String,
        #[arg(long)]
        min_corr: Option<f64>,
    },
    /// Frequent itemsets, or association rules with --rules
    Mine {
        #[command(flatten)]
        mining: MiningArgs,
        #[arg(long)]
        rules: bool,
        #[arg(long)]
        min_confidence: Option<f64>,
    },
    /// Daily support of an itemset with its two moving averages
    Series {
        #[arg(long)]
        itemset: String,
        #[arg(long)]
        short: Option<usize>,
        #[arg(long)]
        long: Option<usize>,
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Loaded OHLCV bars
    Market {
        #[arg(long)]
        symbol: String,
    },
    /// Cross-correlation of the support average with the close price
    Ccf {
        #[arg(long)]
        itemset: String,
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        short: Option<usize>,
        #[arg(long)]
        max_lag: Option<usize>,
    },
    /// Granger tests in both directions
    Granger {
        #[arg(long)]
        itemset: String,
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        lag: Option<usize>,
        /// price or returns
        #[arg(long)]
        transform: Option<String>,
        /// Print JSON instead of the text tables
        #[arg(long)]
        json: bool,
    },
    /// AR forecast of the close price
    Forecast {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
    },
    /// Itemset or rule graph
    Graph {
        #[arg(long, default_value = "itemsets")]
        kind: String,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[command(flatten)]
        mining: MiningArgs,
        #[arg(long)]
        min_confidence: Option<f64>,
    },
    /// Full pipeline for one itemset and symbol
    Report {
        #[arg(long)]
        itemset: String,
        #[arg(long)]
        symbol: String,
    },
    /// Run the HTTP service
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        host: IpAddr,
    },
}

/// What `main` should do after a command ran.
#[derive(Debug)]
pub enum Outcome {
    Print(String),
    Serve(Box<Snapshot>, SocketAddr),
}

fn usage(message: String) -> StageError {
    StageError::usage(Stage::Config, "invalid_argument", message)
}

impl Cli {
    pub fn analysis_config(&self) -> Result<AnalysisConfig, StageError> {
        let mut cfg = match &self.config {
            Some(path) => AnalysisConfig::load(path)?,
            None => AnalysisConfig::default(),
        };
        if let Some(p) = &self.corpus {
            cfg.corpus_path = p.clone();
        }
        for spec in &self.markets {
            let (symbol, path) = spec
                .split_once('=')
                .filter(|(s, p)| !s.is_empty() && !p.is_empty())
                .ok_or_else(|| usage(format!("--market expects SYMBOL=PATH, got {spec:?}")))?;
            cfg.market_paths.insert(symbol.to_uppercase(), path.into());
        }
        if let Some(p) = &self.stopwords {
            cfg.stopwords_path = Some(p.clone());
        }
        if let Some(k) = &self.keywords {
            cfg.keywords = k
                .split(',')
                .map(|s| s.trim().to_lowercase())
                .filter(|s| !s.is_empty())
                .collect();
        }
        if let Some(a) = &self.align_mode {
            cfg.align_mode = a.parse().map_err(|e: tweetminer::DynamicsError| usage(e.to_string()))?;
        }
        if let Command::Serve { port: Some(port), .. } = self.command {
            cfg.port = port;
        }
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    tweets: usize,
    transactions: usize,
    empty_transactions: usize,
    days: usize,
    distinct_terms: usize,
    source_digest: &'a str,
    markets: Vec<MarketSummary<'a>>,
}

#[derive(Serialize)]
struct MarketSummary<'a> {
    symbol: &'a str,
    bars: usize,
    first: Option<chrono::NaiveDate>,
    last: Option<chrono::NaiveDate>,
}

fn ingest_summary(snap: &Snapshot) -> String {
    let summary = IngestSummary {
        tweets: snap.corpus.len(),
        transactions: snap.transactions.len(),
        empty_transactions: snap.transactions.iter().filter(|t| t.terms.is_empty()).count(),
        days: snap.by_day.len(),
        distinct_terms: snap.term_stats.terms.len(),
        source_digest: snap.corpus.source_digest(),
        markets: snap
            .markets
            .values()
            .map(|m| MarketSummary {
                symbol: &m.symbol,
                bars: m.bars.len(),
                first: m.bars.first().map(|b| b.date),
                last: m.bars.last().map(|b| b.date),
            })
            .collect(),
    };
    serde_json::to_string(&summary).expect("summary serializes")
}

fn put<T: ToString>(params: Params, key: &str, value: Option<T>) -> Params {
    match value {
        Some(v) => params.with(key, v),
        None => params,
    }
}

fn mining_params(params: Params, m: &MiningArgs) -> Params {
    put(put(params, "min_support", m.min_support), "max_len", m.max_len)
}

pub fn run(cli: &Cli) -> Result<Outcome, StageError> {
    let cfg = cli.analysis_config()?;
    let snap = Snapshot::load(&cfg)?;
    let query = |endpoint, params: Params| handle(&snap, endpoint, &params).map(Outcome::Print);
    match &cli.command {
        Command::Ingest => Ok(Outcome::Print(ingest_summary(&snap))),
        Command::Terms { limit } => query(Endpoint::Terms, put(Params::new(), "limit", *limit)),
        Command::Associations { term, min_corr } => query(
            Endpoint::Associations,
            put(Params::new().with("term", term), "min_corr", *min_corr),
        ),
        Command::Mine { mining, rules, min_confidence } => {
            let params = mining_params(Params::new(), mining);
            if *rules {
                query(Endpoint::Rules, put(params, "min_confidence", *min_confidence))
            } else {
                query(Endpoint::Itemsets, params)
            }
        }
        Command::Series { itemset, short, long, symbol } => {
            let params = put(put(Params::new().with("itemset", itemset), "short", *short), "long", *long);
            query(Endpoint::Series, put(params, "symbol", symbol.as_ref()))
        }
        Command::Market { symbol } => query(Endpoint::Market, Params::new().with("symbol", symbol)),
        Command::Ccf { itemset, symbol, short, max_lag } => {
            let params = Params::new().with("itemset", itemset).with("symbol", symbol);
            query(Endpoint::Ccf, put(put(params, "short", *short), "max_lag", *max_lag))
        }
        Command::Granger { itemset, symbol, lag, transform, json } => {
            let params = Params::new().with("itemset", itemset).with("symbol", symbol);
            let params = put(put(params, "lag", *lag), "transform", transform.as_ref());
            if *json {
                return query(Endpoint::Granger, params);
            }
            let view = analysis::granger(
                &snap,
                &params.itemset()?,
                symbol,
                params.get_or("lag", cfg.lag_order)?,
                params.get_or("transform", cfg.transform)?,
            )?;
            Ok(Outcome::Print(view.report.trim_end_matches('\n').to_string()))
        }
        Command::Forecast { symbol, p, d, h } => {
            let params = put(put(Params::new().with("symbol", symbol), "p", *p), "d", *d);
            query(Endpoint::Forecast, put(params, "h", *h))
        }
        Command::Graph { kind, format, mining, min_confidence } => {
            let params = mining_params(Params::new().with("kind", kind), mining);
            let params = put(params, "min_confidence", *min_confidence);
            match format {
                GraphFormat::Json => query(Endpoint::Graph, params),
                GraphFormat::Dot => {
                    let kind: GraphKind = kind.parse()?;
                    let mining = MiningParams {
                        min_support: params.get_or("min_support", cfg.min_support)?,
                        max_len: params.get_or("max_len", cfg.max_len)?,
                    };
                    let graph = analysis::graph(&snap, kind, mining, params.get_or("min_confidence", cfg.min_confidence)?)?;
                    let name = match kind {
                        GraphKind::Itemsets => "itemsets",
                        GraphKind::Rules => "rules",
                    };
                    Ok(Outcome::Print(graph.to_dot(name).trim_end_matches('\n').to_string()))
                }
            }
        }
        Command::Report { itemset, symbol } => {
            let itemset = Params::new().with("itemset", itemset).itemset()?;
            Ok(Outcome::Print(pipeline::report(&snap, &itemset, symbol)?.to_json()))
        }
        Command::Serve { host, .. } => {
            let addr = SocketAddr::new(*host, cfg.port);
            Ok(Outcome::Serve(Box::new(snap), addr))
        }
    }
}
