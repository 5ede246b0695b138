use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{AssociationRule, Itemset, MiningResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Itemset,
    Term,
    Rule,
}

impl NodeKind {
    fn as_str(self) -> &'static str {
        match self {
            NodeKind::Itemset => "itemset",
            NodeKind::Term => "term",
            NodeKind::Rule => "rule",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
    pub attrs: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
}

/// Directed graph with JSON (`{nodes, edges}`) and DOT renderings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn dot_value(v: &Value) -> String {
    match v {
        Value::String(s) => dot_quote(s),
        other => other.to_string(),
    }
}

impl Graph {
    pub fn out_degree(&self, id: &str) -> usize {
        self.edges.iter().filter(|e| e.from == id).count()
    }

    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {} {{\n", dot_quote(name));
        for node in &self.nodes {
            let mut attrs = vec![format!("kind={}", dot_quote(node.kind.as_str()))];
            attrs.extend(node.attrs.iter().map(|(k, v)| format!("{k}={}", dot_value(v))));
            let _ = writeln!(out, "  {} [{}];", dot_quote(&node.id), attrs.join(", "));
        }
        for edge in &self.edges {
            let _ = writeln!(out, "  {} -> {};", dot_quote(&edge.from), dot_quote(&edge.to));
        }
        out.push_str("}\n");
        out
    }
}

/// Hasse diagram of the frequent itemsets: an edge joins each itemset to every
/// frequent one-term extension of it.
pub fn itemset_graph(result: &MiningResult) -> Graph {
    let present: BTreeSet<&Itemset> = result.frequent.iter().map(|f| &f.itemset).collect();
    let nodes = result
        .frequent
        .iter()
        .map(|f| GraphNode {
            id: f.itemset.to_string(),
            kind: NodeKind::Itemset,
            attrs: BTreeMap::from([
                ("label".to_string(), Value::from(f.itemset.terms().join(" "))),
                ("support".to_string(), Value::from(f.support)),
                ("count".to_string(), Value::from(f.count)),
            ]),
        })
        .collect();
    let mut edges = Vec::new();
    for f in result.frequent.iter().filter(|f| f.itemset.len() >= 2) {
        for skip in 0..f.itemset.len() {
            let parent = Itemset(
                f.itemset
                    .terms()
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, t)| t.clone())
                    .collect(),
            );
            if present.contains(&parent) {
                edges.push(GraphEdge {
                    from: parent.to_string(),
                    to: f.itemset.to_string(),
                });
            }
        }
    }
    edges.sort();
    Graph { nodes, edges }
}

/// Id of the i-th (zero-based) rule node. `#` never occurs in a term.
pub fn rule_node_id(i: usize) -> String {
    format!("#r{}", i + 1)
}

/// Term and rule nodes; antecedent terms point into their rule, rules point
/// to their consequent terms.
pub fn rule_graph(rules: &[AssociationRule]) -> Graph {
    let terms: BTreeSet<&String> = rules
        .iter()
        .flat_map(|r| r.antecedent.terms().iter().chain(r.consequent.terms()))
        .collect();
    let mut nodes: Vec<GraphNode> = terms
        .into_iter()
        .map(|t| GraphNode {
            id: t.clone(),
            kind: NodeKind::Term,
            attrs: BTreeMap::from([("label".to_string(), Value::from(t.as_str()))]),
        })
        .collect();
    let mut edges = Vec::new();
    for (i, rule) in rules.iter().enumerate() {
        let id = rule_node_id(i);
        nodes.push(GraphNode {
            id: id.clone(),
            kind: NodeKind::Rule,
            attrs: BTreeMap::from([
                (
                    "label".to_string(),
                    Value::from(format!("{} => {}", rule.antecedent, rule.consequent)),
                ),
                ("support".to_string(), Value::from(rule.support)),
                ("confidence".to_string(), Value::from(rule.confidence)),
                ("lift".to_string(), Value::from(rule.lift)),
            ]),
        });
        edges.extend(rule.antecedent.terms().iter().map(|t| GraphEdge {
            from: t.clone(),
            to: id.clone(),
        }));
        edges.extend(rule.consequent.terms().iter().map(|t| GraphEdge {
            from: id.clone(),
            to: t.clone(),
        }));
    }
    Graph { nodes, edges }
}
