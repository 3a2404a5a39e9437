use std::fmt::Write;

use prisyn_core::model::{PrioritySet, System};
use prisyn_core::resolve::RoundStats;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Priority {
    pub low: String,
    pub high: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<&'static str>,
}

pub fn priorities(s: &System, p: &PrioritySet, side: Option<&'static str>) -> Vec<Priority> {
    p.iter()
        .map(|(l, h)| Priority {
            low: s.interaction_name(l).to_string(),
            high: s.interaction_name(h).to_string(),
            side,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub interaction: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub configuration: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbstractionInfo {
    pub kept: Vec<String>,
    pub eliminated: Vec<String>,
    pub abstract_alphabet: usize,
    pub abstracted: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct EncodingStats {
    pub order: Vec<String>,
    pub nodes: Vec<(String, usize)>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub rounds: Vec<RoundStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoding: Option<EncodingStats>,
    pub millis: u128,
}

/// Everything a command reports. The text and JSON renderings are built
/// from the same fields.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub model: String,
    pub outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variables: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub priorities: Vec<Priority>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub repushed: Vec<Priority>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conflict: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abstraction: Option<AbstractionInfo>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conjectures: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<Step>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
    /// The input model with the synthesized priorities added.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_model: Option<String>,
}

fn pair(p: &Priority) -> String {
    match p.side {
        Some(side) => format!("{side} {} < {}", p.low, p.high),
        None => format!("{} < {}", p.low, p.high),
    }
}

impl Report {
    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `key: value` lines; when a model is emitted they become `#` comments
    /// above it so the whole output parses as a model.
    pub fn text(&self) -> String {
        let mut lines = vec![
            format!("command: {}", self.command),
            format!("model: {}", self.model),
            format!("outcome: {}", self.outcome),
        ];
        if let Some(d) = &self.detail {
            lines.push(format!("detail: {d}"));
        }
        if let Some(e) = self.engine {
            lines.push(format!("engine: {e}"));
        }
        if let Some(v) = self.variables {
            lines.push(format!("variables: {v}"));
        }
        if let Some(a) = &self.abstraction {
            lines.push(format!("kept: {}", a.kept.join(",")));
            lines.push(format!("eliminated: {}", a.eliminated.join(",")));
            lines.push(format!("abstract alphabet: {}", a.abstract_alphabet));
            lines.push(format!("abstracted interactions: {}", a.abstracted));
        }
        if !self.conjectures.is_empty() {
            let sizes: Vec<String> = self.conjectures.iter().map(|n| n.to_string()).collect();
            lines.push(format!("conjecture sizes: {}", sizes.join(" ")));
        }
        for p in &self.priorities {
            lines.push(format!("priority: {}", pair(p)));
        }
        for p in &self.repushed {
            lines.push(format!("repushed: {}", pair(p)));
        }
        for c in &self.conflict {
            lines.push(format!("conflict: {c}"));
        }
        if let Some(v) = &self.verification {
            lines.push(format!("verification: {v}"));
        }
        if !self.trace.is_empty() {
            lines.push("trace:".to_string());
            for s in &self.trace {
                match &s.configuration {
                    Some(c) => lines.push(format!("  {}  ->  {c}", s.interaction)),
                    None => lines.push(format!("  {}", s.interaction)),
                }
            }
        }
        if let Some(st) = &self.stats {
            for (k, r) in st.rounds.iter().enumerate() {
                lines.push(format!(
                    "round {k}: variables {} attractor iterations {} attractor nodes {} \
                     reachable nodes {} cubes {} sat variables {} sat clauses {} millis {}",
                    r.variables,
                    r.attractor_iterations,
                    r.attractor_nodes,
                    r.reachable_nodes,
                    r.cubes,
                    r.sat_variables,
                    r.sat_clauses,
                    r.millis
                ));
            }
            if let Some(e) = &st.encoding {
                lines.push(format!("variable order: {}", e.order.join(" ")));
                for (name, n) in &e.nodes {
                    lines.push(format!("nodes {name}: {n}"));
                }
            }
            lines.push(format!("millis: {}", st.millis));
        }
        let mut out = String::new();
        match &self.output_model {
            Some(m) => {
                for l in lines {
                    let _ = writeln!(out, "# {l}");
                }
                out.push_str(m);
            }
            None => {
                for l in lines {
                    let _ = writeln!(out, "{l}");
                }
            }
        }
        out
    }
}
