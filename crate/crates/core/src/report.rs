//! Machine-readable and text reports of a run.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::float::FloatValue;
use crate::pipeline::{SolveResult, Status};

/// A float as shortest decimal and exact bit pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloatText {
    pub dec: String,
    pub hex: String,
}

impl From<&FloatValue> for FloatText {
    fn from(v: &FloatValue) -> FloatText {
        FloatText { dec: v.to_shortest_decimal(), hex: v.to_hex() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportStats {
    pub nodes: u64,
    pub propagations: u64,
    pub time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, FloatText>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<FloatText>,
    pub verified: bool,
    pub strategy: String,
    pub stats: ReportStats,
    pub path: Vec<String>,
    /// SHA-256 of the program text.
    pub digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub fn digest(src: &str) -> String {
    Sha256::digest(src.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl RunReport {
    pub fn from_result(r: &SolveResult, src: &str) -> RunReport {
        let witness = match &r.status {
            Status::Sat(w) => Some(w.iter().map(|(n, v)| (n.clone(), FloatText::from(v))).collect()),
            _ => None,
        };
        let reason = match &r.status {
            Status::Unknown(reason) => Some(reason.clone()),
            _ => None,
        };
        RunReport {
            status: r.status.name().to_string(),
            witness,
            target: r.target.as_ref().map(FloatText::from),
            verified: r.verified,
            strategy: r.strategy.name().to_string(),
            stats: ReportStats { nodes: r.stats.nodes, propagations: r.stats.propagations, time_ms: r.stats.time_ms },
            path: r.path.clone(),
            digest: digest(src),
            reason,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<RunReport, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "status:   {}", self.status);
        if let Some(reason) = &self.reason {
            let _ = writeln!(out, "reason:   {reason}");
        }
        if let Some(w) = &self.witness {
            for (name, v) in w {
                let _ = writeln!(out, "  {name} = {} ({})", v.dec, v.hex);
            }
        }
        if let Some(t) = &self.target {
            let _ = writeln!(out, "target:   {} ({})", t.dec, t.hex);
        }
        if self.witness.is_some() {
            let _ = writeln!(out, "verified: {}", self.verified);
            let _ =
                writeln!(out, "path:     {}", if self.path.is_empty() { "-".to_string() } else { self.path.join(" ") });
        }
        let _ = writeln!(
            out,
            "strategy: {}, {} nodes, {} propagations, {:.1} ms",
            self.strategy, self.stats.nodes, self.stats.propagations, self.stats.time_ms
        );
        out
    }
}
