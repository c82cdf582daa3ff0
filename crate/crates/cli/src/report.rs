//! Verification reports: a serde-friendly mirror of a verdict plus its
//! human rendering. Every field printed in the text form is in the JSON.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use germ_core::evi::{Outcome, Verdict, Verifier};

use crate::render::{sym_memory_lines, Palette};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionRecord {
    pub assertion: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub obligation: String,
    pub condition: String,
    pub matched: String,
    pub status: String,
    pub reverted: bool,
    pub assertions: Vec<AssertionRecord>,
    pub failed_assertion: Option<String>,
    /// Symbol name and value, in declaration order.
    pub witness: Option<Vec<(String, String)>>,
    pub reason: Option<String>,
    pub diagnostics: Vec<String>,
    pub memory: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub spec: String,
    pub verdict: String,
    pub paths: Vec<PathRecord>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(spec: &str, v: &Verifier, verdict: &Verdict, elapsed_ms: u64) -> Self {
        let paths = verdict
            .paths
            .iter()
            .map(|p| {
                let (failed_assertion, witness, reason) = match &p.outcome {
                    Outcome::Pass => (None, None, None),
                    Outcome::Fail { assertion, witness } => (
                        Some(assertion.clone()),
                        Some(witness.iter().map(|(n, l)| (n.clone(), l.to_string())).collect()),
                        None,
                    ),
                    Outcome::Undecided(r) => (None, None, Some(r.clone())),
                };
                PathRecord {
                    obligation: p.obligation.to_string(),
                    condition: p.condition_text.clone(),
                    matched: p.matched_text.clone(),
                    status: p.status().to_string(),
                    reverted: p.reverted,
                    assertions: p
                        .assertions
                        .iter()
                        .map(|a| AssertionRecord {
                            assertion: a.assertion.clone(),
                            holds: a.holds,
                        })
                        .collect(),
                    failed_assertion,
                    witness,
                    reason,
                    diagnostics: p.diagnostics.iter().map(ToString::to_string).collect(),
                    memory: sym_memory_lines(&p.memory, &v.table, &verdict.symbols),
                }
            })
            .collect();
        Self {
            spec: spec.to_string(),
            verdict: verdict.status().to_string(),
            paths,
            elapsed_ms,
        }
    }

    pub fn render(&self, palette: Palette, show_memory: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "spec: {}", self.spec);
        let n = self.paths.len();
        for (i, p) in self.paths.iter().enumerate() {
            let _ = writeln!(
                out,
                "path {}/{} [{}] {} -> {}: {}{}",
                i + 1,
                n,
                p.obligation,
                p.condition,
                p.matched,
                palette.status(&p.status),
                if p.reverted { " (reverted)" } else { "" }
            );
            for a in &p.assertions {
                let _ = writeln!(out, "    [{}] {}", if a.holds { "ok" } else { "!!" }, a.assertion);
            }
            if let Some(a) = &p.failed_assertion {
                let _ = writeln!(out, "    failed: {a}");
            }
            if let Some(w) = &p.witness {
                let parts: Vec<String> = w.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(out, "    witness: {}", parts.join(" "));
            }
            if let Some(r) = &p.reason {
                let _ = writeln!(out, "    reason: {r}");
            }
            for d in &p.diagnostics {
                let _ = writeln!(out, "    event: {d}");
            }
            if show_memory {
                for line in &p.memory {
                    let _ = writeln!(out, "      {line}");
                }
            }
        }
        let _ = writeln!(
            out,
            "verdict: {} ({} path{}, {} ms)",
            palette.status(&self.verdict),
            n,
            if n == 1 { "" } else { "s" },
            self.elapsed_ms
        );
        out
    }
}
