//! Side-by-side evaluation of simple and semantic snippets.
//!
//! A snippet counts as judgeable when it shows the query terms and most of
//! its text comes from non-navigational segments. Sessions retrieve the top
//! results for a query, build both snippet kinds for each, and count the
//! judgeable ones.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::Engine;
use crate::score::SegmentScore;
use crate::snippet::{Snippet, SnippetMode};
use crate::text::{Analyzer, Query};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JudgeConfig {
    /// Fraction of query terms the rendered snippet must contain.
    pub term_coverage: f64,
    /// Fraction of fragment characters that must come from informative segments.
    pub provenance_share: f64,
    /// Link informativeness at or above which a segment is informative.
    pub min_link: f64,
}

impl Default for JudgeConfig {
    fn default() -> Self {
        Self {
            term_coverage: 1.0,
            provenance_share: 0.6,
            min_link: 0.5,
        }
    }
}

pub fn is_judgeable(
    snippet: &Snippet,
    query: &Query,
    analyzer: &Analyzer,
    scores: &[SegmentScore],
    cfg: &JudgeConfig,
) -> bool {
    if query.terms.is_empty() || snippet.fragments.is_empty() {
        return false;
    }
    let shown: BTreeSet<_> = analyzer.tokens(&snippet.rendered).into_iter().collect();
    let covered = query.terms.iter().filter(|t| shown.contains(*t)).count();
    if (covered as f64) < cfg.term_coverage * query.terms.len() as f64 {
        return false;
    }
    let mut total = 0usize;
    let mut informative = 0usize;
    for frag in &snippet.fragments {
        let n = frag.text.chars().count();
        total += n;
        if scores
            .get(frag.segment)
            .is_some_and(|s| s.l >= cfg.min_link)
        {
            informative += n;
        }
    }
    total > 0 && informative as f64 >= cfg.provenance_share * total as f64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSpec {
    pub id: String,
    pub query: String,
}

/// Parses a sessions file: a JSON array of `{"id": ..., "query": ...}`.
pub fn parse_sessions(json: &str) -> Result<Vec<SessionSpec>> {
    let specs: Vec<SessionSpec> =
        serde_json::from_str(json).map_err(|e| Error::Sessions(e.to_string()))?;
    let mut seen = BTreeSet::new();
    for s in &specs {
        if s.query.trim().is_empty() {
            return Err(Error::Sessions(format!(
                "session `{}` has an empty query",
                s.id
            )));
        }
        if !seen.insert(&s.id) {
            return Err(Error::Sessions(format!("duplicate session id `{}`", s.id)));
        }
    }
    if specs.is_empty() {
        return Err(Error::Sessions("no sessions".into()));
    }
    Ok(specs)
}

/// One audited result item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub session: String,
    pub query: String,
    pub rank: usize,
    pub doc_id: String,
    pub score: f64,
    pub simple: String,
    pub simple_judgeable: bool,
    pub semantic: String,
    pub semantic_judgeable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutcome {
    pub id: String,
    pub simple: usize,
    pub semantic: usize,
    pub items: Vec<ItemRecord>,
}

impl SessionOutcome {
    pub fn zero_results(&self) -> bool {
        self.items.is_empty()
    }
}

pub fn run_session(spec: &SessionSpec, engine: &Engine) -> Result<SessionOutcome> {
    let query = engine.query(&spec.query);
    let results = engine.index().retrieve(&query, engine.config().mu)?;
    let judge = engine.config().judge_config();
    let items = results
        .items
        .iter()
        .enumerate()
        .map(|(rank, hit)| {
            let page = engine.analyze(engine.document(&hit.id)?);
            let simple = engine.build_snippet(&page, &query, SnippetMode::Simple);
            let semantic = engine.build_snippet(&page, &query, SnippetMode::Semantic);
            let judged =
                |s: &Snippet| is_judgeable(s, &query, engine.analyzer(), &page.scores, &judge);
            Ok(ItemRecord {
                session: spec.id.clone(),
                query: spec.query.clone(),
                rank: rank + 1,
                doc_id: hit.id.clone(),
                score: hit.score,
                simple_judgeable: judged(&simple),
                semantic_judgeable: judged(&semantic),
                simple: simple.rendered,
                semantic: semantic.rendered,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SessionOutcome {
        id: spec.id.clone(),
        simple: items.iter().filter(|i| i.simple_judgeable).count(),
        semantic: items.iter().filter(|i| i.semantic_judgeable).count(),
        items,
    })
}

/// Runs sessions concurrently; outcomes keep the input order.
pub fn run_sessions(specs: &[SessionSpec], engine: &Engine) -> Result<Vec<SessionOutcome>> {
    specs.par_iter().map(|s| run_session(s, engine)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCounts {
    pub id: String,
    pub simple: usize,
    pub semantic: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeabilityReport {
    pub sessions: Vec<SessionCounts>,
    pub zero_result_sessions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean_simple: f64,
    pub mean_semantic: f64,
    pub sessions: usize,
    pub zero_result_sessions: Vec<String>,
}

impl JudgeabilityReport {
    pub fn from_counts(counts: impl IntoIterator<Item = (String, usize, usize)>) -> Self {
        Self {
            sessions: counts
                .into_iter()
                .map(|(id, simple, semantic)| SessionCounts {
                    id,
                    simple,
                    semantic,
                })
                .collect(),
            zero_result_sessions: Vec::new(),
        }
    }

    pub fn from_outcomes(outcomes: &[SessionOutcome]) -> Self {
        let mut report = Self::from_counts(
            outcomes
                .iter()
                .map(|o| (o.id.clone(), o.simple, o.semantic)),
        );
        report.zero_result_sessions = outcomes
            .iter()
            .filter(|o| o.zero_results())
            .map(|o| o.id.clone())
            .collect();
        report
    }

    fn mean(&self, pick: impl Fn(&SessionCounts) -> usize) -> f64 {
        if self.sessions.is_empty() {
            return 0.0;
        }
        self.sessions.iter().map(pick).sum::<usize>() as f64 / self.sessions.len() as f64
    }

    pub fn mean_simple(&self) -> f64 {
        self.mean(|s| s.simple)
    }

    pub fn mean_semantic(&self) -> f64 {
        self.mean(|s| s.semantic)
    }

    pub fn summary(&self) -> Summary {
        Summary {
            mean_simple: self.mean_simple(),
            mean_semantic: self.mean_semantic(),
            sessions: self.sessions.len(),
            zero_result_sessions: self.zero_result_sessions.clone(),
        }
    }

    /// Sessions as columns, one row per snippet mode.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("session");
        for s in &self.sessions {
            write!(out, ",{}", csv_field(&s.id)).unwrap();
        }
        for (label, pick) in [("simple", 0), ("semantic", 1)] {
            out.push('\n');
            out.push_str(label);
            for s in &self.sessions {
                write!(out, ",{}", if pick == 0 { s.simple } else { s.semantic }).unwrap();
            }
        }
        out.push('\n');
        out
    }

    /// Inverse of [`to_csv`](Self::to_csv). Zero-result flags are not part of the table.
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Sessions(format!("table csv: {m}"));
        let rows: Vec<Vec<String>> = text.lines().map(split_csv_line).collect();
        let [header, simple, semantic] = rows.as_slice() else {
            return Err(bad(format!("expected 3 rows, found {}", rows.len())));
        };
        let labels = (header.first(), simple.first(), semantic.first());
        if labels
            != (
                Some(&"session".into()),
                Some(&"simple".into()),
                Some(&"semantic".into()),
            )
        {
            return Err(bad("unexpected row labels".into()));
        }
        if simple.len() != header.len() || semantic.len() != header.len() {
            return Err(bad("ragged rows".into()));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|e| bad(format!("`{s}`: {e}")));
        let mut sessions = Vec::new();
        for i in 1..header.len() {
            sessions.push(SessionCounts {
                id: header[i].clone(),
                simple: num(&simple[i])?,
                semantic: num(&semantic[i])?,
            });
        }
        Ok(Self {
            sessions,
            zero_result_sessions: Vec::new(),
        })
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

/// Writes `table1.csv`, `summary.json` and `items.jsonl` into `dir`. Either all
/// three files are replaced or none is.
pub fn emit_report(report: &JudgeabilityReport, items: &[ItemRecord], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut summary = serde_json::to_vec_pretty(&report.summary())?;
    summary.push(b'\n');
    let mut lines = Vec::new();
    for item in items {
        serde_json::to_writer(&mut lines, item)?;
        lines.push(b'\n');
    }
    crate::fsutil::write_all_atomic(&[
        (dir.join("table1.csv"), report.to_csv().into_bytes()),
        (dir.join("summary.json"), summary),
        (dir.join("items.jsonl"), lines),
    ])
}
