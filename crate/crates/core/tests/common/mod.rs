#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use proptest::prelude::*;
use snipforge_core::pipeline::read_corpus_dir;
use snipforge_core::text::{char_slice, normalize_whitespace};
use snipforge_core::{Document, Segment, Snippet};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture_page(name: &str) -> Document {
    read_corpus_dir(&fixtures().join("pages"))
        .unwrap()
        .into_iter()
        .find(|d| d.id == name)
        .unwrap_or_else(|| panic!("no fixture page {name}"))
}

pub fn fixture_pages() -> Vec<Document> {
    read_corpus_dir(&fixtures().join("pages")).unwrap()
}

pub fn fixture_corpus() -> Vec<Document> {
    read_corpus_dir(&fixtures().join("corpus")).unwrap()
}

pub fn golden(name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(fixtures().join("golden").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Lowercased alphanumeric runs minus stopwords, written independently of the library.
pub fn oracle_tokens(text: &str, stopwords: &BTreeSet<String>) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() {
            cur.push(c);
        } else if !cur.is_empty() {
            let w = cur.to_lowercase();
            if !stopwords.contains(&w) {
                out.push(w);
            }
            cur.clear();
        }
    }
    out
}

/// Dense tf-idf cosine over every document; returns ids ordered by score
/// (rounded to 12 decimals) descending, then id.
pub fn oracle_rank(
    docs: &[(String, String)],
    query: &str,
    stopwords: &BTreeSet<String>,
    mu: usize,
) -> Vec<(String, f64)> {
    let tokenized: Vec<Vec<String>> = docs
        .iter()
        .map(|(_, t)| oracle_tokens(t, stopwords))
        .collect();
    let vocab: BTreeSet<&String> = tokenized.iter().flatten().collect();
    let vocab: Vec<&String> = vocab.into_iter().collect();
    let n = docs.len() as f64;
    let idf: Vec<f64> = vocab
        .iter()
        .map(|t| {
            let df = tokenized.iter().filter(|d| d.contains(t)).count() as f64;
            (1.0 + n / df).ln()
        })
        .collect();
    let mut qterms: Vec<String> = Vec::new();
    for t in oracle_tokens(query, stopwords) {
        if !qterms.contains(&t) {
            qterms.push(t);
        }
    }
    let qvec: Vec<f64> = vocab
        .iter()
        .zip(&idf)
        .map(|(t, w)| if qterms.contains(t) { *w } else { 0.0 })
        .collect();
    let qnorm = qvec.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut scored: Vec<(String, f64)> = Vec::new();
    for ((id, _), toks) in docs.iter().zip(&tokenized) {
        let dvec: Vec<f64> = vocab
            .iter()
            .zip(&idf)
            .map(|(t, w)| toks.iter().filter(|x| x == t).count() as f64 * w)
            .collect();
        let dnorm = dvec.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = qvec.iter().zip(&dvec).map(|(a, b)| a * b).sum();
        if qnorm == 0.0 || dnorm == 0.0 {
            continue;
        }
        let score = ((dot / (qnorm * dnorm)) * 1e12).round() / 1e12;
        if score > 0.0 {
            scored.push((id.clone(), score));
        }
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    scored.truncate(mu);
    scored
}

pub fn term_frequencies(tokens: &[String]) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    for t in tokens {
        *m.entry(t.clone()).or_insert(0.0) += 1.0;
    }
    m
}

pub fn cosine(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let dot: f64 = a
        .iter()
        .map(|(k, x)| x * b.get(k).copied().unwrap_or(0.0))
        .sum();
    let na: f64 = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

const WORDS: &[&str] = &[
    "solar",
    "battery",
    "snippet",
    "segment",
    "page",
    "home",
    "news",
    "the",
    "of",
    "Über",
    "naïve",
    "2011-03-15",
    "March 3, 2010",
    "x",
    "lorem",
    "ipsum",
    "&amp;",
    "&lt;b&gt;",
    "  ",
    "\n\t",
];

fn text_strategy() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 0..8).prop_map(|ws| ws.join(" "))
}

/// Random, frequently malformed HTML built from block, inline, hidden and
/// void elements.
pub fn html_strategy() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        4 => text_strategy(),
        1 => Just("<hr>".to_string()),
        1 => text_strategy().prop_map(|t| format!("<img alt=\"{t}\">")),
        1 => Just("<img>".to_string()),
        1 => text_strategy().prop_map(|t| format!("<script>{t}</script>")),
        1 => text_strategy().prop_map(|t| format!("<!-- {t} -->")),
        1 => text_strategy().prop_map(|t| format!("<p>{t}")),
    ];
    leaf.prop_recursive(4, 48, 6, |inner| {
        let tags = prop::sample::select(
            &[
                "div", "section", "article", "nav", "footer", "aside", "ul", "li", "p", "h1", "h2",
                "h3", "a", "span", "b", "table", "td", "figure", "header", "main",
            ][..],
        );
        (tags, prop::collection::vec(inner, 0..6), any::<bool>()).prop_map(|(tag, kids, close)| {
            let body = kids.concat();
            if close {
                format!("<{tag}>{body}</{tag}>")
            } else {
                format!("<{tag}>{body}")
            }
        })
    })
}

/// Random pages with enough text to be split into several segments.
pub fn page_strategy() -> impl Strategy<Value = String> {
    let para =
        prop::collection::vec(prop::sample::select(WORDS), 5..40).prop_map(|ws| ws.join(" "));
    let block = (
        prop::sample::select(
            &[
                "div", "nav", "article", "footer", "section", "p", "h2", "ul",
            ][..],
        ),
        prop::collection::vec(para, 1..4),
        any::<bool>(),
    )
        .prop_map(|(tag, paras, linked)| {
            let inner: String = paras
                .iter()
                .map(|p| {
                    if linked {
                        format!("<li><a href=#>{p}</a></li>")
                    } else {
                        format!("<p>{p}</p>")
                    }
                })
                .collect();
            format!("<{tag}>{inner}</{tag}>")
        });
    prop::collection::vec(
        prop_oneof![8 => block, 1 => Just("<hr>".to_string())],
        1..10,
    )
    .prop_map(|blocks| {
        format!(
            "<html><head><title>solar snippet page</title></head><body>{}</body></html>",
            blocks.concat()
        )
    })
}

/// Coverage, disjointness and ordering checks shared by fixtures and fuzzing.
pub fn check_segments(doc: &Document, segments: &[Segment]) -> Result<(), String> {
    let joined = segments
        .iter()
        .filter(|s| !s.text.is_empty())
        .map(|s| s.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    if normalize_whitespace(&joined) != normalize_whitespace(&doc.visible_text) {
        return Err(format!("coverage: {joined:?} vs {:?}", doc.visible_text));
    }
    let total = doc.visible_text.chars().count();
    let mut last_end = 0usize;
    for (i, s) in segments.iter().enumerate() {
        if s.ordinal != i {
            return Err(format!("ordinal {} at position {i}", s.ordinal));
        }
        if s.text.is_empty() {
            if s.images.is_empty() {
                return Err("empty segment without images".into());
            }
            if s.span.start != s.span.end {
                return Err("image-only segment with non-empty span".into());
            }
        } else {
            if s.span.start >= s.span.end {
                return Err(format!("empty span on text segment {i}"));
            }
            let slice: String = doc
                .visible_text
                .chars()
                .skip(s.span.start)
                .take(s.span.len())
                .collect();
            if slice != s.text {
                return Err(format!("segment {i} text differs from its span"));
            }
        }
        if s.span.start < last_end || s.span.end > total {
            return Err(format!("segment {i} overlaps or overruns"));
        }
        if s.anchor_chars > s.text.chars().count() {
            return Err(format!("segment {i} anchor count exceeds text"));
        }
        last_end = s.span.end;
    }
    Ok(())
}

/// Every fragment is a verbatim slice of its segment and appears in the output.
pub fn check_provenance(snip: &Snippet, segments: &[Segment]) -> Result<(), String> {
    let mut cursor = 0;
    for f in &snip.fragments {
        let seg = segments
            .get(f.segment)
            .ok_or("fragment from unknown segment")?;
        if char_slice(&seg.text, f.start, f.end) != f.text || f.text.is_empty() {
            return Err(format!(
                "fragment {f:?} is not a slice of segment {}",
                f.segment
            ));
        }
        let at = snip.rendered[cursor..]
            .find(&f.text)
            .ok_or("fragment missing from rendered text")?;
        cursor += at + f.text.len();
    }
    Ok(())
}
