//! Inverted index with tf-idf cosine ranking and JSON persistence.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::OnceLock;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::html::Document;
use crate::text::{Analyzer, Query};

pub const FORMAT_VERSION: &str = "snipforge-index/1";

/// Default number of results kept per query.
pub const DEFAULT_MU: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DocMeta {
    pub url: Option<String>,
    pub fetch_date: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocEntry {
    pub id: String,
    pub meta: DocMeta,
    /// Total number of indexed tokens in the document.
    pub length: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    /// Position of the document in the doc table.
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub id: String,
    pub score: f64,
}

/// Ranked retrieval output: at most `mu` items, scores non-increasing, ties by id.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultList {
    pub items: Vec<ScoredDoc>,
    pub mu: usize,
}

impl ResultList {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }
}

#[derive(Debug, Clone)]
pub struct InvertedIndex {
    analyzer: Analyzer,
    docs: Vec<DocEntry>,
    by_id: HashMap<String, u32>,
    postings: BTreeMap<String, Vec<Posting>>,
    norms: OnceLock<Vec<f64>>,
}

impl PartialEq for InvertedIndex {
    fn eq(&self, other: &Self) -> bool {
        self.analyzer == other.analyzer
            && self.docs == other.docs
            && self.postings == other.postings
    }
}

impl InvertedIndex {
    pub fn new(analyzer: Analyzer) -> Self {
        Self {
            analyzer,
            docs: Vec::new(),
            by_id: HashMap::new(),
            postings: BTreeMap::new(),
            norms: OnceLock::new(),
        }
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn docs(&self) -> &[DocEntry] {
        &self.docs
    }

    pub fn doc(&self, id: &str) -> Option<&DocEntry> {
        self.by_id.get(id).map(|&i| &self.docs[i as usize])
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &[Posting])> {
        self.postings
            .iter()
            .map(|(t, p)| (t.as_str(), p.as_slice()))
    }

    pub fn add_document(&mut self, doc: &Document) -> Result<()> {
        let meta = DocMeta {
            url: doc.url.clone(),
            fetch_date: doc.fetch_date,
        };
        self.add_text(&doc.id, &doc.visible_text, meta)
    }

    pub fn add_text(&mut self, id: &str, text: &str, meta: DocMeta) -> Result<()> {
        if self.by_id.contains_key(id) {
            return Err(Error::DuplicateDocument(id.to_string()));
        }
        let ordinal = u32::try_from(self.docs.len()).expect("more than u32::MAX documents");
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for tok in self.analyzer.tokens(text) {
            *counts.entry(tok.into_string()).or_default() += 1;
        }
        let length = counts.values().sum();
        for (term, tf) in counts {
            // ordinals only grow, so pushing keeps each list sorted
            self.postings
                .entry(term)
                .or_default()
                .push(Posting { doc: ordinal, tf });
        }
        self.by_id.insert(id.to_string(), ordinal);
        self.docs.push(DocEntry {
            id: id.to_string(),
            meta,
            length,
        });
        self.norms = OnceLock::new();
        Ok(())
    }

    fn idf(&self, df: usize) -> f64 {
        (1.0 + self.docs.len() as f64 / df as f64).ln()
    }

    /// Euclidean norm of every document's tf-idf vector, summed in term order.
    fn norms(&self) -> &[f64] {
        self.norms.get_or_init(|| {
            let mut sq = vec![0.0f64; self.docs.len()];
            for list in self.postings.values() {
                let idf = self.idf(list.len());
                for p in list {
                    let w = p.tf as f64 * idf;
                    sq[p.doc as usize] += w * w;
                }
            }
            sq.into_iter().map(f64::sqrt).collect()
        })
    }

    /// Scores every document sharing a term with `query` by tf-idf cosine
    /// similarity and keeps the best `mu`.
    pub fn retrieve(&self, query: &Query, mu: usize) -> Result<ResultList> {
        if query.is_empty() {
            return Err(Error::EmptyQuery(query.raw.clone()));
        }
        let mu = mu.max(1);
        if self.docs.is_empty() {
            return Ok(ResultList {
                items: Vec::new(),
                mu,
            });
        }
        let norms = self.norms();
        let mut dots: BTreeMap<u32, f64> = BTreeMap::new();
        let mut query_sq = 0.0;
        for term in &query.terms {
            let list = self.postings(term.as_str());
            if list.is_empty() {
                continue;
            }
            let idf = self.idf(list.len());
            query_sq += idf * idf;
            for p in list {
                *dots.entry(p.doc).or_default() += idf * (p.tf as f64 * idf);
            }
        }
        let query_norm = query_sq.sqrt();
        let mut items: Vec<ScoredDoc> = dots
            .into_iter()
            .filter_map(|(doc, dot)| {
                let denom = query_norm * norms[doc as usize];
                let score = quantize(dot / denom);
                (denom > 0.0 && score > 0.0).then(|| ScoredDoc {
                    id: self.docs[doc as usize].id.clone(),
                    score,
                })
            })
            .collect();
        rank_scored(&mut items);
        items.truncate(mu);
        Ok(ResultList { items, mu })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec(&self.to_file())?;
        bytes.push(b'\n');
        crate::fsutil::write_atomic(path, &bytes)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let value: Value =
            serde_json::from_slice(bytes).map_err(|e| malformed("document", e.to_string()))?;
        let Value::Object(mut top) = value else {
            return Err(malformed("document", "top level is not an object".into()));
        };
        if let Some(key) = top
            .keys()
            .find(|k| !matches!(k.as_str(), "meta" | "docs" | "postings"))
        {
            return Err(malformed("document", format!("unexpected key `{key}`")));
        }
        let meta: MetaRecord = section(&mut top, "meta")?;
        if meta.format_version != FORMAT_VERSION {
            return Err(Error::IndexVersion {
                found: meta.format_version,
                expected: FORMAT_VERSION,
            });
        }
        let docs: Vec<DocRecord> = section(&mut top, "docs")?;
        let postings: BTreeMap<String, Vec<(u32, u32)>> = section(&mut top, "postings")?;

        let analyzer = Analyzer::new(meta.stopwords.into_iter().collect(), meta.stemming);
        let mut index = InvertedIndex::new(analyzer);
        for d in docs {
            if index.by_id.contains_key(&d.id) {
                return Err(malformed("docs", format!("duplicate id `{}`", d.id)));
            }
            index.by_id.insert(d.id.clone(), index.docs.len() as u32);
            index.docs.push(DocEntry {
                id: d.id,
                meta: DocMeta {
                    url: d.url,
                    fetch_date: d.fetch_date,
                },
                length: d.length,
            });
        }
        let mut lengths = vec![0u32; index.docs.len()];
        for (term, list) in postings {
            if term.is_empty()
                || term
                    .chars()
                    .any(|c| !c.is_alphanumeric() || c.is_uppercase())
            {
                return Err(malformed(
                    "postings",
                    format!("`{term}` is not a normalized term"),
                ));
            }
            let mut out = Vec::with_capacity(list.len());
            for (doc, tf) in list {
                if doc as usize >= index.docs.len() {
                    return Err(malformed(
                        "postings",
                        format!("`{term}` references doc {doc}"),
                    ));
                }
                if tf == 0 {
                    return Err(malformed("postings", format!("`{term}` has zero tf")));
                }
                if out.last().is_some_and(|p: &Posting| p.doc >= doc) {
                    return Err(malformed(
                        "postings",
                        format!("`{term}` list is not sorted"),
                    ));
                }
                lengths[doc as usize] += tf;
                out.push(Posting { doc, tf });
            }
            if out.is_empty() {
                return Err(malformed("postings", format!("`{term}` has an empty list")));
            }
            index.postings.insert(term, out);
        }
        if let Some(d) = index
            .docs
            .iter()
            .zip(&lengths)
            .find(|(d, &n)| d.length != n)
        {
            return Err(malformed(
                "docs",
                format!("length of `{}` disagrees with postings", d.0.id),
            ));
        }
        Ok(index)
    }

    fn to_file(&self) -> IndexFile {
        IndexFile {
            meta: MetaRecord {
                format_version: FORMAT_VERSION.to_string(),
                stopwords: self.analyzer.stopwords().iter().cloned().collect(),
                stemming: self.analyzer.stemming(),
            },
            docs: self
                .docs
                .iter()
                .map(|d| DocRecord {
                    id: d.id.clone(),
                    url: d.meta.url.clone(),
                    fetch_date: d.meta.fetch_date,
                    length: d.length,
                })
                .collect(),
            postings: self
                .postings
                .iter()
                .map(|(t, l)| (t.clone(), l.iter().map(|p| (p.doc, p.tf)).collect()))
                .collect(),
        }
    }
}

/// Descending score, ascending id on ties.
pub(crate) fn rank_scored(items: &mut [ScoredDoc]) {
    items.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
}

/// Rounds to 12 decimal places so that mathematically equal scores computed
/// along different summation orders compare equal.
pub(crate) fn quantize(score: f64) -> f64 {
    (score * 1e12).round() / 1e12
}

fn malformed(section: &'static str, reason: String) -> Error {
    Error::MalformedIndex { section, reason }
}

fn section<T: serde::de::DeserializeOwned>(
    top: &mut serde_json::Map<String, Value>,
    name: &'static str,
) -> Result<T> {
    let value = top
        .remove(name)
        .ok_or_else(|| malformed(name, "missing".into()))?;
    serde_json::from_value(value).map_err(|e| malformed(name, e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    meta: MetaRecord,
    docs: Vec<DocRecord>,
    postings: BTreeMap<String, Vec<(u32, u32)>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaRecord {
    format_version: String,
    stopwords: Vec<String>,
    stemming: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocRecord {
    id: String,
    url: Option<String>,
    fetch_date: Option<NaiveDate>,
    length: u32,
}
