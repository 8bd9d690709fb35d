//! Corpus loading, the on-disk workspace, and the search engine that ties
//! retrieval, segmentation, scoring and snippets together.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::AppConfig;
use crate::error::{Error, Result};
use crate::html::Document;
use crate::index::{DocMeta, InvertedIndex};
use crate::score::{score_page, PageContext, SegmentScore};
use crate::segment::{segment, Segment};
use crate::snippet::{build_semantic_snippet, build_simple_snippet, Snippet, SnippetMode};
use crate::text::{Analyzer, Query};

/// Sidecar `<stem>.meta` contents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetaFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fetch_date: Option<NaiveDate>,
}

impl From<MetaFile> for DocMeta {
    fn from(m: MetaFile) -> Self {
        DocMeta {
            url: m.url,
            fetch_date: m.fetch_date,
        }
    }
}

fn html_files(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "html") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                files.push((stem.to_string(), path.clone()));
            }
        }
    }
    files.sort();
    Ok(files)
}

fn read_meta(html_path: &Path) -> Result<MetaFile> {
    let meta_path = html_path.with_extension("meta");
    if !meta_path.exists() {
        return Ok(MetaFile::default());
    }
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Corpus(format!("{}: {e}", meta_path.display())))
}

/// Reads every `*.html` in `dir` (ids are file stems) with optional `.meta` sidecars.
pub fn read_corpus_dir(dir: &Path) -> Result<Vec<Document>> {
    html_files(dir)?
        .into_iter()
        .map(|(id, path)| {
            let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            Ok(Document::from_html(id, raw, read_meta(&path)?.into()))
        })
        .collect()
}

/// A data directory holding ingested pages and the saved index.
#[derive(Debug, Clone)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn pages_dir(&self) -> PathBuf {
        self.root.join("pages")
    }

    pub fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }

    /// Copies the corpus at `src` into the workspace, replacing earlier pages.
    /// Sidecars are validated before anything is copied.
    pub fn ingest(&self, src: &Path) -> Result<usize> {
        let files = html_files(src)?;
        let metas = files
            .iter()
            .map(|(_, p)| read_meta(p))
            .collect::<Result<Vec<_>>>()?;
        let pages = self.pages_dir();
        if pages.exists() {
            fs::remove_dir_all(&pages).map_err(|e| Error::io(&pages, e))?;
        }
        fs::create_dir_all(&pages).map_err(|e| Error::io(&pages, e))?;
        for ((id, path), meta) in files.iter().zip(metas) {
            let dest = pages.join(format!("{id}.html"));
            fs::copy(path, &dest).map_err(|e| Error::io(&dest, e))?;
            if meta != MetaFile::default() {
                let dest = pages.join(format!("{id}.meta"));
                let json = serde_json::to_string(&meta)?;
                fs::write(&dest, json + "\n").map_err(|e| Error::io(&dest, e))?;
            }
        }
        Ok(files.len())
    }

    pub fn documents(&self) -> Result<Vec<Document>> {
        let pages = self.pages_dir();
        if !pages.is_dir() {
            return Err(Error::NotIngested(self.root.clone()));
        }
        read_corpus_dir(&pages)
    }

    pub fn build_index(&self, cfg: &AppConfig) -> Result<InvertedIndex> {
        let index = build_index(cfg.analyzer()?, &self.documents()?)?;
        index.save(&self.index_path())?;
        Ok(index)
    }

    pub fn open_engine(&self, cfg: &AppConfig) -> Result<Engine> {
        let path = self.index_path();
        if !path.exists() {
            return Err(Error::MissingIndex(path));
        }
        let index = InvertedIndex::load(&path)?;
        Ok(Engine::new(cfg.clone(), index, self.documents()?))
    }
}

pub fn build_index(analyzer: Analyzer, docs: &[Document]) -> Result<InvertedIndex> {
    let mut index = InvertedIndex::new(analyzer);
    for doc in docs {
        index.add_document(doc)?;
    }
    Ok(index)
}

/// Segments of one page with their scores.
#[derive(Debug, Clone)]
pub struct PageAnalysis {
    pub segments: Vec<Segment>,
    pub scores: Vec<SegmentScore>,
    pub context: PageContext,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchHit {
    pub doc_id: String,
    pub score: f64,
    pub snippet: Snippet,
}

/// A loaded index plus the pages it was built from. Immutable once built.
#[derive(Debug)]
pub struct Engine {
    cfg: AppConfig,
    index: InvertedIndex,
    analyzer: Arc<Analyzer>,
    docs: BTreeMap<String, Document>,
}

impl Engine {
    /// Query-time tokenization follows the index, not `cfg`.
    pub fn new(cfg: AppConfig, index: InvertedIndex, docs: Vec<Document>) -> Self {
        let analyzer = Arc::new(index.analyzer().clone());
        let docs = docs.into_iter().map(|d| (d.id.clone(), d)).collect();
        Self {
            cfg,
            index,
            analyzer,
            docs,
        }
    }

    pub fn from_documents(cfg: AppConfig, docs: Vec<Document>) -> Result<Self> {
        let index = build_index(cfg.analyzer()?, &docs)?;
        Ok(Self::new(cfg, index, docs))
    }

    pub fn config(&self) -> &AppConfig {
        &self.cfg
    }

    pub fn index(&self) -> &InvertedIndex {
        &self.index
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn document(&self, id: &str) -> Result<&Document> {
        self.docs
            .get(id)
            .ok_or_else(|| Error::UnknownDocument(id.to_string()))
    }

    pub fn query(&self, raw: &str) -> Query {
        self.analyzer.query(raw)
    }

    pub fn analyze(&self, doc: &Document) -> PageAnalysis {
        let segments = segment(doc, &self.cfg.segmenter_config());
        let context = PageContext::new(doc, &segments, Arc::clone(&self.analyzer));
        let scores = score_page(&segments, &context, &self.cfg.scorer_config(&self.analyzer));
        PageAnalysis {
            segments,
            scores,
            context,
        }
    }

    pub fn build_snippet(&self, page: &PageAnalysis, query: &Query, mode: SnippetMode) -> Snippet {
        let cfg = self.cfg.snippet_config();
        match mode {
            SnippetMode::Semantic => {
                build_semantic_snippet(&page.segments, &page.scores, query, &self.analyzer, &cfg)
            }
            SnippetMode::Simple => {
                build_simple_snippet(&page.segments, query, &self.analyzer, &cfg)
            }
        }
    }

    /// Top-`mu` documents for `raw`, each with a snippet in `mode`.
    pub fn search(&self, raw: &str, mode: SnippetMode) -> Result<Vec<SearchHit>> {
        let query = self.query(raw);
        let results = self.index.retrieve(&query, self.cfg.mu)?;
        results
            .items
            .par_iter()
            .map(|item| {
                let page = self.analyze(self.document(&item.id)?);
                Ok(SearchHit {
                    doc_id: item.id.clone(),
                    score: item.score,
                    snippet: self.build_snippet(&page, &query, mode),
                })
            })
            .collect()
    }

    pub fn snippet(&self, doc_id: &str, raw: &str, mode: SnippetMode) -> Result<Snippet> {
        let query = self.query(raw);
        if query.is_empty() {
            return Err(Error::EmptyQuery(raw.to_string()));
        }
        let page = self.analyze(self.document(doc_id)?);
        Ok(self.build_snippet(&page, &query, mode))
    }
}
