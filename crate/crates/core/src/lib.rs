//! Query-biased semantic snippets for search results.
//!
//! Pages are retrieved from an inverted index, split into blocks, each block
//! is weighted by six query-independent factors, and the snippet is cut from
//! query-term matches inside the heaviest blocks.

pub mod config;
pub mod error;
pub mod eval;
mod fsutil;
pub mod html;
pub mod index;
pub mod pipeline;
pub mod score;
pub mod segment;
pub mod snippet;
pub mod synth;
pub mod text;

pub use config::AppConfig;
pub use error::{Error, Result};
pub use eval::{JudgeabilityReport, SessionSpec};
pub use html::Document;
pub use index::{DocMeta, InvertedIndex, ResultList, ScoredDoc};
pub use pipeline::{Engine, Workspace};
pub use score::{PageContext, ScorerConfig, SegmentScore};
pub use segment::{Segment, SegmenterConfig};
pub use snippet::{Snippet, SnippetConfig, SnippetMode};
pub use text::{Analyzer, Query, Token};
