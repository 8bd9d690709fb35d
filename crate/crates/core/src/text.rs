//! Tokenization shared by indexing, querying, snippet matching and judging.
//!
//! A token is a maximal run of Unicode letters or digits, lowercased. Every
//! other character separates tokens. Stopwords are dropped after folding and
//! stemming (when enabled) is applied last, so all consumers see the same
//! term space.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// A normalized term: lowercase, non-empty, free of whitespace and punctuation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Token(String);

impl Token {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Token {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// A token together with the character range it was read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub token: Token,
    /// Character offset of the first character.
    pub start: usize,
    /// Character offset one past the last character.
    pub end: usize,
}

/// Parses a stopword list: one word per line, `#` comments, blank lines ignored.
pub fn parse_stopwords(source: &str) -> BTreeSet<String> {
    source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// Lowercases and splits `text`, dropping anything in `stopwords`.
pub fn tokenize(text: &str, stopwords: &BTreeSet<String>) -> Vec<Token> {
    raw_words(text)
        .filter_map(|(word, _, _)| {
            let folded = word.to_lowercase();
            (!stopwords.contains(folded.as_str())).then_some(Token(folded))
        })
        .collect()
}

/// Yields `(word, char_start, char_end)` for each alphanumeric run.
fn raw_words(text: &str) -> impl Iterator<Item = (&str, usize, usize)> {
    let mut chars = text.char_indices().enumerate().peekable();
    std::iter::from_fn(move || {
        let (start_char, start_byte) = loop {
            let (ci, (bi, c)) = chars.next()?;
            if c.is_alphanumeric() {
                break (ci, bi);
            }
        };
        let mut end_char = start_char + 1;
        let mut end_byte = text.len();
        while let Some(&(ci, (bi, c))) = chars.peek() {
            if !c.is_alphanumeric() {
                end_byte = bi;
                break;
            }
            end_char = ci + 1;
            chars.next();
        }
        Some((&text[start_byte..end_byte], start_char, end_char))
    })
}

/// Tokenizer configuration: stopword set plus optional English stemming.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analyzer {
    stopwords: BTreeSet<String>,
    stemming: bool,
}

impl Default for Analyzer {
    fn default() -> Self {
        Self::new(default_stopwords(), false)
    }
}

impl Analyzer {
    pub fn new(stopwords: BTreeSet<String>, stemming: bool) -> Self {
        Self {
            stopwords,
            stemming,
        }
    }

    pub fn from_stopword_file(path: &Path, stemming: bool) -> Result<Self> {
        let source = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(parse_stopwords(&source), stemming))
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn stemming(&self) -> bool {
        self.stemming
    }

    pub fn tokens(&self, text: &str) -> Vec<Token> {
        self.occurrences(text)
            .into_iter()
            .map(|o| o.token)
            .collect()
    }

    pub fn occurrences(&self, text: &str) -> Vec<Occurrence> {
        let stemmer = self.stemming.then(|| Stemmer::create(Algorithm::English));
        raw_words(text)
            .filter_map(|(word, start, end)| {
                let folded = word.to_lowercase();
                if self.stopwords.contains(&folded) {
                    return None;
                }
                let term = match &stemmer {
                    Some(s) => s.stem(&folded).into_owned(),
                    None => folded,
                };
                Some(Occurrence {
                    token: Token(term),
                    start,
                    end,
                })
            })
            .collect()
    }

    /// Normalizes a single term (e.g. from a profile list). Returns `None` for
    /// stopwords and strings that do not tokenize to exactly one term.
    pub fn term(&self, word: &str) -> Option<Token> {
        let mut toks = self.tokens(word);
        (toks.len() == 1).then(|| toks.remove(0))
    }

    pub fn query(&self, raw: &str) -> Query {
        let mut terms: Vec<Token> = Vec::new();
        for tok in self.tokens(raw) {
            if !terms.contains(&tok) {
                terms.push(tok);
            }
        }
        Query {
            raw: raw.to_string(),
            terms,
        }
    }
}

/// A parsed user query. `terms` keeps first-occurrence order with duplicates removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub raw: String,
    pub terms: Vec<Token>,
}

impl Query {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Collapses whitespace runs to one space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// Substring by character offsets. Out-of-range bounds are clamped.
pub fn char_slice(text: &str, start: usize, end: usize) -> &str {
    let mut idx = text
        .char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(text.len()));
    let from = idx.nth(start).unwrap_or(text.len());
    let to = if end > start {
        idx.nth(end - start - 1).unwrap_or(text.len())
    } else {
        from
    };
    &text[from..to]
}
