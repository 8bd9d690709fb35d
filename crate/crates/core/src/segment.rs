//! Block segmentation of a page by DOM heuristics.
//!
//! Splitting starts at `<body>` and recurses into container elements. A node
//! is kept whole when its visible text is shorter than `min_split_chars` or it
//! has no block children. Inside a node being split, consecutive inline and
//! paragraph-level children accumulate into one run; a container child closes
//! the run and is split on its own, a heading closes the run and starts a new
//! one, and `<hr>` closes the run as a hard separator. Finally, text segments
//! shorter than `merge_below_chars` are merged into the following segment
//! unless a hard separator lies between them.

use std::sync::LazyLock;

use chrono::NaiveDate;
use ego_tree::NodeRef;
use regex::Regex;
use scraper::Node;
use serde::{Deserialize, Serialize};

use crate::html::{self, Atom, Document};

/// Elements that are split into their own segments.
const CONTAINERS: &[&str] = &[
    "div", "section", "article", "main", "table", "ul", "ol", "header", "footer", "nav", "aside",
    "figure", "form",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmenterConfig {
    pub min_split_chars: usize,
    pub merge_below_chars: usize,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            min_split_chars: 200,
            merge_below_chars: 40,
        }
    }
}

/// Half-open character range into a document's visible text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Image {
    pub alt: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub ordinal: usize,
    /// Location in the document's visible text. Image-only segments have an
    /// empty span positioned where they occur.
    pub span: Span,
    pub text: String,
    pub anchor_chars: usize,
    pub images: Vec<Image>,
    pub has_heading: bool,
    pub heading_depth: Option<u8>,
    pub dates: Vec<NaiveDate>,
}

impl Segment {
    pub fn char_len(&self) -> usize {
        self.span.len()
    }

    pub fn is_image_only(&self) -> bool {
        self.text.is_empty()
    }
}

/// Content gathered for one segment before ordinals and spans are assigned.
#[derive(Debug, Clone, Default)]
pub struct Block {
    atoms: Vec<Atom>,
    after_hard_break: bool,
}

impl Block {
    fn append(&mut self, other: Block) {
        self.atoms.push(Atom::Break);
        self.atoms.extend(other.atoms);
    }
}

fn tag(node: NodeRef<'_, Node>) -> Option<&str> {
    node.value().as_element().map(|e| e.name())
}

fn is_container(tag: &str) -> bool {
    CONTAINERS.contains(&tag)
}

fn has_block_children(node: NodeRef<'_, Node>) -> bool {
    node.children().filter_map(tag).any(|t| {
        !html::is_hidden(t) && (is_container(t) || t == "hr" || html::heading_level(t).is_some())
    })
}

struct Splitter<'a> {
    cfg: &'a SegmenterConfig,
    blocks: Vec<Block>,
    hard_break: bool,
}

impl Splitter<'_> {
    fn emit(&mut self, nodes: &[NodeRef<'_, Node>]) {
        if nodes.is_empty() {
            return;
        }
        let mut atoms = Vec::new();
        for &n in nodes {
            html::collect_atoms(n, &mut atoms);
        }
        let has_content = atoms.iter().any(|a| match a {
            Atom::Text { text, .. } => text.chars().any(|c| !c.is_whitespace()),
            Atom::Image { .. } => true,
            _ => false,
        });
        if has_content {
            self.blocks.push(Block {
                atoms,
                after_hard_break: self.hard_break,
            });
            self.hard_break = false;
        }
    }

    fn split<'t>(&mut self, node: NodeRef<'t, Node>) {
        let len = html::visible_text_of(node).chars().count();
        if len < self.cfg.min_split_chars || !has_block_children(node) {
            self.emit(&[node]);
            return;
        }
        let mut run: Vec<NodeRef<'t, Node>> = Vec::new();
        for child in node.children() {
            match tag(child) {
                Some(t) if html::is_hidden(t) => {}
                Some("hr") => {
                    self.emit(&run);
                    run.clear();
                    self.hard_break = true;
                }
                Some(t) if is_container(t) => {
                    self.emit(&run);
                    run.clear();
                    self.split(child);
                }
                Some(t) if html::heading_level(t).is_some() => {
                    self.emit(&run);
                    run.clear();
                    run.push(child);
                }
                _ => run.push(child),
            }
        }
        self.emit(&run);
    }
}

/// Raw blocks of a page in reading order, before merging.
pub fn split_blocks(raw_html: &[u8], cfg: &SegmenterConfig) -> Vec<Block> {
    let tree = html::parse_html(raw_html);
    let mut splitter = Splitter {
        cfg,
        blocks: Vec::new(),
        hard_break: false,
    };
    splitter.split(html::body(&tree));
    splitter.blocks
}

/// Merges short text blocks into their successor.
fn merge_short(blocks: Vec<Block>, cfg: &SegmenterConfig) -> Vec<Block> {
    let mut out: Vec<Block> = Vec::with_capacity(blocks.len());
    let mut carry: Option<Block> = None;
    for mut block in blocks {
        if let Some(prev) = carry.take() {
            if block.after_hard_break {
                out.push(prev);
            } else {
                let mut merged = prev;
                merged.append(block);
                block = merged;
            }
        }
        let chars = html::render(&block.atoms).chars;
        if chars > 0 && chars < cfg.merge_below_chars {
            carry = Some(block);
        } else {
            out.push(block);
        }
    }
    out.extend(carry);
    out
}

/// Partitions a document into ordered, non-overlapping segments covering its
/// visible text.
pub fn segment(doc: &Document, cfg: &SegmenterConfig) -> Vec<Segment> {
    let blocks = merge_short(split_blocks(&doc.raw_html, cfg), cfg);
    let mut segments = Vec::with_capacity(blocks.len());
    let mut offset = 0usize;
    for block in &blocks {
        let mut seg = extract_segment_features(block);
        if seg.text.is_empty() {
            seg.span = Span {
                start: offset,
                end: offset,
            };
        } else {
            if offset > 0 {
                offset += 1; // joining space in the visible text
            }
            seg.span = Span {
                start: offset,
                end: offset + seg.span.len(),
            };
            offset = seg.span.end;
        }
        seg.ordinal = segments.len();
        segments.push(seg);
    }
    segments
}

/// Fills text, anchor count, images, heading and date features for a block.
/// The returned span is relative (`0..text length`) and the ordinal is 0.
pub fn extract_segment_features(block: &Block) -> Segment {
    let r = html::render(&block.atoms);
    Segment {
        ordinal: 0,
        span: Span {
            start: 0,
            end: r.chars,
        },
        dates: detect_dates(&r.text),
        anchor_chars: r.anchor_chars,
        images: r.images.into_iter().map(|alt| Image { alt }).collect(),
        has_heading: r.heading_depth.is_some(),
        heading_depth: r.heading_depth,
        text: r.text,
    }
}

static ISO_DATE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(\d{4})-(\d{2})-(\d{2})\b").unwrap());

static LONG_DATE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"(?i)\b(january|february|march|april|may|june|july|august|september|october|november|december)\s+(\d{1,2}),\s*(\d{4})\b",
    )
    .unwrap()
});

fn month_number(name: &str) -> u32 {
    const MONTHS: [&str; 12] = [
        "january",
        "february",
        "march",
        "april",
        "may",
        "june",
        "july",
        "august",
        "september",
        "october",
        "november",
        "december",
    ];
    let lower = name.to_lowercase();
    MONTHS
        .iter()
        .position(|m| *m == lower)
        .map_or(0, |i| i as u32 + 1)
}

/// Calendar dates written as `YYYY-MM-DD` or `Month D, YYYY`, in text order.
/// Impossible dates (e.g. `2011-02-30`) are ignored.
pub fn detect_dates(text: &str) -> Vec<NaiveDate> {
    let mut found: Vec<(usize, NaiveDate)> = Vec::new();
    for c in ISO_DATE.captures_iter(text) {
        let (y, m, d) = (
            c[1].parse().unwrap(),
            c[2].parse().unwrap(),
            c[3].parse().unwrap(),
        );
        if let Some(date) = NaiveDate::from_ymd_opt(y, m, d) {
            found.push((c.get(0).unwrap().start(), date));
        }
    }
    for c in LONG_DATE.captures_iter(text) {
        let (m, d, y) = (
            month_number(&c[1]),
            c[2].parse().unwrap(),
            c[3].parse().unwrap(),
        );
        if let Some(date) = NaiveDate::from_ymd_opt(y, m, d) {
            found.push((c.get(0).unwrap().start(), date));
        }
    }
    found.sort_by_key(|(pos, _)| *pos);
    found.into_iter().map(|(_, d)| d).collect()
}
