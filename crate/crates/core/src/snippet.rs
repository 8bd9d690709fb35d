//! Snippet construction from ranked segments (semantic) or from the first
//! query-term occurrence on the page (simple).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::score::SegmentScore;
use crate::segment::Segment;
use crate::text::{char_slice, Analyzer, Query, Token};

/// Joins fragments in the rendered snippet. Counts toward the budget.
pub const SEPARATOR: &str = " … ";
const SEPARATOR_CHARS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetConfig {
    /// Maximum rendered length in characters.
    pub budget_chars: usize,
    /// How many of the best segments may contribute fragments.
    pub top_segments: usize,
    /// Occurrences closer than this many characters share one window.
    pub window_chars: usize,
}

impl Default for SnippetConfig {
    fn default() -> Self {
        Self {
            budget_chars: 100,
            top_segments: 3,
            window_chars: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedSegment {
    pub ordinal: usize,
    pub score: f64,
}

/// Segment ordinals by descending total, ties by ordinal. Totals are compared
/// at 12 decimals so rounding noise cannot reorder equal weights.
pub fn rank_segments(scores: &[SegmentScore]) -> Vec<RankedSegment> {
    let mut ranked: Vec<RankedSegment> = scores
        .iter()
        .enumerate()
        .map(|(ordinal, s)| RankedSegment {
            ordinal,
            score: crate::index::quantize(s.total),
        })
        .collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.ordinal.cmp(&b.ordinal)));
    ranked
}

/// A region of one segment's text around a group of query-term occurrences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchWindow {
    pub segment: usize,
    /// Character offsets into the segment text.
    pub start: usize,
    pub end: usize,
    pub matched: BTreeSet<Token>,
}

/// Finds query-term occurrences in `seg` and groups those within `window`
/// characters of the group's first occurrence. Each group becomes a window of
/// about `window` characters centered on it, widened to whole words.
/// Windows that overlap or are separated by a single space are merged.
pub fn match_segment(
    seg: &Segment,
    query: &Query,
    analyzer: &Analyzer,
    window: usize,
) -> Vec<MatchWindow> {
    let window = window.max(1);
    let terms: BTreeSet<&Token> = query.terms.iter().collect();
    let occs: Vec<_> = analyzer
        .occurrences(&seg.text)
        .into_iter()
        .filter(|o| terms.contains(&o.token))
        .collect();
    let chars: Vec<char> = seg.text.chars().collect();

    let mut groups: Vec<(usize, usize, BTreeSet<Token>)> = Vec::new();
    for o in occs {
        match groups.last_mut() {
            Some((start, end, matched)) if o.end - *start <= window => {
                *end = o.end;
                matched.insert(o.token);
            }
            _ => groups.push((o.start, o.end, BTreeSet::from([o.token]))),
        }
    }

    let mut windows: Vec<MatchWindow> = Vec::new();
    for (gs, ge, matched) in groups {
        let pad = window.saturating_sub(ge - gs);
        let left = pad / 2;
        let (start, end) = word_bounds(
            &chars,
            gs.saturating_sub(left),
            (ge + pad - left).min(chars.len()),
        );
        match windows.last_mut() {
            Some(prev) if start <= prev.end + 1 => {
                prev.end = prev.end.max(end);
                prev.matched.extend(matched);
            }
            _ => windows.push(MatchWindow {
                segment: seg.ordinal,
                start,
                end,
                matched,
            }),
        }
    }
    windows
}

/// Widens `[start, end)` outward so no word is cut, then trims whitespace.
fn word_bounds(chars: &[char], mut start: usize, mut end: usize) -> (usize, usize) {
    while start > 0 && !chars[start - 1].is_whitespace() {
        start -= 1;
    }
    while end < chars.len() && !chars[end].is_whitespace() {
        end += 1;
    }
    trim(chars, start, end)
}

/// Largest sub-range of `[lo, hi)` of at most `budget` chars that contains
/// `[keep_lo, keep_hi)`, preferring word boundaries. Falls back to a hard cut
/// when the kept range alone exceeds the budget.
fn fit(
    chars: &[char],
    lo: usize,
    hi: usize,
    keep_lo: usize,
    keep_hi: usize,
    budget: usize,
) -> (usize, usize) {
    if hi - lo <= budget {
        return (lo, hi);
    }
    if keep_hi - keep_lo >= budget {
        return (keep_lo, keep_lo + budget);
    }
    let mut start = lo.max(keep_hi.saturating_sub(budget));
    while start < keep_lo && start > lo && !chars[start - 1].is_whitespace() {
        start += 1;
    }
    let mut end = hi.min(start + budget);
    while end > keep_hi && end < hi && !chars[end].is_whitespace() {
        end -= 1;
    }
    trim(chars, start, end)
}

/// Grows `[start, end)` toward `budget` chars within the text, split evenly
/// between both sides, then pulls the edges in to whole words.
fn extend(chars: &[char], start: usize, end: usize, budget: usize) -> (usize, usize) {
    let len = chars.len();
    if end - start >= budget {
        return (start, end);
    }
    let extra = budget - (end - start);
    let mut left = (extra / 2).min(start);
    let right = (extra - left).min(len - end);
    left = (extra - right).min(start);
    let (lo, hi) = (start - left, end + right);
    let mut s = lo;
    if s > 0 {
        while s < start && !chars[s - 1].is_whitespace() {
            s += 1;
        }
    }
    let mut e = hi;
    if e < len {
        while e > end && !chars[e].is_whitespace() {
            e -= 1;
        }
    }
    trim(chars, s, e)
}

fn trim(chars: &[char], mut s: usize, mut e: usize) -> (usize, usize) {
    while s < e && chars[s].is_whitespace() {
        s += 1;
    }
    while e > s && chars[e - 1].is_whitespace() {
        e -= 1;
    }
    (s, e)
}

/// Leading text of a segment cut at a word boundary within `budget` chars.
fn head(chars: &[char], budget: usize) -> (usize, usize) {
    if chars.len() <= budget {
        return (0, chars.len());
    }
    let mut end = budget;
    while end > 0 && !chars[end].is_whitespace() {
        end -= 1;
    }
    if end == 0 {
        end = budget;
    }
    trim(chars, 0, end)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnippetMode {
    Semantic,
    Simple,
}

impl std::fmt::Display for SnippetMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SnippetMode::Semantic => "semantic",
            SnippetMode::Simple => "simple",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub segment: usize,
    /// Character offsets into the source segment's text.
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub mode: SnippetMode,
    pub rendered: String,
    pub fragments: Vec<Fragment>,
}

impl Snippet {
    fn new(mode: SnippetMode, fragments: Vec<Fragment>) -> Self {
        let rendered = fragments
            .iter()
            .map(|f| f.text.as_str())
            .collect::<Vec<_>>()
            .join(SEPARATOR);
        Self {
            mode,
            rendered,
            fragments,
        }
    }

    fn single(
        mode: SnippetMode,
        seg: &Segment,
        chars: &[char],
        (start, end): (usize, usize),
    ) -> Self {
        let text = chars[start..end].iter().collect();
        Self::new(
            mode,
            vec![Fragment {
                segment: seg.ordinal,
                start,
                end,
                text,
            }],
        )
    }

    pub fn char_len(&self) -> usize {
        self.rendered.chars().count()
    }
}

/// Collects match windows from the best-scoring text segments, in rank order,
/// until the next fragment would overflow the budget. Without any match the
/// head of the best text segment is used.
pub fn build_semantic_snippet(
    segments: &[Segment],
    scores: &[SegmentScore],
    query: &Query,
    analyzer: &Analyzer,
    cfg: &SnippetConfig,
) -> Snippet {
    let budget = cfg.budget_chars;
    let top: Vec<&Segment> = rank_segments(scores)
        .into_iter()
        .map(|r| &segments[r.ordinal])
        .filter(|s| !s.text.is_empty())
        .take(cfg.top_segments)
        .collect();
    let Some(best) = top.first() else {
        return Snippet::new(SnippetMode::Semantic, Vec::new());
    };

    let mut fragments: Vec<Fragment> = Vec::new();
    let mut used = 0usize;
    'segments: for seg in &top {
        let chars: Vec<char> = seg.text.chars().collect();
        for w in match_segment(seg, query, analyzer, cfg.window_chars) {
            let sep = if fragments.is_empty() {
                0
            } else {
                SEPARATOR_CHARS
            };
            let (mut start, mut end) = (w.start, w.end);
            if used + sep + (end - start) > budget {
                if !fragments.is_empty() {
                    break 'segments;
                }
                let first = analyzer
                    .occurrences(char_slice(&seg.text, start, end))
                    .into_iter()
                    .find(|o| w.matched.contains(&o.token))
                    .map(|o| (start + o.start, start + o.end))
                    .unwrap_or((start, start));
                (start, end) = fit(&chars, start, end, first.0, first.1, budget);
            }
            used += sep + (end - start);
            fragments.push(Fragment {
                segment: seg.ordinal,
                start,
                end,
                text: chars[start..end].iter().collect(),
            });
        }
    }
    if fragments.is_empty() {
        let chars: Vec<char> = best.text.chars().collect();
        return Snippet::single(SnippetMode::Semantic, best, &chars, head(&chars, budget));
    }
    if let [only] = fragments.as_slice() {
        // A lone window gets the same context growth as the baseline.
        let seg = &segments[only.segment];
        let chars: Vec<char> = seg.text.chars().collect();
        let range = extend(&chars, only.start, only.end, budget);
        return Snippet::single(SnippetMode::Semantic, seg, &chars, range);
    }
    Snippet::new(SnippetMode::Semantic, fragments)
}

/// Baseline: the first match window in reading order, grown to the budget
/// inside its segment. Without any match, the head of the first text segment.
pub fn build_simple_snippet(
    segments: &[Segment],
    query: &Query,
    analyzer: &Analyzer,
    cfg: &SnippetConfig,
) -> Snippet {
    let budget = cfg.budget_chars;
    for seg in segments.iter().filter(|s| !s.text.is_empty()) {
        let Some(w) = match_segment(seg, query, analyzer, cfg.window_chars)
            .into_iter()
            .next()
        else {
            continue;
        };
        let chars: Vec<char> = seg.text.chars().collect();
        let range = if w.end - w.start > budget {
            let first = analyzer
                .occurrences(char_slice(&seg.text, w.start, w.end))
                .into_iter()
                .find(|o| w.matched.contains(&o.token))
                .map(|o| (w.start + o.start, w.start + o.end))
                .unwrap_or((w.start, w.start));
            fit(&chars, w.start, w.end, first.0, first.1, budget)
        } else {
            extend(&chars, w.start, w.end, budget)
        };
        return Snippet::single(SnippetMode::Simple, seg, &chars, range);
    }
    match segments.iter().find(|s| !s.text.is_empty()) {
        Some(seg) => {
            let chars: Vec<char> = seg.text.chars().collect();
            Snippet::single(SnippetMode::Simple, seg, &chars, head(&chars, budget))
        }
        None => Snippet::new(SnippetMode::Simple, Vec::new()),
    }
}

/// Machine-readable form emitted by the command line tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetRecord {
    pub doc_id: String,
    pub mode: SnippetMode,
    pub rendered: String,
    pub fragments: Vec<Fragment>,
}

impl SnippetRecord {
    pub fn new(doc_id: &str, snippet: &Snippet) -> Self {
        Self {
            doc_id: doc_id.to_string(),
            mode: snippet.mode,
            rendered: snippet.rendered.clone(),
            fragments: snippet.fragments.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::score::Multipliers;
    use crate::segment::Span;

    fn seg(ordinal: usize, text: &str) -> Segment {
        Segment {
            ordinal,
            span: Span {
                start: 0,
                end: text.chars().count(),
            },
            text: text.to_string(),
            anchor_chars: 0,
            images: vec![],
            has_heading: false,
            heading_depth: None,
            dates: vec![],
        }
    }

    fn totals(ts: &[f64]) -> Vec<SegmentScore> {
        ts.iter()
            .map(|&t| {
                SegmentScore::from_factors([t, 0.0, 0.0, 0.0, 0.0, 0.0], &Multipliers::default())
            })
            .collect()
    }

    fn order(ts: &[f64]) -> Vec<usize> {
        rank_segments(&totals(ts))
            .iter()
            .map(|r| r.ordinal)
            .collect()
    }

    #[test]
    fn ranks_descending() {
        assert_eq!(order(&[1.0, 3.0, 2.0]), [1, 2, 0]);
        assert_eq!(order(&[0.5; 4]), [0, 1, 2, 3]);
    }

    #[test]
    fn no_match_no_window() {
        let a = Analyzer::default();
        assert!(
            match_segment(&seg(0, "no relevant words"), &a.query("snippet"), &a, 40).is_empty()
        );
    }

    #[test]
    fn single_occurrence_window() {
        let a = Analyzer::default();
        let s = seg(0, "snippet construction");
        let w = match_segment(&s, &a.query("snippet"), &a, 20);
        assert_eq!(w.len(), 1);
        assert!(char_slice(&s.text, w[0].start, w[0].end).contains("snippet"));
        assert_eq!(w[0].matched, BTreeSet::from([a.term("snippet").unwrap()]));
    }

    #[test]
    fn windows_never_cut_words() {
        let a = Analyzer::default();
        let s = seg(0, "aaaaaaaaaa bbbbbbbbbb target cccccccccc dddddddddd");
        let w = match_segment(&s, &a.query("target"), &a, 12);
        assert_eq!(
            char_slice(&s.text, w[0].start, w[0].end),
            "bbbbbbbbbb target cccccccccc"
        );
    }

    #[test]
    fn semantic_fallback_uses_best_segment_head() {
        let a = Analyzer::default();
        let segs = vec![seg(0, "first block text"), seg(1, &"word ".repeat(40))];
        let snip = build_semantic_snippet(
            &segs,
            &totals(&[1.0, 2.0]),
            &a.query("absent"),
            &a,
            &SnippetConfig::default(),
        );
        assert_eq!(snip.fragments.len(), 1);
        assert_eq!(snip.fragments[0].segment, 1);
        assert!(snip.char_len() <= 100);
        assert!(snip.rendered.starts_with("word word"));
    }

    #[test]
    fn semantic_single_source() {
        let a = Analyzer::default();
        let segs = vec![
            seg(0, "apples grow on trees"),
            seg(1, "nothing to see"),
            seg(2, "more apples here"),
        ];
        let snip = build_semantic_snippet(
            &segs,
            &totals(&[3.0, 2.0, 1.0]),
            &a.query("trees"),
            &a,
            &SnippetConfig::default(),
        );
        assert!(snip.fragments.iter().all(|f| f.segment == 0));
        assert_eq!(snip.rendered, "apples grow on trees");
    }

    #[test]
    fn semantic_respects_top_m() {
        let a = Analyzer::default();
        let segs = vec![seg(0, "apples"), seg(1, "pears"), seg(2, "plums")];
        let cfg = SnippetConfig {
            top_segments: 2,
            ..Default::default()
        };
        let snip = build_semantic_snippet(
            &segs,
            &totals(&[1.0, 2.0, 3.0]),
            &a.query("apples"),
            &a,
            &cfg,
        );
        // the only match sits in the third-ranked segment, so fall back
        assert_eq!(snip.rendered, "plums");
    }

    #[test]
    fn fragments_joined_in_rank_order() {
        let a = Analyzer::default();
        let segs = vec![seg(0, "red apples"), seg(1, "green apples")];
        let snip = build_semantic_snippet(
            &segs,
            &totals(&[1.0, 2.0]),
            &a.query("apples"),
            &a,
            &SnippetConfig::default(),
        );
        assert_eq!(snip.rendered, "green apples … red apples");
    }

    #[test]
    fn overflowing_first_window_is_fitted() {
        let a = Analyzer::default();
        let long = format!("{} needle {}", "x".repeat(70), "y".repeat(70));
        let segs = vec![seg(0, &long)];
        let cfg = SnippetConfig {
            budget_chars: 20,
            ..Default::default()
        };
        let snip = build_semantic_snippet(&segs, &totals(&[1.0]), &a.query("needle"), &a, &cfg);
        assert!(snip.char_len() <= 20);
        assert!(snip.rendered.contains("needle"));
        let simple = build_simple_snippet(&segs, &a.query("needle"), &a, &cfg);
        assert!(simple.char_len() <= 20);
        assert!(simple.rendered.contains("needle"));
    }

    #[test]
    fn simple_starts_at_first_match() {
        let a = Analyzer::default();
        let segs = vec![seg(0, "needle at the start of a rather long sentence that keeps on going and going for quite a while more")];
        let snip = build_simple_snippet(&segs, &a.query("needle"), &a, &SnippetConfig::default());
        assert_eq!(snip.fragments[0].start, 0);
        assert!(snip.char_len() <= 100);
    }

    #[test]
    fn simple_fallback_is_document_head() {
        let a = Analyzer::default();
        let segs = vec![seg(0, &"lorem ipsum ".repeat(20)), seg(1, "tail")];
        let snip = build_simple_snippet(&segs, &a.query("absent"), &a, &SnippetConfig::default());
        assert_eq!(snip.fragments[0].segment, 0);
        assert_eq!(snip.fragments[0].start, 0);
        assert!(snip.char_len() <= 100 && !snip.rendered.is_empty());
    }

    #[test]
    fn simple_extends_toward_budget() {
        let a = Analyzer::default();
        let text = "one two three four five six seven eight nine ten eleven twelve thirteen fourteen fifteen sixteen seventeen eighteen needle nineteen twenty twentyone twentytwo twentythree twentyfour";
        let segs = vec![seg(0, text)];
        let snip = build_simple_snippet(&segs, &a.query("needle"), &a, &SnippetConfig::default());
        assert!(
            snip.char_len() > 60 && snip.char_len() <= 100,
            "{}",
            snip.rendered
        );
        assert!(text.contains(&snip.rendered));
    }
}
