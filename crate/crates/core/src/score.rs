//! Six-factor segment scoring: freshness, theme, link, visual, profile, image.
//!
//! Every factor is query-independent and bounded to `[0, 1]`. The segment's
//! weight is the multiplier-scaled sum of the six; with unit multipliers that
//! is the plain sum.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::html::Document;
use crate::segment::Segment;
use crate::text::{Analyzer, Token};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub freshness: f64,
    pub theme: f64,
    pub link: f64,
    pub visual: f64,
    pub profile: f64,
    pub image: f64,
}

impl Default for Multipliers {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl Multipliers {
    pub fn uniform(w: f64) -> Self {
        Self {
            freshness: w,
            theme: w,
            link: w,
            visual: w,
            profile: w,
            image: w,
        }
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.freshness,
            self.theme,
            self.link,
            self.visual,
            self.profile,
            self.image,
        ]
    }

    pub fn scaled(&self, c: f64) -> Self {
        let [f, e, l, v, r, m] = self.as_array().map(|w| w * c);
        Self {
            freshness: f,
            theme: e,
            link: l,
            visual: v,
            profile: r,
            image: m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ws = self.as_array();
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::ConfigBound {
                field: "scorer multipliers",
                bound: "each must be finite and >= 0".into(),
            });
        }
        if ws.iter().all(|w| *w == 0.0) {
            return Err(Error::ConfigBound {
                field: "scorer multipliers",
                bound: "at least one must be > 0".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScorerConfig {
    pub multipliers: Multipliers,
    /// Used for freshness when the page has no fetch date.
    pub reference_date: Option<NaiveDate>,
    pub profile_terms: BTreeSet<Token>,
}

/// Per-page inputs shared by all of a page's segments.
#[derive(Debug, Clone)]
pub struct PageContext {
    pub theme_vector: BTreeMap<Token, f64>,
    pub mean_segment_chars: f64,
    pub document_date: Option<NaiveDate>,
    pub analyzer: Arc<Analyzer>,
}

impl PageContext {
    /// Theme from the title plus `<h1>`/`<h2>` text; mean length over text segments.
    pub fn new(doc: &Document, segments: &[Segment], analyzer: Arc<Analyzer>) -> Self {
        let mut theme_vector = BTreeMap::new();
        let theme_text =
            std::iter::once(doc.title.as_str()).chain(doc.top_headings.iter().map(String::as_str));
        for text in theme_text {
            for tok in analyzer.tokens(text) {
                *theme_vector.entry(tok).or_insert(0.0) += 1.0;
            }
        }
        let lens: Vec<usize> = segments
            .iter()
            .map(Segment::char_len)
            .filter(|&n| n > 0)
            .collect();
        let mean_segment_chars = if lens.is_empty() {
            1.0
        } else {
            lens.iter().sum::<usize>() as f64 / lens.len() as f64
        };
        Self {
            theme_vector,
            mean_segment_chars,
            document_date: doc.fetch_date,
            analyzer,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentScore {
    pub f: f64,
    pub e: f64,
    pub l: f64,
    pub v: f64,
    pub r: f64,
    pub m: f64,
    pub total: f64,
}

impl SegmentScore {
    pub fn factors(&self) -> [f64; 6] {
        [self.f, self.e, self.l, self.v, self.r, self.m]
    }

    pub fn from_factors(factors: [f64; 6], w: &Multipliers) -> Self {
        let total = factors.iter().zip(w.as_array()).map(|(x, w)| x * w).sum();
        let [f, e, l, v, r, m] = factors;
        Self {
            f,
            e,
            l,
            v,
            r,
            m,
            total,
        }
    }
}

/// `exp(-days / 365)` for the newest date in the segment, measured back from
/// the page's fetch date (or the configured reference date). No dates, or no
/// reference, scores 0. Dates after the reference score 1.
pub fn freshness(seg: &Segment, ctx: &PageContext, cfg: &ScorerConfig) -> f64 {
    let Some(reference) = ctx.document_date.or(cfg.reference_date) else {
        return 0.0;
    };
    let Some(newest) = seg.dates.iter().max() else {
        return 0.0;
    };
    let days = (reference - *newest).num_days().max(0) as f64;
    (-days / 365.0).exp()
}

fn term_vector(analyzer: &Analyzer, text: &str) -> BTreeMap<Token, f64> {
    let mut v = BTreeMap::new();
    for tok in analyzer.tokens(text) {
        *v.entry(tok).or_insert(0.0) += 1.0;
    }
    v
}

fn cosine(a: &BTreeMap<Token, f64>, b: &BTreeMap<Token, f64>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let dot: f64 = a.iter().filter_map(|(t, x)| b.get(t).map(|y| x * y)).sum();
    let na = a.values().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.values().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Cosine similarity between the segment's term frequencies and the page theme.
pub fn theme(seg: &Segment, ctx: &PageContext) -> f64 {
    cosine(&term_vector(&ctx.analyzer, &seg.text), &ctx.theme_vector)
}

/// Share of the segment's text that is not hyperlink anchor text.
pub fn link_informativeness(seg: &Segment) -> f64 {
    if seg.is_image_only() {
        return 0.0;
    }
    let chars = seg.text.chars().count();
    (1.0 - seg.anchor_chars as f64 / chars.max(1) as f64).clamp(0.0, 1.0)
}

/// Half for carrying a heading, half for size relative to twice the page mean.
pub fn visual(seg: &Segment, ctx: &PageContext) -> f64 {
    let heading = if seg.has_heading { 0.5 } else { 0.0 };
    let chars = seg.text.chars().count() as f64;
    heading + 0.5 * (chars / (2.0 * ctx.mean_segment_chars)).min(1.0)
}

/// Fraction of the profile terms present in the segment.
pub fn profile(seg: &Segment, ctx: &PageContext, cfg: &ScorerConfig) -> f64 {
    if cfg.profile_terms.is_empty() {
        return 0.0;
    }
    let present: BTreeSet<Token> = ctx.analyzer.tokens(&seg.text).into_iter().collect();
    let hits = cfg
        .profile_terms
        .iter()
        .filter(|t| present.contains(*t))
        .count();
    hits as f64 / cfg.profile_terms.len() as f64
}

/// A quarter per image, doubled for images whose alt text touches the theme.
pub fn image(seg: &Segment, ctx: &PageContext) -> f64 {
    let themed = seg
        .images
        .iter()
        .filter(|img| {
            ctx.analyzer
                .tokens(&img.alt)
                .iter()
                .any(|t| ctx.theme_vector.contains_key(t))
        })
        .count();
    (0.25 * (seg.images.len() + themed) as f64).min(1.0)
}

pub fn score_segment(seg: &Segment, ctx: &PageContext, cfg: &ScorerConfig) -> SegmentScore {
    let factors = [
        freshness(seg, ctx, cfg),
        theme(seg, ctx),
        link_informativeness(seg),
        visual(seg, ctx),
        profile(seg, ctx, cfg),
        image(seg, ctx),
    ];
    SegmentScore::from_factors(factors, &cfg.multipliers)
}

pub fn score_page(
    segments: &[Segment],
    ctx: &PageContext,
    cfg: &ScorerConfig,
) -> Vec<SegmentScore> {
    segments
        .iter()
        .map(|s| score_segment(s, ctx, cfg))
        .collect()
}
