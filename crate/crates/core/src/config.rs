//! Flat JSON configuration with dotted keys.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::JudgeConfig;
use crate::score::{Multipliers, ScorerConfig};
use crate::segment::SegmenterConfig;
use crate::snippet::SnippetConfig;
use crate::text::Analyzer;

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "SNIPFORGE_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub mu: usize,
    pub budget_chars: usize,
    pub top_segments: usize,
    pub match_window_chars: usize,
    #[serde(rename = "segmenter.min_split_chars")]
    pub min_split_chars: usize,
    #[serde(rename = "segmenter.merge_below_chars")]
    pub merge_below_chars: usize,
    #[serde(rename = "scorer.wF")]
    pub w_freshness: f64,
    #[serde(rename = "scorer.wE")]
    pub w_theme: f64,
    #[serde(rename = "scorer.wL")]
    pub w_link: f64,
    #[serde(rename = "scorer.wV")]
    pub w_visual: f64,
    #[serde(rename = "scorer.wR")]
    pub w_profile: f64,
    #[serde(rename = "scorer.wM")]
    pub w_image: f64,
    #[serde(rename = "scorer.reference_date")]
    pub reference_date: Option<NaiveDate>,
    #[serde(rename = "scorer.profile_terms")]
    pub profile_terms: Vec<String>,
    pub stopwords_path: Option<PathBuf>,
    pub stemming: bool,
    #[serde(rename = "judge.term_coverage")]
    pub judge_term_coverage: f64,
    #[serde(rename = "judge.provenance_share")]
    pub judge_provenance_share: f64,
    #[serde(rename = "judge.min_link")]
    pub judge_min_link: f64,
}

impl Default for AppConfig {
    fn default() -> Self {
        let snippet = SnippetConfig::default();
        let seg = SegmenterConfig::default();
        let judge = JudgeConfig::default();
        Self {
            mu: crate::index::DEFAULT_MU,
            budget_chars: snippet.budget_chars,
            top_segments: snippet.top_segments,
            match_window_chars: snippet.window_chars,
            min_split_chars: seg.min_split_chars,
            merge_below_chars: seg.merge_below_chars,
            w_freshness: 1.0,
            w_theme: 1.0,
            w_link: 1.0,
            w_visual: 1.0,
            w_profile: 1.0,
            w_image: 1.0,
            reference_date: None,
            profile_terms: Vec::new(),
            stopwords_path: None,
            stemming: false,
            judge_term_coverage: judge.term_coverage,
            judge_provenance_share: judge.provenance_share,
            judge_min_link: judge.min_link,
        }
    }
}

fn bound(field: &'static str, bound: &str) -> Error {
    Error::ConfigBound {
        field,
        bound: bound.to_string(),
    }
}

impl AppConfig {
    /// Reads `path`, or returns defaults when `path` is `None`. The result is validated.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                Self::from_json(&text)?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dump(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("mu", self.mu),
            ("top_segments", self.top_segments),
            ("match_window_chars", self.match_window_chars),
            ("segmenter.min_split_chars", self.min_split_chars),
            ("segmenter.merge_below_chars", self.merge_below_chars),
        ];
        for (field, v) in counts {
            if v < 1 {
                return Err(bound(field, "must be >= 1"));
            }
        }
        if self.budget_chars < 20 {
            return Err(bound("budget_chars", "must be >= 20"));
        }
        self.multipliers().validate()?;
        let fractions = [
            ("judge.term_coverage", self.judge_term_coverage),
            ("judge.provenance_share", self.judge_provenance_share),
            ("judge.min_link", self.judge_min_link),
        ];
        for (field, v) in fractions {
            if !(0.0..=1.0).contains(&v) {
                return Err(bound(field, "must be within [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn multipliers(&self) -> Multipliers {
        Multipliers {
            freshness: self.w_freshness,
            theme: self.w_theme,
            link: self.w_link,
            visual: self.w_visual,
            profile: self.w_profile,
            image: self.w_image,
        }
    }

    pub fn analyzer(&self) -> Result<Analyzer> {
        match &self.stopwords_path {
            Some(p) => Analyzer::from_stopword_file(p, self.stemming),
            None => Ok(Analyzer::new(
                crate::text::default_stopwords(),
                self.stemming,
            )),
        }
    }

    pub fn snippet_config(&self) -> SnippetConfig {
        SnippetConfig {
            budget_chars: self.budget_chars,
            top_segments: self.top_segments,
            window_chars: self.match_window_chars,
        }
    }

    pub fn segmenter_config(&self) -> SegmenterConfig {
        SegmenterConfig {
            min_split_chars: self.min_split_chars,
            merge_below_chars: self.merge_below_chars,
        }
    }

    /// Profile terms are normalized with `analyzer`; stopwords and multi-word
    /// entries that do not reduce to one term are dropped.
    pub fn scorer_config(&self, analyzer: &Analyzer) -> ScorerConfig {
        ScorerConfig {
            multipliers: self.multipliers(),
            reference_date: self.reference_date,
            profile_terms: self
                .profile_terms
                .iter()
                .filter_map(|t| analyzer.term(t))
                .collect(),
        }
    }

    pub fn judge_config(&self) -> JudgeConfig {
        JudgeConfig {
            term_coverage: self.judge_term_coverage,
            provenance_share: self.judge_provenance_share,
            min_link: self.judge_min_link,
        }
    }
}
