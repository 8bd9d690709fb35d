//! Seeded generator for a boilerplate-heavy test corpus.
//!
//! Every page has a navigation block, a main article and a footer. Most pages
//! repeat the topic's query terms inside navigation links ahead of the
//! article, so the first occurrence in reading order is boilerplate. Some
//! pages keep their navigation generic.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::SessionSpec;
use crate::pipeline::MetaFile;

const TOPICS: &[(&str, &str, &str)] = &[
    ("solar", "battery", "Home Solar Battery Storage Explained"),
    ("espresso", "grinder", "Choosing an Espresso Grinder"),
    ("marathon", "training", "Marathon Training for Beginners"),
    ("sourdough", "starter", "Keeping a Sourdough Starter Alive"),
    ("electric", "bicycle", "Commuting by Electric Bicycle"),
    ("vegetable", "garden", "Planning a Vegetable Garden"),
    ("mechanical", "keyboard", "Mechanical Keyboard Switch Guide"),
    ("mountain", "hiking", "Safe Mountain Hiking Routes"),
    ("aquarium", "filter", "Aquarium Filter Maintenance"),
    ("chess", "opening", "Learning a Chess Opening Repertoire"),
    ("wireless", "router", "Setting Up a Wireless Router"),
    ("violin", "lessons", "What to Expect from Violin Lessons"),
    ("bird", "watching", "Bird Watching Through the Seasons"),
    ("budget", "travel", "Budget Travel Across Europe"),
    ("yoga", "posture", "Improving Yoga Posture at Home"),
];

const FILLER: &[&str] = &[
    "people",
    "often",
    "find",
    "simple",
    "steps",
    "help",
    "weekly",
    "routine",
    "careful",
    "notes",
    "progress",
    "results",
    "experts",
    "suggest",
    "small",
    "changes",
    "daily",
    "practice",
    "common",
    "mistakes",
    "cost",
    "quality",
    "season",
    "local",
    "shops",
    "online",
    "reviews",
    "compare",
    "options",
    "before",
    "buying",
    "patience",
    "matters",
    "long",
    "term",
    "benefits",
    "friends",
    "family",
    "beginners",
    "advanced",
    "methods",
    "easy",
    "check",
    "list",
    "plan",
    "ahead",
    "measure",
    "carefully",
    "record",
    "outcomes",
    "improve",
    "gradually",
    "share",
    "experience",
    "community",
    "forum",
    "questions",
    "answers",
    "useful",
    "tips",
    "weather",
    "morning",
    "evening",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticPage {
    pub id: String,
    pub html: String,
    pub meta: MetaFile,
    /// Whether the navigation links repeat the topic terms.
    pub nav_has_terms: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticCorpus {
    pub pages: Vec<SyntheticPage>,
    pub sessions: Vec<SessionSpec>,
}

fn sentence(rng: &mut ChaCha8Rng, min_words: usize, max_words: usize) -> String {
    let words = rng.gen_range(min_words..max_words);
    let mut s: Vec<&str> = (0..words).map(|_| *FILLER.choose(rng).unwrap()).collect();
    let mut first = s[0].to_string();
    first[..1].make_ascii_uppercase();
    s[0] = &first;
    format!("{}.", s.join(" "))
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

fn page(rng: &mut ChaCha8Rng, n: usize, topic: usize, nav_has_terms: bool) -> SyntheticPage {
    let (t1, t2, title) = TOPICS[topic];
    let fetch = NaiveDate::from_ymd_opt(2011, 6, 1).unwrap();
    let published = fetch - chrono::Days::new(rng.gen_range(0..700));
    let other = TOPICS[(topic + 1 + rng.gen_range(0..TOPICS.len() - 1)) % TOPICS.len()];

    let nav = if nav_has_terms {
        format!(
            "<li><a href=\"/{t1}\">{} {t2} deals</a></li>\
             <li><a href=\"/{t1}/news\">Latest {t1} {t2} news</a></li>",
            capitalize(t1)
        )
    } else {
        format!(
            "<li><a href=\"/{0}\">Popular: {0} {1}</a></li><li><a href=\"/archive\">Archive</a></li>",
            other.0, other.1
        )
    };
    let nav = format!(
        "<nav><ul><li><a href=\"/\">Home</a></li>{nav}\
         <li><a href=\"/about\">About us</a></li></ul></nav>"
    );

    let lead = format!(
        "{} A good {t1} {t2} setup rewards {}",
        sentence(rng, 8, 12),
        sentence(rng, 6, 9).to_lowercase()
    );
    let middle: Vec<String> = (0..rng.gen_range(3..6))
        .map(|_| sentence(rng, 9, 15))
        .collect();
    let again = format!(
        "{} Most readers revisit their {t1} {t2} choices after {}",
        sentence(rng, 8, 12),
        sentence(rng, 5, 8).to_lowercase()
    );
    let article = format!(
        "<article><h1>{title}</h1><p>Published {published}.</p><p>{lead}</p><p>{}</p><p>{again}</p>\
         <figure><img src=\"/img/{n}.jpg\" alt=\"{t1} {t2} photo\"></figure></article>",
        middle.join(" ")
    );
    let footer =
        "<footer><p>Copyright 2011 Example Media. <a href=\"/privacy\">Privacy policy</a> \
                  <a href=\"/contact\">Contact the editors</a></p></footer>";

    let html = format!(
        "<!DOCTYPE html>\n<html><head><title>{title}</title>\
         <script>var tracker = \"{t1} {t2}\";</script></head>\n<body>\n{nav}\n{article}\n{footer}\n</body></html>\n"
    );
    SyntheticPage {
        id: format!("page{n:04}"),
        html,
        meta: MetaFile {
            url: Some(format!("https://example.org/{t1}-{t2}/{n}")),
            fetch_date: Some(fetch),
        },
        nav_has_terms,
    }
}

/// `pages` pages spread round-robin over the topics and one session per topic.
/// About one page in seven keeps its navigation free of the topic terms.
pub fn generate(seed: u64, pages: usize) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pages = (0..pages)
        .map(|n| {
            let nav_has_terms = rng.gen_range(0..7) != 0;
            page(&mut rng, n, n % TOPICS.len(), nav_has_terms)
        })
        .collect();
    let sessions = TOPICS
        .iter()
        .enumerate()
        .map(|(i, (t1, t2, _))| SessionSpec {
            id: (i + 1).to_string(),
            query: format!("{t1} {t2}"),
        })
        .collect();
    SyntheticCorpus { pages, sessions }
}

impl SyntheticCorpus {
    /// Writes `<id>.html` and `<id>.meta` for every page plus `sessions.json`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for p in &self.pages {
            let html = dir.join(format!("{}.html", p.id));
            fs::write(&html, &p.html).map_err(|e| Error::io(&html, e))?;
            let meta = dir.join(format!("{}.meta", p.id));
            fs::write(&meta, serde_json::to_string(&p.meta)? + "\n")
                .map_err(|e| Error::io(&meta, e))?;
        }
        let sessions = dir.join("sessions.json");
        let json = serde_json::to_string_pretty(&self.sessions)? + "\n";
        fs::write(&sessions, json).map_err(|e| Error::io(&sessions, e))
    }
}
