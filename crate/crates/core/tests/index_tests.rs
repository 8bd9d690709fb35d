mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use snipforge_core::index::DocMeta;
use snipforge_core::text::{default_stopwords, tokenize};
use snipforge_core::{Analyzer, InvertedIndex};

use common::*;

fn build(docs: &[snipforge_core::Document]) -> InvertedIndex {
    snipforge_core::pipeline::build_index(Analyzer::default(), docs).unwrap()
}

#[test]
fn fixture_tokenization_matches_golden() {
    let g = golden("three_sentences.tokens.json");
    let expected: Vec<&str> = g["tokens"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let doc = fixture_page("three_sentences");
    let got = tokenize(&doc.visible_text, &default_stopwords());
    assert_eq!(got.iter().map(|t| t.as_str()).collect::<Vec<_>>(), expected);
}

#[test]
fn ten_documents_posting_count() {
    let docs = fixture_corpus();
    assert_eq!(docs.len(), 10);
    let idx = build(&docs);
    assert_eq!(idx.doc_count(), 10);
    let stop = default_stopwords();
    let brute: usize = docs
        .iter()
        .map(|d| {
            oracle_tokens(&d.visible_text, &stop)
                .into_iter()
                .collect::<BTreeSet<_>>()
                .len()
        })
        .sum();
    let entries: usize = idx.terms().map(|(_, p)| p.len()).sum();
    assert_eq!(entries, brute);
    for (_, list) in idx.terms() {
        assert!(list.windows(2).all(|w| w[0].doc < w[1].doc));
        assert!(list
            .iter()
            .all(|p| p.tf >= 1 && (p.doc as usize) < idx.doc_count()));
    }
}

#[test]
fn eight_documents_match_brute_force() {
    let docs: Vec<_> = fixture_corpus().into_iter().take(8).collect();
    let idx = build(&docs);
    let got = idx
        .retrieve(&idx.analyzer().query("segment evaluation"), 3)
        .unwrap();
    let pairs: Vec<_> = docs
        .iter()
        .map(|d| (d.id.clone(), d.visible_text.clone()))
        .collect();
    let want = oracle_rank(&pairs, "segment evaluation", &default_stopwords(), 3);
    let ids = |v: Vec<&String>| v.into_iter().cloned().collect::<Vec<_>>();
    assert_eq!(
        ids(got.items.iter().map(|s| &s.id).collect()),
        ids(want.iter().map(|s| &s.0).collect())
    );
    assert_eq!(got.items.len(), 3);
    // frozen from the oracle run above
    assert_eq!(
        ids(want.iter().map(|s| &s.0).collect()),
        ["d08", "d01", "d06"]
    );
}

#[test]
fn ten_document_round_trip_through_file() {
    let mut docs = fixture_corpus();
    docs.extend(fixture_pages());
    let idx = build(&docs);
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("index.json");
    idx.save(&path).unwrap();
    let back = InvertedIndex::load(&path).unwrap();
    assert_eq!(back, idx);
    assert_eq!(back.docs(), idx.docs());
    assert!(back.docs().iter().any(|d| d.meta.fetch_date.is_some()));
    for (term, list) in idx.terms() {
        assert_eq!(back.postings(term), list);
    }
    assert_eq!(back.to_json().unwrap(), idx.to_json().unwrap());
}

#[test]
fn truncated_file_is_rejected() {
    let idx = build(&fixture_corpus());
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("index.json");
    idx.save(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 40]).unwrap();
    assert!(InvertedIndex::load(&path).is_err());
}

#[test]
fn stopwords_travel_with_the_index() {
    let stop: BTreeSet<String> = ["zebra".to_string()].into();
    let mut idx = InvertedIndex::new(Analyzer::new(stop, false));
    idx.add_text("a", "zebra the crossing", DocMeta::default())
        .unwrap();
    let back = InvertedIndex::from_json(idx.to_json().unwrap().as_bytes()).unwrap();
    assert!(back.analyzer().query("zebra").is_empty());
    assert_eq!(back.postings("the").len(), 1);
}

const VOCAB: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta",
];

fn corpus_strategy() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::collection::vec(prop::sample::select(VOCAB), 0..12).prop_map(|w| w.join(" ")),
        1..50,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn retrieval_matches_oracle(texts in corpus_strategy(),
                                query in prop::collection::vec(prop::sample::select(VOCAB), 1..4),
                                mu in 1usize..20) {
        let mut idx = InvertedIndex::new(Analyzer::default());
        let pairs: Vec<(String, String)> =
            texts.iter().enumerate().map(|(i, t)| (format!("doc{i:02}"), t.clone())).collect();
        for (id, t) in &pairs {
            idx.add_text(id, t, DocMeta::default()).unwrap();
        }
        let q = query.join(" ");
        let got = idx.retrieve(&idx.analyzer().query(&q), mu).unwrap();
        let want = oracle_rank(&pairs, &q, &default_stopwords(), mu);
        prop_assert_eq!(got.items.iter().map(|s| s.id.clone()).collect::<Vec<_>>(),
                        want.iter().map(|s| s.0.clone()).collect::<Vec<_>>());
        for (g, w) in got.items.iter().zip(&want) {
            prop_assert!((g.score - w.1).abs() < 1e-9);
        }
    }

    #[test]
    fn mu_truncation_is_a_prefix(texts in corpus_strategy(),
                                 query in prop::collection::vec(prop::sample::select(VOCAB), 1..3),
                                 mu in 1usize..10) {
        let mut idx = InvertedIndex::new(Analyzer::default());
        for (i, t) in texts.iter().enumerate() {
            idx.add_text(&format!("doc{i:02}"), t, DocMeta::default()).unwrap();
        }
        let q = idx.analyzer().query(&query.join(" "));
        let small = idx.retrieve(&q, mu).unwrap();
        let large = idx.retrieve(&q, mu + 5).unwrap();
        prop_assert!(small.items.len() <= mu);
        prop_assert_eq!(&small.items[..], &large.items[..small.items.len()]);
        for w in large.items.windows(2) {
            prop_assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].id < w[1].id));
        }
    }

    #[test]
    fn save_load_round_trip(texts in corpus_strategy(), stemming in any::<bool>()) {
        let mut idx = InvertedIndex::new(Analyzer::new(default_stopwords(), stemming));
        for (i, t) in texts.iter().enumerate() {
            idx.add_text(&format!("doc{i:02}"), t, DocMeta::default()).unwrap();
        }
        let back = InvertedIndex::from_json(idx.to_json().unwrap().as_bytes()).unwrap();
        prop_assert_eq!(back, idx);
    }
}
