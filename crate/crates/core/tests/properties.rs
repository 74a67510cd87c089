//! Property tests over the vector space, preprocessing and indicators.

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use topicpath::corpus::{self, Batch, BatchConfig, Microblog};
use topicpath::events;
use topicpath::sentiment::{self, Lexicon};
use topicpath::vecspace::{intersection_cosine, max_pool, SparseVector, Vocabulary};

fn vocab(n: usize) -> Arc<Vocabulary> {
    Arc::new(Vocabulary::from_terms((0..n).map(|i| format!("t{i:02}"))))
}

fn sparse(v: &Arc<Vocabulary>, entries: Vec<(u32, f64)>) -> SparseVector {
    let mut seen = BTreeSet::new();
    let entries: Vec<(u32, f64)> = entries
        .into_iter()
        .filter(|&(id, _)| (id as usize) < v.len() && seen.insert(id))
        .collect();
    SparseVector::new(Arc::clone(v), entries).unwrap()
}

prop_compose! {
    fn entries(dims: u32)(
        pairs in proptest::collection::vec((0..dims, 0.01f64..10.0), 0..12)
    ) -> Vec<(u32, f64)> {
        pairs
    }
}

/// Dense reference cosine over the vocabulary intersection.
fn dense_cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for term in a.vocab().terms() {
        if b.vocab().id_of(term).is_none() {
            continue;
        }
        let wa = a
            .term_weights()
            .find(|(t, _)| *t == term.as_str())
            .map_or(0.0, |(_, w)| w);
        let wb = b
            .term_weights()
            .find(|(t, _)| *t == term.as_str())
            .map_or(0.0, |(_, w)| w);
        dot += wa * wb;
        na += wa * wa;
        nb += wb * wb;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

proptest! {
    #[test]
    fn cosine_matches_dense_oracle(a in entries(20), b in entries(20)) {
        let v = vocab(20);
        let x = sparse(&v, a);
        let y = sparse(&v, b);
        let got = intersection_cosine(&x, &y);
        let want = dense_cosine(&x, &y).clamp(0.0, 1.0);
        prop_assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn cosine_matches_dense_oracle_across_vocabularies(a in entries(14), b in entries(14)) {
        // Two overlapping but distinct vocabularies.
        let va = Arc::new(Vocabulary::from_terms((0..14).map(|i| format!("t{i:02}"))));
        let vb = Arc::new(Vocabulary::from_terms((7..21).map(|i| format!("t{i:02}"))));
        let x = sparse(&va, a);
        let y = sparse(&vb, b);
        let got = intersection_cosine(&x, &y);
        let want = dense_cosine(&x, &y).clamp(0.0, 1.0);
        prop_assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn cosine_is_symmetric_bounded_and_scale_invariant(
        a in entries(16),
        b in entries(16),
        c in 0.001f64..1000.0,
    ) {
        let v = vocab(16);
        let x = sparse(&v, a);
        let y = sparse(&v, b);
        let xy = intersection_cosine(&x, &y);
        let yx = intersection_cosine(&y, &x);
        prop_assert!((xy - yx).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&xy));

        let scaled = sparse(
            &v,
            x.entries().iter().map(|&(id, w)| (id, w * c)).collect(),
        );
        let sxy = intersection_cosine(&scaled, &y);
        prop_assert!((sxy - xy).abs() < 1e-9);
    }

    #[test]
    fn max_pool_is_commutative_associative_and_dominant(
        a in entries(12),
        b in entries(12),
        c in entries(12),
    ) {
        let v = vocab(12);
        let x = sparse(&v, a);
        let y = sparse(&v, b);
        let z = sparse(&v, c);
        let ab = max_pool([&x, &y]).unwrap();
        let ba = max_pool([&y, &x]).unwrap();
        prop_assert_eq!(ab.entries(), ba.entries());

        let ab_c = max_pool([&ab, &z]).unwrap();
        let bc = max_pool([&y, &z]).unwrap();
        let a_bc = max_pool([&x, &bc]).unwrap();
        prop_assert_eq!(ab_c.entries(), a_bc.entries());

        let again = max_pool([&ab, &ab]).unwrap();
        prop_assert_eq!(again.entries(), ab.entries());

        // The pool dominates every input coordinate.
        for input in [&x, &y] {
            for &(id, w) in input.entries() {
                let pooled = ab
                    .entries()
                    .iter()
                    .find(|&&(pid, _)| pid == id)
                    .map_or(0.0, |&(_, pw)| pw);
                prop_assert!(pooled >= w);
            }
        }
    }

    #[test]
    fn stream_segmentation_partitions_messages(
        times in proptest::collection::vec(0i64..1_000_000, 1..60),
        delta in 1u64..100_000,
    ) {
        let cfg = BatchConfig { delta_t_secs: delta, ..BatchConfig::default() };
        let messages: Vec<Microblog> = times
            .iter()
            .enumerate()
            .map(|(i, &t)| Microblog { id: format!("m{i}"), timestamp: t, text: String::new() })
            .collect();
        let t_min = *times.iter().min().unwrap();
        let batches = corpus::segment_stream(messages, &cfg);
        let total: usize = batches.iter().map(|b| b.messages.len()).sum();
        prop_assert_eq!(total, times.len());
        for batch in &batches {
            for m in &batch.messages {
                let expect = ((m.timestamp - t_min) / delta as i64) as usize;
                prop_assert_eq!(batch.index, expect);
                prop_assert!(m.timestamp >= batch.start && m.timestamp < batch.end);
            }
        }
        // Batch indices are contiguous from zero.
        for (i, b) in batches.iter().enumerate() {
            prop_assert_eq!(b.index, i);
        }
    }

    #[test]
    fn preprocessing_is_idempotent(
        texts in proptest::collection::vec("[a-c@# ]{0,24}", 1..10),
    ) {
        let cfg = BatchConfig {
            stopwords: ["b".to_string()].into_iter().collect(),
            ..BatchConfig::default()
        };
        let mk = |texts: &[String]| Batch {
            index: 0,
            start: 0,
            end: 1,
            messages: texts
                .iter()
                .enumerate()
                .map(|(i, t)| Microblog { id: format!("m{i}"), timestamp: 0, text: t.clone() })
                .collect(),
        };
        let first = corpus::preprocess(&mk(&texts), &cfg);
        let rebuilt: Vec<String> = first.iter().map(|t| t.normalized_text()).collect();
        let second = corpus::preprocess(&mk(&rebuilt), &cfg);
        let a: Vec<Vec<String>> = first.iter().map(|t| t.tokens.clone()).collect();
        let b: Vec<Vec<String>> = second.iter().map(|t| t.tokens.clone()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn term_frequencies_match_brute_force_counts(
        docs in proptest::collection::vec(
            proptest::collection::vec("[a-e]", 1..12),
            1..10,
        ),
        min_df in 1usize..3,
    ) {
        let cfg = BatchConfig {
            delta_t_secs: 1,
            min_doc_freq: min_df,
            ngram_max: 2,
            stopwords: BTreeSet::new().into_iter().collect(),
        };
        let tokenized: Vec<corpus::TokenizedMessage> = docs
            .iter()
            .enumerate()
            .map(|(i, toks)| corpus::TokenizedMessage {
                id: format!("m{i}"),
                tokens: toks.clone(),
            })
            .collect();
        let (vocab, vectors) = corpus::extract_features(&tokenized, &cfg);
        // Brute force: recount every entry directly from the tokens.
        for (id, v) in &vectors {
            let doc = &tokenized[id[1..].parse::<usize>().unwrap()];
            for (term, w) in v.term_weights() {
                let parts: Vec<&str> = term.split(' ').collect();
                let mut count = 0;
                for win in doc.tokens.windows(parts.len()) {
                    if win.iter().map(String::as_str).eq(parts.iter().copied()) {
                        count += 1;
                    }
                }
                prop_assert_eq!(w as usize, count, "term {} in {}", term, id);
            }
        }
        // Document-frequency threshold respected.
        for term in vocab.terms() {
            let parts: Vec<&str> = term.split(' ').collect();
            let df = tokenized
                .iter()
                .filter(|d| {
                    d.tokens
                        .windows(parts.len())
                        .any(|w| w.iter().map(String::as_str).eq(parts.iter().copied()))
                })
                .count();
            prop_assert!(df >= min_df);
        }
    }

    #[test]
    fn volume_indicator_is_scale_invariant(
        base in proptest::collection::vec(1usize..100, 2..6),
        current in 1usize..300,
        scale in 1usize..12,
    ) {
        let w = base.len();
        let mut counts = std::collections::BTreeMap::new();
        let mut scaled = std::collections::BTreeMap::new();
        for (j, &c) in base.iter().enumerate() {
            counts.insert(j, c);
            scaled.insert(j, c * scale);
        }
        counts.insert(w, current);
        scaled.insert(w, current * scale);
        let a = events::volume_indicator(&counts, w, w).unwrap();
        let b = events::volume_indicator(&scaled, w, w).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn adding_a_sentiment_match_moves_the_score_monotonically(
        text in "[a-z ]{0,30}",
    ) {
        let lex = Lexicon::bundled_mini();
        let before = sentiment::score_message(&text, &lex);
        // Two neutral filler tokens clear any negation window first.
        let pos_text = format!("{text} zz zz excellent");
        let after = sentiment::score_message(&pos_text, &lex);
        prop_assert!(after.pos >= before.pos);
        prop_assert_eq!(after.neg, before.neg);

        let neg_text = format!("{text} zz zz horrible");
        let after = sentiment::score_message(&neg_text, &lex);
        prop_assert!(after.neg <= before.neg);
        prop_assert_eq!(after.pos, before.pos);
    }
}
