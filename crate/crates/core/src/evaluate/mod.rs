//! Evaluation tooling: topic coherence, segment purity, a synthetic stream
//! generator with planted topics and bursts, and independent brute-force
//! oracles for cross-checking the pipeline.

pub mod oracle;
pub mod synth;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::pathways::TopicSegment;

/// Document frequencies for coherence scoring: for each term, the sorted
/// set of document ordinals containing it. Documents are individual
/// messages of the analyzed corpus.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DocTermIndex {
    postings: BTreeMap<String, Vec<u32>>,
    doc_count: u32,
}

impl DocTermIndex {
    pub fn new() -> Self {
        DocTermIndex::default()
    }

    /// Registers one document's term set (duplicates within the document
    /// collapse) and returns its ordinal.
    pub fn add_document<I, S>(&mut self, terms: I) -> u32
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ordinal = self.doc_count;
        self.doc_count += 1;
        let unique: std::collections::BTreeSet<String> =
            terms.into_iter().map(Into::into).collect();
        for term in unique {
            self.postings.entry(term).or_default().push(ordinal);
        }
        ordinal
    }

    pub fn doc_count(&self) -> u32 {
        self.doc_count
    }

    /// D(v): documents containing the term.
    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    /// D(v, v'): documents containing both terms.
    pub fn co_doc_freq(&self, a: &str, b: &str) -> usize {
        let (Some(pa), Some(pb)) = (self.postings.get(a), self.postings.get(b)) else {
            return 0;
        };
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < pa.len() && j < pb.len() {
            match pa[i].cmp(&pb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }
}

/// Log co-occurrence coherence of an ordered top-term list:
/// `sum_{t=2..n} sum_{l=1..t-1} ln((D(v_t, v_l) + 1) / D(v_l))`, natural
/// log, with `D(v_l)` clamped to at least 1. Fewer than two terms score 0.
pub fn topic_coherence(terms: &[String], index: &DocTermIndex) -> f64 {
    let mut sum = 0.0;
    for t in 1..terms.len() {
        for l in 0..t {
            let co = index.co_doc_freq(&terms[t], &terms[l]) as f64;
            let d = index.doc_freq(&terms[l]).max(1) as f64;
            sum += ((co + 1.0) / d).ln();
        }
    }
    sum
}

/// One coherence point per `n` in `[n_lo, n_hi]`, using the scope's top-n
/// terms. The curve stops where the ranked term list runs out; scopes with
/// fewer than two distinct terms yield an empty series.
pub fn coherence_curve(
    ranked_terms: &[String],
    index: &DocTermIndex,
    n_lo: usize,
    n_hi: usize,
) -> Vec<(usize, f64)> {
    let n_lo = n_lo.max(2);
    let n_hi = n_hi.min(ranked_terms.len());
    if n_hi < n_lo {
        return Vec::new();
    }
    // Incremental evaluation: adding term t contributes its pairs with all
    // earlier terms.
    let mut out = Vec::with_capacity(n_hi - n_lo + 1);
    let mut sum = 0.0;
    for t in 1..n_hi {
        for l in 0..t {
            let co = index.co_doc_freq(&ranked_terms[t], &ranked_terms[l]) as f64;
            let d = index.doc_freq(&ranked_terms[l]).max(1) as f64;
            sum += ((co + 1.0) / d).ln();
        }
        let n = t + 1;
        if n >= n_lo {
            out.push((n, sum));
        }
    }
    out
}

/// Fraction of a segment's messages sharing the majority ground-truth
/// topic, averaged (unweighted) over segments. Messages absent from the
/// truth table are ignored; segments with no labeled messages are skipped.
pub fn mean_segment_purity<'a, I>(segments: I, truth: &HashMap<String, usize>) -> f64
where
    I: IntoIterator<Item = &'a TopicSegment>,
{
    let mut purities = Vec::new();
    for seg in segments {
        let mut by_topic: BTreeMap<usize, usize> = BTreeMap::new();
        let mut labeled = 0usize;
        for id in &seg.message_ids {
            if let Some(&topic) = truth.get(id) {
                *by_topic.entry(topic).or_insert(0) += 1;
                labeled += 1;
            }
        }
        if labeled == 0 {
            continue;
        }
        let majority = by_topic.values().copied().max().unwrap_or(0);
        purities.push(majority as f64 / labeled as f64);
    }
    if purities.is_empty() {
        return 0.0;
    }
    purities.iter().sum::<f64>() / purities.len() as f64
}
