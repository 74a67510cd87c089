//! Sparse vectors over per-batch vocabularies.
//!
//! Batches never share a feature space; two vectors are compared through
//! the intersection of their vocabularies, matching terms by string. The
//! dot product and both norms of the cosine are restricted to that
//! intersection, so identical shared content scores 1.0 regardless of
//! what else either vocabulary contains.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A frozen term space for one batch: a bijection between term strings and
/// dense feature ids `0..len()`. Ids are assigned by lexicographic term
/// order, so identical batch content always yields identical ids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vocabulary {
    terms: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    /// Builds a vocabulary from an arbitrary term collection. Terms are
    /// deduplicated and sorted; ids follow the sorted order.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut terms: Vec<String> = terms.into_iter().map(Into::into).collect();
        terms.sort_unstable();
        terms.dedup();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { terms, index }
    }

    /// Rebuilds the term index after deserialization.
    pub(crate) fn rebuild_index(&mut self) {
        self.index = self
            .terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id_of(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn term_of(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

/// A sparse non-negative vector tied to one [`Vocabulary`].
///
/// Entries are `(feature id, weight)` pairs with strictly increasing ids
/// and no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    vocab: Arc<Vocabulary>,
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Builds a vector from unsorted `(id, weight)` pairs. Zero weights are
    /// dropped; duplicate ids and out-of-range ids or negative weights are
    /// rejected.
    pub fn new(vocab: Arc<Vocabulary>, mut entries: Vec<(u32, f64)>) -> Result<Self> {
        entries.retain(|&(_, w)| w != 0.0);
        entries.sort_unstable_by_key(|&(id, _)| id);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::Config(format!(
                    "duplicate feature id {} in sparse vector",
                    pair[0].0
                )));
            }
        }
        for &(id, w) in &entries {
            if id as usize >= vocab.len() {
                return Err(Error::Config(format!(
                    "feature id {id} out of range for vocabulary of size {}",
                    vocab.len()
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Config(format!(
                    "invalid weight {w} for feature {id}"
                )));
            }
        }
        Ok(SparseVector { vocab, entries })
    }

    /// Builds a vector directly from term strings and weights, skipping
    /// terms absent from the vocabulary.
    pub fn from_term_weights(vocab: Arc<Vocabulary>, weights: &[(&str, f64)]) -> Result<Self> {
        let entries = weights
            .iter()
            .filter_map(|&(term, w)| vocab.id_of(term).map(|id| (id, w)))
            .collect();
        SparseVector::new(vocab, entries)
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Iterates entries as `(term, weight)` pairs.
    pub fn term_weights(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.entries
            .iter()
            .map(move |&(id, w)| (self.vocab.term_of(id), w))
    }
}

fn same_vocab(a: &SparseVector, b: &SparseVector) -> bool {
    Arc::ptr_eq(&a.vocab, &b.vocab)
}

/// Dot product of two entry lists over the same vocabulary.
fn dot_same_vocab(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Squared Euclidean distance between two entry lists over the same
/// vocabulary, walking the union of their ids.
pub(crate) fn sq_distance(a: &[(u32, f64)], b: &[(u32, f64)]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        let d = match (a.get(i), b.get(j)) {
            (Some(&(ia, wa)), Some(&(ib, wb))) => match ia.cmp(&ib) {
                std::cmp::Ordering::Less => {
                    i += 1;
                    wa
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    wb
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    wa - wb
                }
            },
            (Some(&(_, wa)), None) => {
                i += 1;
                wa
            }
            (None, Some(&(_, wb))) => {
                j += 1;
                wb
            }
            (None, None) => unreachable!(),
        };
        acc += d * d;
    }
    acc
}

/// Euclidean distance between two sparse vectors sharing one vocabulary.
pub fn euclidean_distance(a: &SparseVector, b: &SparseVector) -> f64 {
    debug_assert!(same_vocab(a, b), "distance requires a shared vocabulary");
    sq_distance(&a.entries, &b.entries).sqrt()
}

/// Cosine similarity restricted to the intersection of the two vectors'
/// vocabularies.
///
/// Terms are matched by string and mapped through each vocabulary; the dot
/// product and both norms use only terms present in both vocabularies.
/// Returns 0 when the intersection is empty or either restricted norm is 0.
/// With non-negative weights the result lies in `[0, 1]`.
pub fn intersection_cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let (dot, norm_a_sq, norm_b_sq) = if same_vocab(a, b) {
        let dot = dot_same_vocab(&a.entries, &b.entries);
        let na: f64 = a.entries.iter().map(|&(_, w)| w * w).sum();
        let nb: f64 = b.entries.iter().map(|&(_, w)| w * w).sum();
        (dot, na, nb)
    } else {
        // Restricted norms count every entry whose term exists in the other
        // vocabulary, even if the other vector stores no weight for it.
        let mut dot = 0.0;
        let mut na = 0.0;
        for &(id, w) in &a.entries {
            let term = a.vocab.term_of(id);
            if let Some(other_id) = b.vocab.id_of(term) {
                na += w * w;
                if let Ok(k) = b.entries.binary_search_by_key(&other_id, |&(i, _)| i) {
                    dot += w * b.entries[k].1;
                }
            }
        }
        let mut nb = 0.0;
        for &(id, w) in &b.entries {
            if a.vocab.id_of(b.vocab.term_of(id)).is_some() {
                nb += w * w;
            }
        }
        (dot, na, nb)
    };
    if norm_a_sq == 0.0 || norm_b_sq == 0.0 {
        return 0.0;
    }
    let sim = dot / (norm_a_sq.sqrt() * norm_b_sq.sqrt());
    sim.clamp(0.0, 1.0)
}

/// Elementwise maximum over a non-empty set of vectors sharing one
/// vocabulary: result entry `k` is the largest weight any input stores at
/// `k`, with absent entries treated as 0.
pub fn max_pool<'a, I>(vectors: I) -> Result<SparseVector>
where
    I: IntoIterator<Item = &'a SparseVector>,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or(Error::EmptyPool)?;
    let mut acc: Vec<(u32, f64)> = first.entries.clone();
    for v in iter {
        debug_assert!(
            same_vocab(first, v),
            "max_pool requires a shared vocabulary"
        );
        acc = max_entries(&acc, &v.entries);
    }
    Ok(SparseVector {
        vocab: Arc::clone(&first.vocab),
        entries: acc,
    })
}

/// Elementwise max of two sorted entry lists.
pub(crate) fn max_entries(a: &[(u32, f64)], b: &[(u32, f64)]) -> Vec<(u32, f64)> {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ia, wa)), Some(&(ib, wb))) => match ia.cmp(&ib) {
                std::cmp::Ordering::Less => {
                    out.push((ia, wa));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((ib, wb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((ia, wa.max(wb)));
                    i += 1;
                    j += 1;
                }
            },
            (Some(&e), None) => {
                out.push(e);
                i += 1;
            }
            (None, Some(&e)) => {
                out.push(e);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}
