//! Independent brute-force re-implementations of routing and event
//! arithmetic, written against string-keyed dense maps and the raw
//! formulas. These deliberately share no code with the pipeline modules
//! they verify.

use std::collections::{BTreeMap, BTreeSet};

/// A vector for oracle routing: explicit term-keyed weights plus its full
/// vocabulary term set (which can be wider than the non-zero weights).
#[derive(Debug, Clone)]
pub struct OracleVector {
    pub id: String,
    pub weights: BTreeMap<String, f64>,
    pub vocab: BTreeSet<String>,
}

/// A cluster representation vector for oracle routing.
#[derive(Debug, Clone)]
pub struct OracleCrv {
    pub id: u64,
    pub weights: BTreeMap<String, f64>,
    pub vocab: BTreeSet<String>,
}

/// Cosine similarity with the dot product and both norms restricted to the
/// vocabulary intersection, computed directly from term-keyed maps.
pub fn oracle_cosine(
    a_weights: &BTreeMap<String, f64>,
    a_vocab: &BTreeSet<String>,
    b_weights: &BTreeMap<String, f64>,
    b_vocab: &BTreeSet<String>,
) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for term in a_vocab.intersection(b_vocab) {
        let wa = a_weights.get(term).copied().unwrap_or(0.0);
        let wb = b_weights.get(term).copied().unwrap_or(0.0);
        dot += wa * wb;
        na += wa * wa;
        nb += wb * wb;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na.sqrt() * nb.sqrt())).clamp(0.0, 1.0)
    }
}

/// Threshold routing: each vector goes to the CRV of maximal similarity
/// when that maximum strictly exceeds `tau_sim` (ties to the smallest CRV
/// id), otherwise to the new pool.
pub fn oracle_route(
    vectors: &[OracleVector],
    crvs: &[OracleCrv],
    tau_sim: f64,
) -> (BTreeMap<u64, Vec<String>>, Vec<String>) {
    let mut pools: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    let mut new_pool = Vec::new();
    for v in vectors {
        let mut best_sim = f64::NEG_INFINITY;
        let mut best_id = u64::MAX;
        for c in crvs {
            let sim = oracle_cosine(&v.weights, &v.vocab, &c.weights, &c.vocab);
            if sim > best_sim || (sim == best_sim && c.id < best_id) {
                best_sim = sim;
                best_id = c.id;
            }
        }
        if !crvs.is_empty() && best_sim > tau_sim {
            pools.entry(best_id).or_default().push(v.id.clone());
        } else {
            new_pool.push(v.id.clone());
        }
    }
    (pools, new_pool)
}

/// Nearest-CRV assignment with no threshold, as used for topic segments.
pub fn oracle_nearest(vectors: &[OracleVector], crvs: &[OracleCrv]) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for v in vectors {
        let mut best_sim = f64::NEG_INFINITY;
        let mut best_id = u64::MAX;
        for c in crvs {
            let sim = oracle_cosine(&v.weights, &v.vocab, &c.weights, &c.vocab);
            if sim > best_sim || (sim == best_sim && c.id < best_id) {
                best_sim = sim;
                best_id = c.id;
            }
        }
        if !crvs.is_empty() {
            out.insert(v.id.clone(), best_id);
        }
    }
    out
}

/// Volume indicator straight from the formula: current count times `w`
/// over the sum of the `w` previous counts. `history` holds the previous
/// counts, oldest first; `None` when the window is incomplete or broken.
pub fn oracle_volume_indicator(current: usize, history: &[Option<usize>], w: usize) -> Option<f64> {
    if history.len() < w {
        return None;
    }
    let mut sum = 0usize;
    for h in &history[history.len() - w..] {
        match h {
            Some(c) if *c > 0 => sum += c,
            _ => return None,
        }
    }
    Some(current as f64 * w as f64 / sum as f64)
}

/// Sentiment indicator from the formula, on magnitudes.
pub fn oracle_sentiment_indicator(current: f64, history: &[Option<f64>], w: usize) -> Option<f64> {
    if history.len() < w {
        return None;
    }
    let mut sum = 0.0;
    for h in &history[history.len() - w..] {
        sum += (*h)?.abs();
    }
    Some(current.abs() * w as f64 / sum)
}

/// The linear combination of the three indicators.
pub fn oracle_event_score(i_v: f64, i_ps: f64, i_ns: f64, r: (f64, f64, f64)) -> f64 {
    r.0 * i_v + r.1 * i_ps + r.2 * i_ns
}
