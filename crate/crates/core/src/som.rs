//! Growing self-organizing feature map.
//!
//! A 2-D rectangular lattice of weight-vector nodes trained by competitive
//! learning. Each presentation updates the best-matching node and its
//! direct lattice neighbors and accrues the pre-update quantisation error
//! on the winner; when a node's accumulated error reaches the growth
//! threshold, new nodes attach at its free adjacent positions and the
//! error resets. Maps either start as a random 2x2 lattice or as a single
//! node seeded from a previous layer's cluster representation vector.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecspace::{self, SparseVector, Vocabulary};

/// Training knobs for one feature map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SomConfig {
    /// Initial learning rate, in (0,1).
    pub learning_rate: f64,
    /// Geometric learning-rate decay per epoch, in (0,1].
    pub lr_decay: f64,
    /// Spread factor in (0,1); lower values grow larger maps.
    pub spread_factor: f64,
    /// Fixed growth threshold; when unset it is derived from the spread
    /// factor and the training set's sparsity.
    pub growth_threshold_override: Option<f64>,
    /// Learning epochs.
    pub epochs: usize,
    /// Minimum calibration hits for a node to emit a cluster
    /// representation vector.
    pub min_crv_hits: usize,
    pub rng_seed: u64,
}

impl Default for SomConfig {
    fn default() -> Self {
        SomConfig {
            learning_rate: 0.3,
            lr_decay: 0.9,
            spread_factor: 0.5,
            growth_threshold_override: None,
            epochs: 5,
            min_crv_hits: 3,
            rng_seed: 42,
        }
    }
}

impl SomConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate < 1.0) {
            return Err(Error::Config("som.learning_rate must be in (0,1)".into()));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::Config("som.lr_decay must be in (0,1]".into()));
        }
        if !(self.spread_factor > 0.0 && self.spread_factor < 1.0) {
            return Err(Error::Config("som.spread_factor must be in (0,1)".into()));
        }
        if let Some(gt) = self.growth_threshold_override {
            if !gt.is_finite() || gt < 0.0 {
                return Err(Error::Config("som.growth_threshold must be >= 0".into()));
            }
        }
        if self.epochs == 0 {
            return Err(Error::Config("som.epochs must be >= 1".into()));
        }
        if self.min_crv_hits == 0 {
            return Err(Error::Config("som.min_crv_hits must be >= 1".into()));
        }
        Ok(())
    }
}

/// Lattice position, addressed as (x, y). Orderings use (y, x) so row-major
/// scans break ties.
pub type Pos = (i32, i32);

fn pos_key(p: Pos) -> (i32, i32) {
    (p.1, p.0)
}

const NEIGHBOR_OFFSETS: [(i32, i32); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];

/// One lattice node.
#[derive(Debug, Clone)]
pub struct Node {
    pub pos: Pos,
    /// Sparse weights over the map vocabulary.
    pub weights: Vec<(u32, f64)>,
    /// Accumulated quantisation error.
    pub total_error: f64,
}

/// How a map was created.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapOrigin {
    Random,
    /// Seeded from the cluster representation vector with this id.
    Seeded(u64),
}

/// A growing 2-D feature map over one batch vocabulary.
#[derive(Debug, Clone)]
pub struct FeatureMap {
    vocab: Arc<Vocabulary>,
    nodes: Vec<Node>,
    by_pos: HashMap<Pos, usize>,
    pub origin: MapOrigin,
    /// Set when a seeded map's source vector shared no terms with the batch
    /// vocabulary; the start node carries zero weights.
    pub seed_overlap_empty: bool,
}

/// What one training presentation did.
#[derive(Debug, Clone)]
pub struct PresentOutcome {
    pub bmu: Pos,
    /// Quantisation error added to the winner (pre-update distance).
    pub error_added: f64,
    /// Positions of nodes created by growth at this step.
    pub grown: Vec<Pos>,
}

impl FeatureMap {
    /// Initializes the standard 2x2 random map. Weights are drawn uniformly
    /// from the unit interval, but only for features observed in the batch's vectors so
    /// huge vocabularies stay sparse.
    pub fn init_random(
        vocab: Arc<Vocabulary>,
        observed_features: &[u32],
        cfg: &SomConfig,
    ) -> Result<FeatureMap> {
        if vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let mut features: Vec<u32> = observed_features.to_vec();
        features.sort_unstable();
        features.dedup();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let mut map = FeatureMap {
            vocab,
            nodes: Vec::with_capacity(4),
            by_pos: HashMap::new(),
            origin: MapOrigin::Random,
            seed_overlap_empty: false,
        };
        for pos in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            let weights = features
                .iter()
                .map(|&id| (id, rng.random::<f64>()))
                .filter(|&(_, w)| w != 0.0)
                .collect();
            map.insert_node(Node {
                pos,
                weights,
                total_error: 0.0,
            });
        }
        Ok(map)
    }

    /// Initializes a single-node map whose start weights are a previous
    /// layer's cluster representation vector translated into the batch
    /// vocabulary: terms absent from the batch vocabulary are dropped and
    /// batch terms absent from the vector stay zero. An empty translation
    /// still yields a map, flagged via `seed_overlap_empty`.
    pub fn init_seeded(
        crv_weights: &SparseVector,
        crv_id: u64,
        batch_vocab: Arc<Vocabulary>,
    ) -> FeatureMap {
        let mut weights: Vec<(u32, f64)> = crv_weights
            .term_weights()
            .filter_map(|(term, w)| batch_vocab.id_of(term).map(|id| (id, w)))
            .collect();
        weights.sort_unstable_by_key(|&(id, _)| id);
        let empty = weights.is_empty();
        let mut map = FeatureMap {
            vocab: batch_vocab,
            nodes: Vec::with_capacity(1),
            by_pos: HashMap::new(),
            origin: MapOrigin::Seeded(crv_id),
            seed_overlap_empty: empty,
        };
        map.insert_node(Node {
            pos: (0, 0),
            weights,
            total_error: 0.0,
        });
        map
    }

    fn insert_node(&mut self, node: Node) {
        let idx = self.nodes.len();
        self.by_pos.insert(node.pos, idx);
        self.nodes.push(node);
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn neighbor_indices(&self, pos: Pos) -> Vec<usize> {
        NEIGHBOR_OFFSETS
            .iter()
            .filter_map(|&(dx, dy)| self.by_pos.get(&(pos.0 + dx, pos.1 + dy)).copied())
            .collect()
    }

    /// Finds the node nearest to `v` by Euclidean distance, ties broken by
    /// smallest (y, x) position.
    pub fn best_matching_node(&self, v: &SparseVector) -> Result<Pos> {
        self.best_matching_index(v.entries())
            .map(|i| self.nodes[i].pos)
    }

    fn best_matching_index(&self, entries: &[(u32, f64)]) -> Result<usize> {
        if self.nodes.is_empty() {
            return Err(Error::EmptyMap);
        }
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, node) in self.nodes.iter().enumerate() {
            let d = vecspace::sq_distance(entries, &node.weights);
            if d < best_d || (d == best_d && pos_key(node.pos) < pos_key(self.nodes[best].pos)) {
                best = i;
                best_d = d;
            }
        }
        Ok(best)
    }

    /// One training presentation: find the BMU, move it and its direct
    /// lattice neighbors toward `v` by `lr`, accrue the pre-update distance
    /// as quantisation error, and grow when the winner's error reaches
    /// `growth_threshold`.
    pub fn present(
        &mut self,
        v: &SparseVector,
        lr: f64,
        growth_threshold: f64,
    ) -> Result<PresentOutcome> {
        let entries = v.entries();
        let bmu_idx = self.best_matching_index(entries)?;
        let bmu_pos = self.nodes[bmu_idx].pos;
        let error = vecspace::sq_distance(entries, &self.nodes[bmu_idx].weights).sqrt();

        let mut to_update = self.neighbor_indices(bmu_pos);
        to_update.push(bmu_idx);
        for idx in to_update {
            let w = &mut self.nodes[idx].weights;
            *w = blend_toward(w, entries, lr);
        }

        self.nodes[bmu_idx].total_error += error;
        let mut grown = Vec::new();
        if self.nodes[bmu_idx].total_error >= growth_threshold {
            grown = self.grow_around(bmu_pos);
            self.nodes[bmu_idx].total_error = 0.0;
        }
        Ok(PresentOutcome {
            bmu: bmu_pos,
            error_added: error,
            grown,
        })
    }

    /// Attaches new nodes at every free position adjacent to `pos`, each
    /// initialized to the mean of its existing lattice neighbors.
    fn grow_around(&mut self, pos: Pos) -> Vec<Pos> {
        let free: Vec<Pos> = NEIGHBOR_OFFSETS
            .iter()
            .map(|&(dx, dy)| (pos.0 + dx, pos.1 + dy))
            .filter(|p| !self.by_pos.contains_key(p))
            .collect();
        let mut grown = Vec::with_capacity(free.len());
        for p in free {
            let neighbors = self.neighbor_indices(p);
            let weights = self.mean_weights(&neighbors);
            self.insert_node(Node {
                pos: p,
                weights,
                total_error: 0.0,
            });
            grown.push(p);
        }
        grown
    }

    fn mean_weights(&self, indices: &[usize]) -> Vec<(u32, f64)> {
        if indices.is_empty() {
            return Vec::new();
        }
        let mut sums: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
        for &i in indices {
            for &(id, w) in &self.nodes[i].weights {
                *sums.entry(id).or_insert(0.0) += w;
            }
        }
        let n = indices.len() as f64;
        sums.into_iter()
            .map(|(id, s)| (id, s / n))
            .filter(|&(_, w)| w != 0.0)
            .collect()
    }

    /// Derives the growth threshold for a training set: the configured
    /// override, or -ln(SF) scaled by the median non-zero count of the
    /// vectors (the effective dimensionality of sparse text).
    pub fn growth_threshold(cfg: &SomConfig, vectors: &[SparseVector]) -> f64 {
        if let Some(gt) = cfg.growth_threshold_override {
            return gt;
        }
        let mut counts: Vec<usize> = vectors.iter().map(|v| v.nnz()).collect();
        if counts.is_empty() {
            return f64::INFINITY;
        }
        counts.sort_unstable();
        let d_eff = if counts.len() % 2 == 1 {
            counts[counts.len() / 2] as f64
        } else {
            (counts[counts.len() / 2 - 1] + counts[counts.len() / 2]) as f64 / 2.0
        };
        -(cfg.spread_factor.ln()) * d_eff
    }

    /// Trains for `cfg.epochs` epochs, presenting the vectors in a
    /// seeded-shuffled order each epoch and decaying the learning rate
    /// geometrically at each epoch end. An empty vector list leaves the map
    /// unchanged.
    pub fn train(&mut self, vectors: &[SparseVector], cfg: &SomConfig) -> Result<()> {
        if vectors.is_empty() {
            return Ok(());
        }
        let gt = FeatureMap::growth_threshold(cfg, vectors);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let mut lr = cfg.learning_rate;
        let mut order: Vec<usize> = (0..vectors.len()).collect();
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                self.present(&vectors[i], lr, gt)?;
            }
            lr *= cfg.lr_decay;
        }
        Ok(())
    }

    /// Assigns each vector to its best-matching node.
    pub fn calibrate<'a, I>(&self, vectors: I) -> Result<CalibrationResult>
    where
        I: IntoIterator<Item = (&'a str, &'a SparseVector)>,
    {
        let mut assignments: std::collections::BTreeMap<(i32, i32), Vec<String>> =
            std::collections::BTreeMap::new();
        for (id, v) in vectors {
            let idx = self.best_matching_index(v.entries())?;
            assignments
                .entry(pos_key(self.nodes[idx].pos))
                .or_default()
                .push(id.to_string());
        }
        Ok(CalibrationResult { assignments })
    }

    /// Max-pools each qualifying hit node with its lattice neighborhood
    /// into a raw cluster representation vector.
    ///
    /// Hit nodes with at least `cfg.min_crv_hits` assignments qualify; when
    /// none does, the single highest-count hit node is used as a fallback.
    /// Output is ordered by descending assignment count, ties by (y, x).
    pub fn generalize(&self, calib: &CalibrationResult, cfg: &SomConfig) -> Vec<RawCrv> {
        let mut hits: Vec<(&(i32, i32), &Vec<String>)> = calib.assignments.iter().collect();
        // Sort by descending count, then (y, x); BTreeMap iteration already
        // yields (y, x) order, and the sort is stable.
        hits.sort_by_key(|h| std::cmp::Reverse(h.1.len()));
        let qualified: Vec<_> = hits
            .iter()
            .filter(|(_, ids)| ids.len() >= cfg.min_crv_hits)
            .collect();
        let selected: Vec<&(&(i32, i32), &Vec<String>)> = if qualified.is_empty() {
            hits.first().into_iter().collect()
        } else {
            qualified
        };
        selected
            .into_iter()
            .map(|&(&(y, x), ids)| {
                let pos = (x, y);
                let idx = self.by_pos[&pos];
                let mut pooled = self.nodes[idx].weights.clone();
                for n in self.neighbor_indices(pos) {
                    pooled = vecspace::max_entries(&pooled, &self.nodes[n].weights);
                }
                let weights = SparseVector::new(Arc::clone(&self.vocab), pooled)
                    .expect("pooled node weights form a valid sparse vector");
                RawCrv {
                    weights,
                    hit_count: ids.len(),
                    hit_node: pos,
                    member_ids: ids.clone(),
                }
            })
            .collect()
    }
}

/// Node assignments from calibrating a map with input vectors, keyed by
/// (y, x) position.
#[derive(Debug, Clone, Default)]
pub struct CalibrationResult {
    assignments: std::collections::BTreeMap<(i32, i32), Vec<String>>,
}

impl CalibrationResult {
    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Hit nodes with their assigned vector ids, in (y, x) order.
    pub fn hits(&self) -> impl Iterator<Item = (Pos, &[String])> + '_ {
        self.assignments
            .iter()
            .map(|(&(y, x), ids)| ((x, y), ids.as_slice()))
    }

    pub fn total_assigned(&self) -> usize {
        self.assignments.values().map(Vec::len).sum()
    }
}

/// A max-pooled hit-node neighborhood, not yet registered as a cluster
/// representation vector.
#[derive(Debug, Clone)]
pub struct RawCrv {
    pub weights: SparseVector,
    pub hit_count: usize,
    pub hit_node: Pos,
    /// Vector ids calibrated onto the hit node.
    pub member_ids: Vec<String>,
}

/// Moves `w` toward `v`: every touched coordinate becomes
/// `w + lr * (v - w)`.
fn blend_toward(w: &[(u32, f64)], v: &[(u32, f64)], lr: f64) -> Vec<(u32, f64)> {
    let mut out = Vec::with_capacity(w.len().max(v.len()));
    let (mut i, mut j) = (0, 0);
    while i < w.len() || j < v.len() {
        let (id, new_w) = match (w.get(i), v.get(j)) {
            (Some(&(iw, ww)), Some(&(iv, wv))) => match iw.cmp(&iv) {
                std::cmp::Ordering::Less => {
                    i += 1;
                    (iw, ww + lr * (0.0 - ww))
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    (iv, lr * wv)
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (iw, ww + lr * (wv - ww))
                }
            },
            (Some(&(iw, ww)), None) => {
                i += 1;
                (iw, ww + lr * (0.0 - ww))
            }
            (None, Some(&(iv, wv))) => {
                j += 1;
                (iv, lr * wv)
            }
            (None, None) => unreachable!(),
        };
        if new_w != 0.0 {
            out.push((id, new_w));
        }
    }
    out
}
