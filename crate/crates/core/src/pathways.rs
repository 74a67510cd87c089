//! Topic pathway separation across batch layers.
//!
//! Each batch forms one layer. Vectors are routed against the most recent
//! cluster representation vector (CRV) of every live pathway: a vector
//! trains the matching pathway's seeded map when its best similarity
//! strictly exceeds `tau_sim`, otherwise it joins the pool that trains one
//! fresh randomly initialised map. Generalising the trained maps yields the
//! layer's CRVs; the CRV with the largest calibration mass continues its
//! parent's pathway while siblings branch into new pathways, and every CRV
//! of the random map starts a fresh pathway. Topic segments then assign
//! each vectorized message to its nearest same-layer CRV, threshold-free.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::som::{FeatureMap, SomConfig};
use crate::vecspace::{intersection_cosine, SparseVector};

/// Layer routing and reporting knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerConfig {
    /// Similarity threshold gating pathway continuation (strict `>`).
    pub tau_sim: f64,
    /// Smallest new-pool size that still trains the fresh random map.
    pub min_spawn_size: usize,
    /// Terms reported per segment or pathway.
    pub top_terms_n: usize,
    /// Layers a pathway may go without a new CRV before it stops routing.
    pub retire_after: usize,
}

impl Default for LayerConfig {
    fn default() -> Self {
        LayerConfig {
            tau_sim: 0.4,
            min_spawn_size: 1,
            top_terms_n: 10,
            retire_after: 4,
        }
    }
}

impl LayerConfig {
    pub fn validate(&self) -> crate::error::Result<()> {
        if !(0.0..=1.0).contains(&self.tau_sim) {
            return Err(crate::error::Error::Config(
                "layer.tau_sim must be in [0,1]".into(),
            ));
        }
        if self.min_spawn_size == 0 {
            return Err(crate::error::Error::Config(
                "layer.min_spawn_size must be >= 1".into(),
            ));
        }
        if self.top_terms_n == 0 {
            return Err(crate::error::Error::Config(
                "layer.top_terms_n must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// A max-pooled cluster summary: one link in a pathway's chain.
#[derive(Debug, Clone)]
pub struct ClusterRepVector {
    pub id: u64,
    /// Batch index of the layer that produced this CRV.
    pub layer: usize,
    pub weights: SparseVector,
    pub parent: Option<u64>,
    pub pathway_id: u64,
}

/// One batch's slice of a pathway.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicSegment {
    pub pathway_id: u64,
    pub batch_index: usize,
    pub message_ids: Vec<String>,
    pub term_freqs: BTreeMap<String, u64>,
    pub avg_pos_sent: Option<f64>,
    pub avg_neg_sent: Option<f64>,
}

impl TopicSegment {
    pub fn count(&self) -> usize {
        self.message_ids.len()
    }

    /// Top-n terms by frequency, ties broken lexicographically.
    pub fn top_terms(&self, n: usize) -> Vec<(String, u64)> {
        rank_terms(self.term_freqs.iter().map(|(t, &c)| (t.clone(), c)), n)
    }
}

/// A chain of topic segments linked through CRV lineage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicPathway {
    pub id: u64,
    pub spawn_batch: usize,
    /// The pathway this one branched from, when not spawned by the random
    /// map.
    pub parent_pathway: Option<u64>,
    pub segments: Vec<TopicSegment>,
    pub crv_chain: Vec<u64>,
}

impl TopicPathway {
    pub fn segment_at(&self, batch_index: usize) -> Option<&TopicSegment> {
        self.segments
            .binary_search_by_key(&batch_index, |s| s.batch_index)
            .ok()
            .map(|i| &self.segments[i])
    }

    /// Aggregated term frequencies across all segments.
    pub fn term_freqs(&self) -> BTreeMap<String, u64> {
        let mut out = BTreeMap::new();
        for seg in &self.segments {
            for (t, &c) in &seg.term_freqs {
                *out.entry(t.clone()).or_insert(0) += c;
            }
        }
        out
    }

    /// Top-n terms aggregated across segments, ties lexicographic.
    pub fn top_terms(&self, n: usize) -> Vec<(String, u64)> {
        rank_terms(self.term_freqs().into_iter(), n)
    }

    pub fn message_count(&self) -> usize {
        self.segments.iter().map(TopicSegment::count).sum()
    }
}

fn rank_terms<I>(freqs: I, n: usize) -> Vec<(String, u64)>
where
    I: Iterator<Item = (String, u64)>,
{
    let mut all: Vec<(String, u64)> = freqs.collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(n);
    all
}

/// Percentage of a term's total occurrences (across all the given
/// pathways' segments) that fall in each pathway. All zeros when the term
/// is absent everywhere.
pub fn term_distribution(term: &str, pathways: &[&TopicPathway]) -> BTreeMap<u64, f64> {
    let counts: BTreeMap<u64, u64> = pathways
        .iter()
        .map(|p| (p.id, p.term_freqs().get(term).copied().unwrap_or(0)))
        .collect();
    let total: u64 = counts.values().sum();
    counts
        .into_iter()
        .map(|(id, c)| {
            let pct = if total == 0 {
                0.0
            } else {
                100.0 * c as f64 / total as f64
            };
            (id, pct)
        })
        .collect()
}

/// How one batch's vectors split across the previous layer's CRVs.
#[derive(Debug, Clone, Default)]
pub struct RoutingOutcome {
    /// CRV id -> indices into the input vector list.
    pub pools: BTreeMap<u64, Vec<usize>>,
    /// Indices routed to the fresh random map.
    pub new_pool: Vec<usize>,
}

/// Routes each vector to the CRV of maximal intersection cosine when that
/// maximum strictly exceeds `tau_sim`, otherwise to the new pool. Argmax
/// ties break toward the smallest CRV id; with no previous CRVs everything
/// lands in the new pool.
pub fn route_batch(
    vectors: &[(String, SparseVector)],
    prev_crvs: &[ClusterRepVector],
    cfg: &LayerConfig,
) -> RoutingOutcome {
    let mut out = RoutingOutcome::default();
    for (i, (_, v)) in vectors.iter().enumerate() {
        let mut best: Option<(f64, u64)> = None;
        for crv in prev_crvs {
            let sim = intersection_cosine(v, &crv.weights);
            let better = match best {
                None => true,
                Some((bs, bid)) => sim > bs || (sim == bs && crv.id < bid),
            };
            if better {
                best = Some((sim, crv.id));
            }
        }
        match best {
            Some((sim, id)) if sim > cfg.tau_sim => out.pools.entry(id).or_default().push(i),
            _ => out.new_pool.push(i),
        }
    }
    out
}

/// Assigns every vectorized message to its single nearest layer CRV by
/// intersection cosine (no threshold; ties toward the smallest CRV id) and
/// aggregates message ids and term frequencies. Empty segments are not
/// materialized.
pub fn build_segments(
    vectors: &[(String, SparseVector)],
    layer_crvs: &[ClusterRepVector],
    batch_index: usize,
) -> Vec<TopicSegment> {
    if layer_crvs.is_empty() {
        return Vec::new();
    }
    let mut members: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, (_, v)) in vectors.iter().enumerate() {
        if v.is_empty() {
            continue;
        }
        let mut best: Option<(f64, u64)> = None;
        for crv in layer_crvs {
            let sim = intersection_cosine(v, &crv.weights);
            let better = match best {
                None => true,
                Some((bs, bid)) => sim > bs || (sim == bs && crv.id < bid),
            };
            if better {
                best = Some((sim, crv.id));
            }
        }
        members
            .entry(best.expect("at least one CRV").1)
            .or_default()
            .push(i);
    }
    let pathway_of: BTreeMap<u64, u64> = layer_crvs.iter().map(|c| (c.id, c.pathway_id)).collect();
    members
        .into_iter()
        .map(|(crv_id, idxs)| {
            let mut term_freqs: BTreeMap<String, u64> = BTreeMap::new();
            let mut message_ids = Vec::with_capacity(idxs.len());
            for i in idxs {
                let (id, v) = &vectors[i];
                message_ids.push(id.clone());
                for (term, w) in v.term_weights() {
                    *term_freqs.entry(term.to_string()).or_insert(0) += w as u64;
                }
            }
            TopicSegment {
                pathway_id: pathway_of[&crv_id],
                batch_index,
                message_ids,
                term_freqs,
                avg_pos_sent: None,
                avg_neg_sent: None,
            }
        })
        .collect()
}

/// What one layer produced.
#[derive(Debug, Clone, Default)]
pub struct LayerOutcome {
    pub crv_ids: Vec<u64>,
    /// Pathways that received a segment this batch.
    pub segmented_pathways: Vec<u64>,
    /// Pathways spawned this batch.
    pub spawned_pathways: Vec<u64>,
}

/// The stateful layer orchestrator: owns pathway identity, lineage, and the
/// live CRVs used for routing.
#[derive(Debug, Clone, Default)]
pub struct PathwayTracker {
    next_crv_id: u64,
    next_pathway_id: u64,
    pathways: BTreeMap<u64, TopicPathway>,
    /// Most recent CRV of each live pathway, ascending by CRV id.
    live: Vec<ClusterRepVector>,
}

impl PathwayTracker {
    pub fn new() -> Self {
        PathwayTracker {
            next_crv_id: 1,
            next_pathway_id: 1,
            pathways: BTreeMap::new(),
            live: Vec::new(),
        }
    }

    pub fn pathways(&self) -> impl Iterator<Item = &TopicPathway> {
        self.pathways.values()
    }

    pub fn pathway(&self, id: u64) -> Option<&TopicPathway> {
        self.pathways.get(&id)
    }

    pub fn pathway_count(&self) -> usize {
        self.pathways.len()
    }

    /// CRVs currently used for routing.
    pub fn live_crvs(&self) -> &[ClusterRepVector] {
        &self.live
    }

    /// Mutable access to the segments created at one batch index, for
    /// filling in sentiment aggregates.
    pub fn segments_at_mut(&mut self, batch_index: usize) -> Vec<&mut TopicSegment> {
        self.pathways
            .values_mut()
            .filter_map(|p| {
                p.segments
                    .iter_mut()
                    .rev()
                    .find(|s| s.batch_index == batch_index)
            })
            .collect()
    }

    /// Learns one layer from a batch's vectors: routes them, trains one
    /// seeded map per matched CRV pool plus one random map over the new
    /// pool, generalises every trained map into this layer's CRVs, assigns
    /// pathway identity, and builds the batch's topic segments.
    pub fn process_layer(
        &mut self,
        batch_index: usize,
        vectors: &[(String, SparseVector)],
        som_cfg: &SomConfig,
        layer_cfg: &LayerConfig,
        base_seed: u64,
    ) -> Result<LayerOutcome> {
        self.live
            .retain(|c| batch_index.saturating_sub(c.layer) <= layer_cfg.retire_after);
        let mut outcome = LayerOutcome::default();
        if vectors.is_empty() {
            return Ok(outcome);
        }
        let batch_vocab = Arc::clone(vectors[0].1.vocab());
        let routing = route_batch(vectors, &self.live, layer_cfg);

        let mut layer_crvs: Vec<ClusterRepVector> = Vec::new();

        // Seeded maps: one per matched CRV pool, in ascending CRV id order.
        for (&parent_crv_id, pool) in &routing.pools {
            let parent = self
                .live
                .iter()
                .find(|c| c.id == parent_crv_id)
                .expect("routing pools reference live CRVs")
                .clone();
            let mut map =
                FeatureMap::init_seeded(&parent.weights, parent.id, Arc::clone(&batch_vocab));
            let training: Vec<SparseVector> = pool.iter().map(|&i| vectors[i].1.clone()).collect();
            let cfg = SomConfig {
                rng_seed: derive_map_seed(base_seed, batch_index as u64, parent.id + 1),
                ..som_cfg.clone()
            };
            map.train(&training, &cfg)?;
            let calib =
                map.calibrate(pool.iter().map(|&i| (vectors[i].0.as_str(), &vectors[i].1)))?;
            let raw = map.generalize(&calib, &cfg);
            for (rank, rc) in raw.into_iter().enumerate() {
                let (pathway_id, fresh) = if rank == 0 {
                    // The heaviest CRV continues the parent's pathway.
                    (parent.pathway_id, false)
                } else {
                    (
                        self.spawn_pathway(batch_index, Some(parent.pathway_id)),
                        true,
                    )
                };
                let crv = ClusterRepVector {
                    id: self.next_crv_id,
                    layer: batch_index,
                    weights: rc.weights,
                    parent: Some(parent.id),
                    pathway_id,
                };
                self.next_crv_id += 1;
                if fresh {
                    outcome.spawned_pathways.push(pathway_id);
                }
                layer_crvs.push(crv);
            }
        }

        // The fresh random map over everything that matched nothing.
        if routing.new_pool.len() >= layer_cfg.min_spawn_size {
            let training: Vec<SparseVector> = routing
                .new_pool
                .iter()
                .map(|&i| vectors[i].1.clone())
                .collect();
            let mut observed: Vec<u32> = training
                .iter()
                .flat_map(|v| v.entries().iter().map(|&(id, _)| id))
                .collect();
            observed.sort_unstable();
            observed.dedup();
            let cfg = SomConfig {
                rng_seed: derive_map_seed(base_seed, batch_index as u64, 0),
                ..som_cfg.clone()
            };
            let mut map = FeatureMap::init_random(Arc::clone(&batch_vocab), &observed, &cfg)?;
            map.train(&training, &cfg)?;
            let calib = map.calibrate(
                routing
                    .new_pool
                    .iter()
                    .map(|&i| (vectors[i].0.as_str(), &vectors[i].1)),
            )?;
            let raw = map.generalize(&calib, &cfg);
            for rc in raw {
                let pathway_id = self.spawn_pathway(batch_index, None);
                let crv = ClusterRepVector {
                    id: self.next_crv_id,
                    layer: batch_index,
                    weights: rc.weights,
                    parent: None,
                    pathway_id,
                };
                self.next_crv_id += 1;
                outcome.spawned_pathways.push(pathway_id);
                layer_crvs.push(crv);
            }
        }

        let segments = build_segments(vectors, &layer_crvs, batch_index);
        for seg in segments {
            outcome.segmented_pathways.push(seg.pathway_id);
            self.pathways
                .get_mut(&seg.pathway_id)
                .expect("segment pathway exists")
                .segments
                .push(seg);
        }

        for crv in layer_crvs {
            outcome.crv_ids.push(crv.id);
            let p = self
                .pathways
                .get_mut(&crv.pathway_id)
                .expect("crv pathway exists");
            p.crv_chain.push(crv.id);
            self.live.retain(|c| c.pathway_id != crv.pathway_id);
            self.live.push(crv);
        }
        self.live.sort_by_key(|c| c.id);
        Ok(outcome)
    }

    fn spawn_pathway(&mut self, batch_index: usize, parent: Option<u64>) -> u64 {
        let id = self.next_pathway_id;
        self.next_pathway_id += 1;
        self.pathways.insert(
            id,
            TopicPathway {
                id,
                spawn_batch: batch_index,
                parent_pathway: parent,
                segments: Vec::new(),
                crv_chain: Vec::new(),
            },
        );
        id
    }

    /// Rebuilds a tracker from snapshot parts.
    pub(crate) fn from_parts(
        next_crv_id: u64,
        next_pathway_id: u64,
        pathways: BTreeMap<u64, TopicPathway>,
        live: Vec<ClusterRepVector>,
    ) -> Self {
        PathwayTracker {
            next_crv_id,
            next_pathway_id,
            pathways,
            live,
        }
    }

    pub(crate) fn parts(&self) -> (u64, u64, &BTreeMap<u64, TopicPathway>, &[ClusterRepVector]) {
        (
            self.next_crv_id,
            self.next_pathway_id,
            &self.pathways,
            &self.live,
        )
    }
}

fn derive_map_seed(base: u64, layer: u64, slot: u64) -> u64 {
    let mut z =
        base ^ layer.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ slot.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
