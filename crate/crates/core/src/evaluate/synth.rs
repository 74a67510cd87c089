//! Synthetic stream generation with planted topics, volume bursts and
//! sentiment shocks, plus per-message ground-truth labels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Microblog;

/// One planted topic: a weighted term distribution and a per-batch base
/// message rate. `pos_word_rate` / `neg_word_rate` give the fraction of
/// messages that carry one sentiment token.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicSpec {
    pub name: String,
    pub terms: Vec<String>,
    /// Sampling weights aligned with `terms`; uniform when omitted.
    #[serde(default)]
    pub term_weights: Option<Vec<f64>>,
    pub base_messages: usize,
    #[serde(default)]
    pub pos_word_rate: f64,
    #[serde(default)]
    pub neg_word_rate: f64,
}

/// A per-batch disturbance of one topic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Injection {
    pub batch: usize,
    /// Topic index (arrivals continue the numbering after `topics`).
    pub topic: usize,
    #[serde(default = "default_mult")]
    pub volume_mult: f64,
    #[serde(default)]
    pub pos_rate_shift: f64,
    #[serde(default)]
    pub neg_rate_shift: f64,
}

fn default_mult() -> f64 {
    1.0
}

/// A topic that starts emitting at a given batch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arrival {
    pub batch: usize,
    pub topic: TopicSpec,
}

/// Full description of a synthetic stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub topics: Vec<TopicSpec>,
    #[serde(default)]
    pub background_terms: Vec<String>,
    /// Per-token probability of drawing from the background vocabulary.
    #[serde(default)]
    pub noise_rate: f64,
    pub batches: usize,
    #[serde(default = "default_delta_t")]
    pub delta_t_secs: u64,
    #[serde(default)]
    pub start_epoch: i64,
    #[serde(default)]
    pub injections: Vec<Injection>,
    #[serde(default)]
    pub arrivals: Vec<Arrival>,
    pub rng_seed: u64,
    /// Token appended to positive-sentiment messages; must be a word the
    /// scoring lexicon knows.
    #[serde(default = "default_pos_token")]
    pub pos_token: String,
    /// Token appended to negative-sentiment messages.
    #[serde(default = "default_neg_token")]
    pub neg_token: String,
}

fn default_delta_t() -> u64 {
    7 * 24 * 3600
}

fn default_pos_token() -> String {
    "love".to_string()
}

fn default_neg_token() -> String {
    "terrible".to_string()
}

/// Ground-truth label for one generated message.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub id: String,
    pub topic: usize,
    pub batch: usize,
}

struct ActiveTopic<'a> {
    index: usize,
    spec: &'a TopicSpec,
    cumulative: Vec<f64>,
}

fn cumulative_weights(spec: &TopicSpec) -> Vec<f64> {
    let weights: Vec<f64> = match &spec.term_weights {
        Some(w) => w.clone(),
        None => vec![1.0; spec.terms.len()],
    };
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w.max(0.0);
            acc
        })
        .collect()
}

fn weighted_choice<'a>(terms: &'a [String], cumulative: &[f64], rng: &mut ChaCha8Rng) -> &'a str {
    let total = *cumulative.last().expect("non-empty term distribution");
    let x = rng.random::<f64>() * total;
    let idx = cumulative.partition_point(|&c| c <= x).min(terms.len() - 1);
    &terms[idx]
}

/// Generates the stream described by `spec`: per batch, each active topic
/// emits `base * multiplier` messages of 5-12 tokens sampled from its
/// distribution (tokens swap to background noise at `noise_rate`), with
/// sentiment tokens appended at the configured rates. Output is
/// deterministic per seed.
pub fn generate(spec: &SyntheticSpec) -> (Vec<Microblog>, Vec<GroundTruth>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut messages = Vec::new();
    let mut truth = Vec::new();
    let background_cum: Vec<f64> = {
        let mut acc = 0.0;
        spec.background_terms
            .iter()
            .map(|_| {
                acc += 1.0;
                acc
            })
            .collect()
    };

    for batch in 0..spec.batches {
        let mut active: Vec<ActiveTopic> = spec
            .topics
            .iter()
            .enumerate()
            .map(|(index, spec)| ActiveTopic {
                index,
                spec,
                cumulative: cumulative_weights(spec),
            })
            .collect();
        for (k, arrival) in spec.arrivals.iter().enumerate() {
            if arrival.batch <= batch {
                active.push(ActiveTopic {
                    index: spec.topics.len() + k,
                    spec: &arrival.topic,
                    cumulative: cumulative_weights(&arrival.topic),
                });
            }
        }

        let mut seq_in_batch: u64 = 0;
        for topic in &active {
            let mut mult = 1.0;
            let mut pos_rate = topic.spec.pos_word_rate;
            let mut neg_rate = topic.spec.neg_word_rate;
            for inj in &spec.injections {
                if inj.batch == batch && inj.topic == topic.index {
                    mult *= inj.volume_mult;
                    pos_rate += inj.pos_rate_shift;
                    neg_rate += inj.neg_rate_shift;
                }
            }
            let count = (topic.spec.base_messages as f64 * mult).round() as usize;
            for m in 0..count {
                let len = rng.random_range(5..=12usize);
                let mut tokens: Vec<String> = Vec::with_capacity(len + 2);
                for _ in 0..len {
                    let from_background =
                        !spec.background_terms.is_empty() && rng.random::<f64>() < spec.noise_rate;
                    let term = if from_background {
                        weighted_choice(&spec.background_terms, &background_cum, &mut rng)
                    } else {
                        weighted_choice(&topic.spec.terms, &topic.cumulative, &mut rng)
                    };
                    tokens.push(term.to_string());
                }
                if rng.random::<f64>() < pos_rate.clamp(0.0, 1.0) {
                    tokens.push(spec.pos_token.clone());
                }
                if rng.random::<f64>() < neg_rate.clamp(0.0, 1.0) {
                    tokens.push(spec.neg_token.clone());
                }
                let id = format!("b{batch}t{}m{m}", topic.index);
                let timestamp = spec.start_epoch
                    + batch as i64 * spec.delta_t_secs as i64
                    + (seq_in_batch % spec.delta_t_secs.max(1)) as i64;
                seq_in_batch += 1;
                messages.push(Microblog {
                    id: id.clone(),
                    timestamp,
                    text: tokens.join(" "),
                });
                truth.push(GroundTruth {
                    id,
                    topic: topic.index,
                    batch,
                });
            }
        }
    }
    (messages, truth)
}

/// Builds a topic over `n_terms` synthetic terms named
/// `<prefix>w0..<prefix>w{n-1}`.
pub fn simple_topic(prefix: &str, n_terms: usize, base_messages: usize) -> TopicSpec {
    TopicSpec {
        name: prefix.to_string(),
        terms: (0..n_terms).map(|i| format!("{prefix}w{i}")).collect(),
        term_weights: None,
        base_messages,
        pos_word_rate: 0.0,
        neg_word_rate: 0.0,
    }
}
