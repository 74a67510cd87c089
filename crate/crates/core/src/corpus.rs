//! Stream ingestion, time batching, preprocessing and feature extraction.
//!
//! Input messages are sliced into half-open windows `[i*dt, (i+1)*dt)`
//! anchored at the earliest timestamp. Each batch is preprocessed
//! independently (lowercasing, handle removal, stopword removal, in-batch
//! duplicate removal) and turned into term-frequency vectors over a
//! per-batch vocabulary of words and contiguous n-grams that clear a
//! document-frequency threshold.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::vecspace::{SparseVector, Vocabulary};

/// One timestamped short text message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Microblog {
    pub id: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    pub text: String,
}

impl<'de> Deserialize<'de> for Microblog {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        // `timestamp` accepts integer epoch seconds or an RFC-3339 string;
        // unknown fields are ignored.
        #[derive(Deserialize)]
        struct Raw {
            id: String,
            timestamp: serde_json::Value,
            text: String,
        }
        let raw = Raw::deserialize(deserializer)?;
        let timestamp = match &raw.timestamp {
            serde_json::Value::Number(n) => n
                .as_i64()
                .ok_or_else(|| serde::de::Error::custom("timestamp is not an integer"))?,
            serde_json::Value::String(s) => chrono::DateTime::parse_from_rfc3339(s)
                .map_err(|e| serde::de::Error::custom(format!("bad RFC-3339 timestamp: {e}")))?
                .timestamp(),
            _ => {
                return Err(serde::de::Error::custom(
                    "timestamp must be integer or string",
                ))
            }
        };
        if timestamp < 0 {
            return Err(serde::de::Error::custom("timestamp must be non-negative"));
        }
        Ok(Microblog {
            id: raw.id,
            timestamp,
            text: raw.text,
        })
    }
}

/// Batching and feature-extraction knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchConfig {
    /// Window length in seconds.
    pub delta_t_secs: u64,
    /// Minimum per-batch document frequency for a term to become a feature.
    pub min_doc_freq: usize,
    /// Longest contiguous n-gram extracted as a term.
    pub ngram_max: usize,
    pub stopwords: BTreeSet<String>,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            delta_t_secs: 7 * 24 * 3600,
            min_doc_freq: 3,
            ngram_max: 2,
            stopwords: default_stopwords(),
        }
    }
}

/// The built-in English stopword list.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(include_str!("../assets/stopwords_en.txt"))
}

/// Parses a stopword file: one term per line, `#`-prefixed comment lines
/// ignored.
pub fn parse_stopwords(content: &str) -> BTreeSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}

/// One Δt-window slice of the stream.
#[derive(Debug, Clone)]
pub struct Batch {
    pub index: usize,
    /// Window start, seconds since epoch.
    pub start: i64,
    /// Window end (exclusive), seconds since epoch.
    pub end: i64,
    pub messages: Vec<Microblog>,
}

/// A message after preprocessing: normalized word and n-gram source tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedMessage {
    pub id: String,
    pub tokens: Vec<String>,
}

impl TokenizedMessage {
    /// The normalized text used for duplicate detection.
    pub fn normalized_text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Splits messages into half-open `[i*dt, (i+1)*dt)` batches anchored at the
/// earliest timestamp. Empty batches between populated ones are
/// materialized; input order is irrelevant.
pub fn segment_stream(messages: Vec<Microblog>, cfg: &BatchConfig) -> Vec<Batch> {
    let t_min = match messages.iter().map(|m| m.timestamp).min() {
        Some(t) => t,
        None => return Vec::new(),
    };
    segment_stream_anchored(messages, cfg, t_min)
}

/// As [`segment_stream`], but with an explicit window anchor. Messages
/// before the anchor are dropped (they belong to already-processed time).
pub fn segment_stream_anchored(
    mut messages: Vec<Microblog>,
    cfg: &BatchConfig,
    t_min: i64,
) -> Vec<Batch> {
    messages.retain(|m| m.timestamp >= t_min);
    if messages.is_empty() {
        return Vec::new();
    }
    messages.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));
    let dt = cfg.delta_t_secs as i64;
    let last_index = ((messages.last().unwrap().timestamp - t_min) / dt) as usize;
    let mut batches: Vec<Batch> = (0..=last_index)
        .map(|i| Batch {
            index: i,
            start: t_min + i as i64 * dt,
            end: t_min + (i as i64 + 1) * dt,
            messages: Vec::new(),
        })
        .collect();
    for m in messages {
        let i = ((m.timestamp - t_min) / dt) as usize;
        batches[i].messages.push(m);
    }
    batches
}

/// Tokenizes one raw text: lowercase, split on whitespace, strip surrounding
/// punctuation (keeping a leading `#`), drop handle tokens and stopwords.
pub fn tokenize(text: &str, stopwords: &BTreeSet<String>) -> Vec<String> {
    text.to_lowercase()
        .split_whitespace()
        .filter_map(normalize_token)
        .filter(|t| !stopwords.contains(t))
        .collect()
}

fn normalize_token(raw: &str) -> Option<String> {
    let is_hashtag = raw.starts_with('#');
    let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        return None;
    }
    // A handle stays a handle even when quoted or parenthesized.
    if raw
        .trim_start_matches(|c: char| !c.is_alphanumeric() && c != '@' && c != '#')
        .starts_with('@')
    {
        return None;
    }
    if is_hashtag {
        Some(format!("#{trimmed}"))
    } else {
        Some(trimmed.to_string())
    }
}

/// Preprocesses one batch: tokenizes every message and drops messages whose
/// normalized text exactly duplicates an earlier message in the same batch.
/// A message reduced to zero tokens is retained with an empty token list.
pub fn preprocess(batch: &Batch, cfg: &BatchConfig) -> Vec<TokenizedMessage> {
    let mut seen: HashSet<String> = HashSet::new();
    let mut out = Vec::with_capacity(batch.messages.len());
    for m in &batch.messages {
        let tokens = tokenize(&m.text, &cfg.stopwords);
        let key = tokens.join(" ");
        if seen.insert(key) {
            out.push(TokenizedMessage {
                id: m.id.clone(),
                tokens,
            });
        }
    }
    out
}

/// Emits every contiguous n-gram (1..=n_max tokens, space-joined) of a token
/// list, in position order.
pub fn ngrams(tokens: &[String], n_max: usize) -> Vec<String> {
    let mut out = Vec::new();
    for n in 1..=n_max.max(1) {
        if tokens.len() < n {
            break;
        }
        for w in tokens.windows(n) {
            out.push(w.join(" "));
        }
    }
    out
}

/// Builds the batch vocabulary and per-message term-frequency vectors.
///
/// The vocabulary holds every term (unigram up to `ngram_max`-gram) whose
/// document frequency within the batch reaches `min_doc_freq`. Messages
/// whose vectors end up empty are excluded from the returned association but
/// still count toward batch volume.
pub fn extract_features(
    tokenized: &[TokenizedMessage],
    cfg: &BatchConfig,
) -> (Arc<Vocabulary>, Vec<(String, SparseVector)>) {
    let mut doc_freq: BTreeMap<String, usize> = BTreeMap::new();
    let mut per_message: Vec<HashMap<String, u64>> = Vec::with_capacity(tokenized.len());
    for msg in tokenized {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for term in ngrams(&msg.tokens, cfg.ngram_max) {
            *counts.entry(term).or_insert(0) += 1;
        }
        for term in counts.keys() {
            *doc_freq.entry(term.clone()).or_insert(0) += 1;
        }
        per_message.push(counts);
    }

    let vocab = Arc::new(Vocabulary::from_terms(
        doc_freq
            .iter()
            .filter(|&(_, &df)| df >= cfg.min_doc_freq)
            .map(|(term, _)| term.clone()),
    ));

    let mut vectors = Vec::new();
    for (msg, counts) in tokenized.iter().zip(per_message) {
        let entries: Vec<(u32, f64)> = counts
            .into_iter()
            .filter_map(|(term, c)| vocab.id_of(&term).map(|id| (id, c as f64)))
            .collect();
        if entries.is_empty() {
            continue;
        }
        let v = SparseVector::new(Arc::clone(&vocab), entries)
            .expect("term counts form a valid sparse vector");
        vectors.push((msg.id.clone(), v));
    }
    (vocab, vectors)
}

/// Parses one line-delimited JSON message. Returns `None` for blank lines.
pub fn parse_jsonl_line(line: &str) -> Option<std::result::Result<Microblog, serde_json::Error>> {
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return None;
    }
    Some(serde_json::from_str(trimmed))
}
