//! Batch-by-batch pipeline orchestration.
//!
//! The engine owns everything the run accumulates: the pathway tracker,
//! per-batch sizes, the corpus document index for coherence, and the
//! configuration. Batches are processed strictly in order; reports are a
//! pure function of the accumulated state, so a snapshotted run resumed
//! later produces byte-identical outputs.

use std::collections::{BTreeMap, HashMap};

use crate::config::RunConfig;
use crate::corpus::{self, Batch, Microblog};
use crate::error::{Error, Result};
use crate::evaluate::DocTermIndex;
use crate::events::{self, Event};
use crate::pathways::{PathwayTracker, TopicPathway};
use crate::sentiment;

/// The incremental pipeline state.
#[derive(Debug, Clone)]
pub struct Engine {
    pub(crate) cfg: RunConfig,
    /// Anchor of the half-open batch windows: the earliest timestamp ever
    /// ingested.
    pub(crate) stream_start: Option<i64>,
    pub(crate) last_batch: Option<usize>,
    /// Post-deduplication message count per batch index.
    pub(crate) batch_sizes: Vec<usize>,
    pub(crate) tracker: PathwayTracker,
    pub(crate) doc_index: DocTermIndex,
    /// Corpus-wide term frequencies over extracted features.
    pub(crate) corpus_term_freqs: BTreeMap<String, u64>,
    /// In-batch duplicates dropped so far.
    pub(crate) duplicates_dropped: u64,
}

/// What one `ingest` call did.
#[derive(Debug, Clone, Default)]
pub struct IngestStats {
    pub batches_processed: usize,
    pub messages_seen: usize,
}

impl Engine {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Engine {
            cfg,
            stream_start: None,
            last_batch: None,
            batch_sizes: Vec::new(),
            tracker: PathwayTracker::new(),
            doc_index: DocTermIndex::new(),
            corpus_term_freqs: BTreeMap::new(),
            duplicates_dropped: 0,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn last_batch(&self) -> Option<usize> {
        self.last_batch
    }

    pub fn batch_sizes(&self) -> &[usize] {
        &self.batch_sizes
    }

    pub fn tracker(&self) -> &PathwayTracker {
        &self.tracker
    }

    pub fn doc_index(&self) -> &DocTermIndex {
        &self.doc_index
    }

    /// Segments the messages into batches (anchored at the earliest
    /// timestamp this engine has ever seen) and processes every batch
    /// beyond the last processed one, in order. Already-processed batch
    /// indices are skipped, which makes resuming with the full input file
    /// equivalent to an unbroken run.
    pub fn ingest(&mut self, messages: Vec<Microblog>) -> Result<IngestStats> {
        let mut stats = IngestStats {
            messages_seen: messages.len(),
            ..IngestStats::default()
        };
        if messages.is_empty() {
            return Ok(stats);
        }
        let incoming_min = messages.iter().map(|m| m.timestamp).min().unwrap();
        let anchor = *self.stream_start.get_or_insert(incoming_min);
        if incoming_min < anchor {
            return Err(Error::Config(format!(
                "message timestamp {incoming_min} precedes the stream anchor {anchor}"
            )));
        }
        let batches = corpus::segment_stream_anchored(messages, &self.cfg.batch, anchor);
        for batch in &batches {
            if self.last_batch.is_some_and(|done| batch.index <= done) {
                continue;
            }
            self.process_batch(batch)?;
            stats.batches_processed += 1;
        }
        Ok(stats)
    }

    /// Runs the full per-batch pipeline: preprocess, extract features,
    /// learn the layer, and score segment sentiment. Batches must arrive in
    /// index order with no gaps.
    pub fn process_batch(&mut self, batch: &Batch) -> Result<()> {
        let expected = self.last_batch.map_or(0, |b| b + 1);
        if batch.index != expected {
            return Err(Error::Config(format!(
                "batch {} arrived out of order (expected {expected})",
                batch.index
            )));
        }

        let tokenized = corpus::preprocess(batch, &self.cfg.batch);
        self.duplicates_dropped += (batch.messages.len() - tokenized.len()) as u64;
        self.batch_sizes.push(tokenized.len());

        for msg in &tokenized {
            self.doc_index
                .add_document(corpus::ngrams(&msg.tokens, self.cfg.batch.ngram_max));
        }

        let (_vocab, vectors) = corpus::extract_features(&tokenized, &self.cfg.batch);
        for (_, v) in &vectors {
            for (term, w) in v.term_weights() {
                *self.corpus_term_freqs.entry(term.to_string()).or_insert(0) += w as u64;
            }
        }

        self.tracker.process_layer(
            batch.index,
            &vectors,
            &self.cfg.som,
            &self.cfg.layer,
            self.cfg.seed,
        )?;

        // Sentiment runs over the raw text, before topic preprocessing.
        let text_of: HashMap<&str, &str> = batch
            .messages
            .iter()
            .map(|m| (m.id.as_str(), m.text.as_str()))
            .collect();
        for segment in self.tracker.segments_at_mut(batch.index) {
            let scores: Vec<_> = segment
                .message_ids
                .iter()
                .map(|id| {
                    let text = text_of.get(id.as_str()).copied().unwrap_or("");
                    sentiment::score_message(text, &self.cfg.lexicon)
                })
                .collect();
            let (pos, neg) = sentiment::segment_sentiment(&scores)?;
            segment.avg_pos_sent = Some(pos);
            segment.avg_neg_sent = Some(neg);
        }

        self.last_batch = Some(batch.index);
        Ok(())
    }

    /// Pathways sorted by id.
    pub fn pathways_sorted(&self) -> Vec<&TopicPathway> {
        self.tracker.pathways().collect()
    }

    /// Detects events over the full accumulated history.
    pub fn detect_events(&self) -> Vec<Event> {
        events::detect_events(
            &self.pathways_sorted(),
            &self.batch_sizes,
            &self.cfg.events,
            self.cfg.layer.top_terms_n,
        )
    }

    /// Corpus-wide terms ranked by frequency (ties lexicographic), capped
    /// at `n`.
    pub fn corpus_top_terms(&self, n: usize) -> Vec<String> {
        let mut all: Vec<(&String, &u64)> = self.corpus_term_freqs.iter().collect();
        all.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        all.into_iter().take(n).map(|(t, _)| t.clone()).collect()
    }

    /// Start of batch `i`'s window in epoch seconds, when known.
    pub fn batch_start_epoch(&self, i: usize) -> Option<i64> {
        self.stream_start
            .map(|t0| t0 + i as i64 * self.cfg.batch.delta_t_secs as i64)
    }
}
