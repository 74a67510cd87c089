//! Incremental topic-pathway separation and event detection for
//! timestamped short-text streams.
//!
//! The pipeline slices a message stream into fixed-duration batches,
//! extracts sparse bag-of-words vectors over a per-batch vocabulary, and
//! feeds each batch to a layered growing self-organizing map: vectors
//! similar to an existing topic's representation vector refine that topic,
//! the rest train a fresh map and spawn new topic pathways. Each pathway
//! is then monitored for volume and sentiment anomalies, which are
//! combined into a single event score per topic segment.
//!
//! Modules:
//! - [`corpus`]: stream segmentation, preprocessing, feature extraction
//! - [`vecspace`]: sparse vectors, intersection cosine, max-pooling
//! - [`som`]: the growing self-organizing feature map
//! - [`pathways`]: per-batch layer learning, pathway lineage, segments
//! - [`sentiment`]: lexicon-based dual-polarity strength scoring
//! - [`events`]: event indicators, scores, detection and labeling
//! - [`evaluate`]: topic coherence, synthetic streams, brute-force oracles
//! - [`engine`]: batch-by-batch orchestration with snapshot/resume
//! - [`config`]: run configuration loading
//! - [`report`]: report file writers
//!
//! ```
//! use topicpath::config::RunConfig;
//! use topicpath::corpus::Microblog;
//! use topicpath::engine::Engine;
//!
//! let mut cfg = RunConfig::default();
//! cfg.batch.delta_t_secs = 3600;
//! cfg.batch.min_doc_freq = 2;
//!
//! let mut engine = Engine::new(cfg).unwrap();
//! let messages: Vec<Microblog> = (0..20)
//!     .map(|i| Microblog {
//!         id: format!("m{i}"),
//!         timestamp: (i % 2) * 3600 + i, // two hourly batches
//!         text: format!("quartz mineral vein sample{i}"),
//!     })
//!     .collect();
//! engine.ingest(messages).unwrap();
//!
//! assert_eq!(engine.last_batch(), Some(1));
//! assert!(engine.tracker().pathway_count() >= 1);
//! ```

pub mod config;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod evaluate;
pub mod events;
pub mod pathways;
pub mod report;
pub mod sentiment;
pub mod snapshot;
pub mod som;
pub mod vecspace;

pub use error::{Error, Result};
