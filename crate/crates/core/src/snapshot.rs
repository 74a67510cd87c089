//! Snapshot persistence for incremental resumption.
//!
//! A snapshot captures the full engine state: configuration (with resolved
//! stopwords and lexicon), the window anchor, batch sizes, the pathway
//! registry, the live cluster representation vectors (term-keyed, with the
//! vocabularies needed for intersection cosine), and the coherence index.
//! Reloading and continuing is equivalent to an uninterrupted run.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::evaluate::DocTermIndex;
use crate::pathways::{ClusterRepVector, PathwayTracker, TopicPathway};
use crate::vecspace::{SparseVector, Vocabulary};

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct VocabDoc {
    id: u32,
    terms: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CrvDoc {
    id: u64,
    layer: usize,
    vocab: u32,
    parent: Option<u64>,
    pathway_id: u64,
    /// Weights keyed by term string.
    weights: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotDoc {
    version: u32,
    config: RunConfig,
    stream_start: Option<i64>,
    last_batch: Option<usize>,
    batch_sizes: Vec<usize>,
    next_crv_id: u64,
    next_pathway_id: u64,
    pathways: BTreeMap<u64, TopicPathway>,
    vocabularies: Vec<VocabDoc>,
    live_crvs: Vec<CrvDoc>,
    doc_index: DocTermIndex,
    corpus_term_freqs: BTreeMap<String, u64>,
    duplicates_dropped: u64,
}

/// Serializes the engine state. Identical states yield identical bytes.
pub fn to_bytes(engine: &Engine) -> Result<Vec<u8>> {
    let (next_crv_id, next_pathway_id, pathways, live) = engine.tracker.parts();

    // Collect distinct vocabularies in live-CRV order (live is sorted by
    // CRV id, so the numbering is deterministic).
    let mut vocab_ids: Vec<(*const Vocabulary, u32)> = Vec::new();
    let mut vocabularies = Vec::new();
    let mut live_crvs = Vec::new();
    for crv in live {
        let ptr = Arc::as_ptr(crv.weights.vocab());
        let vocab_id = match vocab_ids.iter().find(|(p, _)| *p == ptr) {
            Some(&(_, id)) => id,
            None => {
                let id = vocabularies.len() as u32;
                vocab_ids.push((ptr, id));
                vocabularies.push(VocabDoc {
                    id,
                    terms: crv.weights.vocab().terms().to_vec(),
                });
                id
            }
        };
        live_crvs.push(CrvDoc {
            id: crv.id,
            layer: crv.layer,
            vocab: vocab_id,
            parent: crv.parent,
            pathway_id: crv.pathway_id,
            weights: crv
                .weights
                .term_weights()
                .map(|(t, w)| (t.to_string(), w))
                .collect(),
        });
    }

    let doc = SnapshotDoc {
        version: SNAPSHOT_VERSION,
        config: engine.cfg.clone(),
        stream_start: engine.stream_start,
        last_batch: engine.last_batch,
        batch_sizes: engine.batch_sizes.clone(),
        next_crv_id,
        next_pathway_id,
        pathways: pathways.clone(),
        vocabularies,
        live_crvs,
        doc_index: engine.doc_index.clone(),
        corpus_term_freqs: engine.corpus_term_freqs.clone(),
        duplicates_dropped: engine.duplicates_dropped,
    };
    Ok(serde_json::to_vec_pretty(&doc)?)
}

/// Restores an engine from snapshot bytes. A version mismatch or any
/// structural corruption fails without partial state.
pub fn from_bytes(bytes: &[u8]) -> Result<Engine> {
    let doc: SnapshotDoc = serde_json::from_slice(bytes)?;
    if doc.version != SNAPSHOT_VERSION {
        return Err(Error::SnapshotVersion {
            found: doc.version,
            expected: SNAPSHOT_VERSION,
        });
    }
    doc.config.validate()?;

    let mut vocabs: BTreeMap<u32, Arc<Vocabulary>> = BTreeMap::new();
    for vd in &doc.vocabularies {
        let mut v = Vocabulary::from_terms(vd.terms.iter().cloned());
        v.rebuild_index();
        vocabs.insert(vd.id, Arc::new(v));
    }

    let mut live = Vec::with_capacity(doc.live_crvs.len());
    for cd in &doc.live_crvs {
        let vocab = vocabs
            .get(&cd.vocab)
            .ok_or_else(|| Error::Snapshot(format!("missing vocabulary {}", cd.vocab)))?;
        let entries: Result<Vec<(u32, f64)>> = cd
            .weights
            .iter()
            .map(|(term, &w)| {
                vocab.id_of(term).map(|id| (id, w)).ok_or_else(|| {
                    Error::Snapshot(format!("term {term:?} missing from vocabulary"))
                })
            })
            .collect();
        let weights = SparseVector::new(Arc::clone(vocab), entries?)
            .map_err(|e| Error::Snapshot(format!("bad CRV weights: {e}")))?;
        live.push(ClusterRepVector {
            id: cd.id,
            layer: cd.layer,
            weights,
            parent: cd.parent,
            pathway_id: cd.pathway_id,
        });
    }

    Ok(Engine {
        cfg: doc.config,
        stream_start: doc.stream_start,
        last_batch: doc.last_batch,
        batch_sizes: doc.batch_sizes,
        tracker: PathwayTracker::from_parts(
            doc.next_crv_id,
            doc.next_pathway_id,
            doc.pathways,
            live,
        ),
        doc_index: doc.doc_index,
        corpus_term_freqs: doc.corpus_term_freqs,
        duplicates_dropped: doc.duplicates_dropped,
    })
}

pub fn save(engine: &Engine, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, to_bytes(engine)?)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Engine> {
    from_bytes(&std::fs::read(path)?)
}
