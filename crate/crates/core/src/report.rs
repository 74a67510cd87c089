//! Report emission: pathways.json, events.csv, coherence.csv, and
//! per-segment term-frequency files for external plotting.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{SecondsFormat, TimeZone, Utc};
use serde::Serialize;

use crate::engine::Engine;
use crate::error::Result;
use crate::evaluate::coherence_curve;
use crate::events::Event;

#[derive(Debug, Serialize)]
struct SegmentReport {
    batch_index: usize,
    batch_start_iso: Option<String>,
    count: usize,
    avg_pos_sentiment: Option<f64>,
    avg_neg_sentiment: Option<f64>,
    top_terms: Vec<(String, u64)>,
}

#[derive(Debug, Serialize)]
struct PathwayReport {
    id: u64,
    spawn_batch: usize,
    parent_pathway: Option<u64>,
    crv_chain: Vec<u64>,
    message_count: usize,
    top_terms: Vec<(String, u64)>,
    /// Aggregated term frequencies across segments, for downstream
    /// re-analysis (e.g. standalone coherence runs).
    term_freqs: BTreeMap<String, u64>,
    segments: Vec<SegmentReport>,
}

#[derive(Debug, Serialize)]
struct LineageEdge {
    parent_pathway: u64,
    child_pathway: u64,
    batch_index: usize,
}

#[derive(Debug, Serialize)]
struct PathwaysDoc {
    pathways: Vec<PathwayReport>,
    lineage: Vec<LineageEdge>,
}

fn iso(epoch: i64) -> String {
    Utc.timestamp_opt(epoch, 0)
        .single()
        .map(|t| t.to_rfc3339_opts(SecondsFormat::Secs, true))
        .unwrap_or_else(|| epoch.to_string())
}

/// Writes all report artifacts into `out_dir`: `pathways.json`,
/// `events.csv`, `coherence.csv` and `segments/<pathway>/<batch>.terms.csv`.
/// Returns the detected events (sorted by descending score).
pub fn write_all(engine: &Engine, out_dir: &Path) -> Result<Vec<Event>> {
    std::fs::create_dir_all(out_dir)?;
    write_pathways_json(engine, &out_dir.join("pathways.json"))?;
    let events = engine.detect_events();
    write_events_csv(engine, &events, &out_dir.join("events.csv"))?;
    write_coherence_csv(engine, &out_dir.join("coherence.csv"))?;
    write_segment_terms(engine, &out_dir.join("segments"))?;
    Ok(events)
}

fn write_pathways_json(engine: &Engine, path: &Path) -> Result<()> {
    let n = engine.config().layer.top_terms_n;
    let mut pathways = Vec::new();
    let mut lineage = Vec::new();
    for p in engine.pathways_sorted() {
        if let Some(parent) = p.parent_pathway {
            lineage.push(LineageEdge {
                parent_pathway: parent,
                child_pathway: p.id,
                batch_index: p.spawn_batch,
            });
        }
        pathways.push(PathwayReport {
            id: p.id,
            spawn_batch: p.spawn_batch,
            parent_pathway: p.parent_pathway,
            crv_chain: p.crv_chain.clone(),
            message_count: p.message_count(),
            top_terms: p.top_terms(n),
            term_freqs: p.term_freqs(),
            segments: p
                .segments
                .iter()
                .map(|s| SegmentReport {
                    batch_index: s.batch_index,
                    batch_start_iso: engine.batch_start_epoch(s.batch_index).map(iso),
                    count: s.count(),
                    avg_pos_sentiment: s.avg_pos_sent,
                    avg_neg_sentiment: s.avg_neg_sent,
                    top_terms: s.top_terms(n),
                })
                .collect(),
        });
    }
    let doc = PathwaysDoc { pathways, lineage };
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

fn write_events_csv(engine: &Engine, events: &[Event], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "batch_index",
        "batch_start_iso",
        "pathway_id",
        "score",
        "wv",
        "wps",
        "wns",
        "segment_count",
        "batch_count",
        "novel_terms",
    ])?;
    for e in events {
        w.write_record([
            e.batch_index.to_string(),
            engine
                .batch_start_epoch(e.batch_index)
                .map(iso)
                .unwrap_or_default(),
            e.pathway_id.to_string(),
            format!("{:.6}", e.score),
            format!("{:.6}", e.weighted_volume),
            format!("{:.6}", e.weighted_pos),
            format!("{:.6}", e.weighted_neg),
            e.segment_count.to_string(),
            e.batch_count.to_string(),
            e.novel_terms.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_coherence_csv(engine: &Engine, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["scope", "n", "score"])?;
    let baseline_terms = engine.corpus_top_terms(100);
    for (n, score) in coherence_curve(&baseline_terms, engine.doc_index(), 2, 100) {
        w.write_record(["corpus".to_string(), n.to_string(), format!("{score:.6}")])?;
    }
    for p in engine.pathways_sorted() {
        let ranked: Vec<String> = p.top_terms(100).into_iter().map(|(t, _)| t).collect();
        for (n, score) in coherence_curve(&ranked, engine.doc_index(), 2, 100) {
            w.write_record([format!("TP{}", p.id), n.to_string(), format!("{score:.6}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_segment_terms(engine: &Engine, dir: &Path) -> Result<()> {
    for p in engine.pathways_sorted() {
        let pdir = dir.join(p.id.to_string());
        std::fs::create_dir_all(&pdir)?;
        for s in &p.segments {
            let mut w = csv::Writer::from_path(pdir.join(format!("{}.terms.csv", s.batch_index)))?;
            w.write_record(["term", "count"])?;
            let mut terms: Vec<(&String, &u64)> = s.term_freqs.iter().collect();
            terms.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
            for (term, count) in terms {
                w.write_record([term.as_str(), &count.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
