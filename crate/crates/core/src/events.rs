//! Event indicators, the composite event score, and event detection.
//!
//! Each topic segment is compared against its own pathway's trailing
//! history: the volume indicator is the ratio of the segment's message
//! count to the moving average of the previous `w` segments, and the two
//! sentiment indicators are the same ratio over average positive strength
//! and average negative strength magnitude. A convex combination of the
//! three indicators gives the event score; a segment is an event when the
//! score strictly exceeds `tau_e` and the segment is not a negligible
//! share of its batch.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathways::TopicPathway;

/// Event scoring knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventConfig {
    /// Moving-average window size `w`.
    pub window: usize,
    /// Volume indicator weight.
    pub r_v: f64,
    /// Positive sentiment indicator weight.
    pub r_ps: f64,
    /// Negative sentiment indicator weight.
    pub r_ns: f64,
    /// Event threshold (strict `>`).
    pub tau_e: f64,
    /// Segments below this share of their batch are filtered out.
    pub min_batch_fraction: f64,
    /// Size of the frequent-term exclusion list taken from each of the `w`
    /// previous segments when labeling an event with novel terms.
    pub novel_exclude_top_n: usize,
}

impl Default for EventConfig {
    fn default() -> Self {
        EventConfig {
            window: 2,
            r_v: 0.1,
            r_ps: 0.45,
            r_ns: 0.45,
            tau_e: 1.0,
            min_batch_fraction: 0.01,
            novel_exclude_top_n: 20,
        }
    }
}

impl EventConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::Config("events.window must be >= 1".into()));
        }
        for (name, r) in [("r_v", self.r_v), ("r_ps", self.r_ps), ("r_ns", self.r_ns)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config(format!("events.{name} must be in [0,1]")));
            }
        }
        let sum = self.r_v + self.r_ps + self.r_ns;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "event indicator weights must sum to 1 (got {sum})"
            )));
        }
        if !self.tau_e.is_finite() || self.tau_e < 0.0 {
            return Err(Error::Config("events.tau_e must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.min_batch_fraction) {
            return Err(Error::Config(
                "events.min_batch_fraction must be in [0,1]".into(),
            ));
        }
        Ok(())
    }
}

/// The three raw indicator values for one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorScores {
    pub i_v: f64,
    pub i_ps: f64,
    pub i_ns: f64,
}

/// A scored anomaly in one topic segment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Event {
    pub pathway_id: u64,
    pub batch_index: usize,
    /// The composite score.
    pub score: f64,
    /// `r_v * i_v`
    pub weighted_volume: f64,
    /// `r_ps * i_ps`
    pub weighted_pos: f64,
    /// `r_ns * i_ns`
    pub weighted_neg: f64,
    pub segment_count: usize,
    /// Messages in the segment's whole batch.
    pub batch_count: usize,
    pub novel_terms: Vec<String>,
}

/// Ratio of the segment count at `i` to the trailing `w`-window moving
/// average of its pathway's counts. `None` when any of the `w` previous
/// segments is missing (insufficient history).
pub fn volume_indicator(counts: &BTreeMap<usize, usize>, i: usize, w: usize) -> Option<f64> {
    let current = *counts.get(&i)?;
    let mut sum = 0usize;
    for j in window_indices(i, w)? {
        let c = *counts.get(&j)?;
        if c == 0 {
            return None;
        }
        sum += c;
    }
    Some(current as f64 * w as f64 / sum as f64)
}

/// Which sentiment polarity an indicator tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

/// Ratio of the segment's average sentiment strength at `i` to the trailing
/// `w`-window sum, as in the volume indicator. Negative averages enter as
/// magnitudes, which leaves the ratio unchanged and keeps it a positive
/// real. `None` on insufficient history.
pub fn sentiment_indicator(
    kind: Polarity,
    avgs: &BTreeMap<usize, f64>,
    i: usize,
    w: usize,
) -> Option<f64> {
    let value = |x: f64| match kind {
        Polarity::Positive => x,
        Polarity::Negative => x.abs(),
    };
    let current = value(*avgs.get(&i)?);
    let mut sum = 0.0;
    for j in window_indices(i, w)? {
        sum += value(*avgs.get(&j)?);
    }
    // The scales are bounded away from zero (|pos| >= 1, |neg| >= 1), so a
    // zero denominator cannot occur for sentiment.
    Some(current * w as f64 / sum)
}

fn window_indices(i: usize, w: usize) -> Option<std::ops::Range<usize>> {
    if i < w {
        return None;
    }
    Some((i - w)..i)
}

/// Combines the indicators into the composite score, returning the score
/// and the three weighted components.
pub fn event_score(ind: &IndicatorScores, cfg: &EventConfig) -> (f64, [f64; 3]) {
    let components = [cfg.r_v * ind.i_v, cfg.r_ps * ind.i_ps, cfg.r_ns * ind.i_ns];
    (components.iter().sum(), components)
}

/// Top-n frequent terms of the segment at `i`, excluding every term that
/// ranks in the top `exclude_top_n` of any of the `w` previous segments of
/// the same pathway. Missing previous segments contribute empty exclusion
/// sets.
pub fn novel_terms(
    pathway: &TopicPathway,
    i: usize,
    w: usize,
    n: usize,
    exclude_top_n: usize,
) -> Vec<String> {
    let Some(segment) = pathway.segment_at(i) else {
        return Vec::new();
    };
    let mut excluded: BTreeSet<String> = BTreeSet::new();
    for j in i.saturating_sub(w)..i {
        if let Some(prev) = pathway.segment_at(j) {
            excluded.extend(prev.top_terms(exclude_top_n).into_iter().map(|(t, _)| t));
        }
    }
    segment
        .top_terms(n)
        .into_iter()
        .map(|(t, _)| t)
        .filter(|t| !excluded.contains(t))
        .collect()
}

/// Scores every segment with full window history across the given
/// pathways, keeps segments whose score strictly exceeds `tau_e` and whose
/// count reaches `min_batch_fraction` of the batch, and returns events
/// sorted by descending score (ties by batch index, then pathway id).
///
/// `batch_sizes[i]` is the message count of batch `i`; `top_terms_n` caps
/// the novel-term label length.
pub fn detect_events(
    pathways: &[&TopicPathway],
    batch_sizes: &[usize],
    cfg: &EventConfig,
    top_terms_n: usize,
) -> Vec<Event> {
    let mut events = Vec::new();
    for pathway in pathways {
        let counts: BTreeMap<usize, usize> = pathway
            .segments
            .iter()
            .map(|s| (s.batch_index, s.count()))
            .collect();
        let pos: BTreeMap<usize, f64> = pathway
            .segments
            .iter()
            .filter_map(|s| s.avg_pos_sent.map(|v| (s.batch_index, v)))
            .collect();
        let neg: BTreeMap<usize, f64> = pathway
            .segments
            .iter()
            .filter_map(|s| s.avg_neg_sent.map(|v| (s.batch_index, v)))
            .collect();
        for segment in &pathway.segments {
            let i = segment.batch_index;
            let (Some(i_v), Some(i_ps), Some(i_ns)) = (
                volume_indicator(&counts, i, cfg.window),
                sentiment_indicator(Polarity::Positive, &pos, i, cfg.window),
                sentiment_indicator(Polarity::Negative, &neg, i, cfg.window),
            ) else {
                continue;
            };
            let (score, [wv, wps, wns]) = event_score(&IndicatorScores { i_v, i_ps, i_ns }, cfg);
            let batch_count = batch_sizes.get(i).copied().unwrap_or(0);
            if score <= cfg.tau_e {
                continue;
            }
            if (segment.count() as f64) < cfg.min_batch_fraction * batch_count as f64 {
                continue;
            }
            events.push(Event {
                pathway_id: pathway.id,
                batch_index: i,
                score,
                weighted_volume: wv,
                weighted_pos: wps,
                weighted_neg: wns,
                segment_count: segment.count(),
                batch_count,
                novel_terms: novel_terms(
                    pathway,
                    i,
                    cfg.window,
                    top_terms_n,
                    cfg.novel_exclude_top_n,
                ),
            });
        }
    }
    events.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.batch_index.cmp(&b.batch_index))
            .then_with(|| a.pathway_id.cmp(&b.pathway_id))
    });
    events
}
