//! Run configuration: a flat key-value file with dotted section names.
//!
//! Every parameter has a default; a missing config file means an
//! all-defaults run. Paths inside the file (stopword list, lexicon) are
//! resolved relative to the file's directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{parse_stopwords, BatchConfig};
use crate::error::{Error, Result};
use crate::events::EventConfig;
use crate::pathways::LayerConfig;
use crate::sentiment::Lexicon;
use crate::som::SomConfig;

/// Fully resolved configuration for one run. Stopwords and lexicon are
/// loaded into the struct so a snapshot carries everything needed to
/// continue.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub batch: BatchConfig,
    pub som: SomConfig,
    pub layer: LayerConfig,
    pub events: EventConfig,
    pub lexicon: Lexicon,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            batch: BatchConfig::default(),
            som: SomConfig::default(),
            layer: LayerConfig::default(),
            events: EventConfig::default(),
            lexicon: Lexicon::bundled_mini(),
            seed: 42,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch.delta_t_secs == 0 {
            return Err(Error::Config("batch.delta_t_secs must be > 0".into()));
        }
        if self.batch.min_doc_freq == 0 {
            return Err(Error::Config("batch.min_doc_freq must be >= 1".into()));
        }
        if self.batch.ngram_max == 0 {
            return Err(Error::Config("batch.ngram_max must be >= 1".into()));
        }
        self.som.validate()?;
        self.layer.validate()?;
        self.events.validate()?;
        Ok(())
    }

    /// Loads a config file, or the defaults when no path is given. Returns
    /// warnings (e.g. duplicate lexicon entries) alongside.
    pub fn load(
        path: Option<&Path>,
        seed_override: Option<u64>,
    ) -> Result<(RunConfig, Vec<String>)> {
        let mut cfg = RunConfig::default();
        let mut warnings = Vec::new();
        if let Some(path) = path {
            let content = std::fs::read_to_string(path)?;
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            warnings = cfg.apply_file(&content, base)?;
        }
        if let Some(seed) = seed_override {
            cfg.seed = seed;
        }
        cfg.som.rng_seed = cfg.seed;
        cfg.validate()?;
        Ok((cfg, warnings))
    }

    fn apply_file(&mut self, content: &str, base: &Path) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected key = value, got {line:?}",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let at = |what: &str, e: String| {
                Error::Config(format!("line {}: bad {what} value: {e}", lineno + 1))
            };
            match key {
                "batch.delta_t_secs" => {
                    self.batch.delta_t_secs = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "batch.min_doc_freq" => {
                    self.batch.min_doc_freq = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "batch.ngram_max" => {
                    self.batch.ngram_max = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "batch.stopwords" => {
                    let p = resolve(base, value);
                    self.batch.stopwords = parse_stopwords(&std::fs::read_to_string(&p)?);
                }
                "som.learning_rate" => self.som.learning_rate = parse_f64(value, key, lineno)?,
                "som.lr_decay" => self.som.lr_decay = parse_f64(value, key, lineno)?,
                "som.spread_factor" => self.som.spread_factor = parse_f64(value, key, lineno)?,
                "som.growth_threshold" => {
                    self.som.growth_threshold_override = Some(parse_f64(value, key, lineno)?)
                }
                "som.epochs" => {
                    self.som.epochs = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "som.min_crv_hits" => {
                    self.som.min_crv_hits = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "layer.tau_sim" => self.layer.tau_sim = parse_f64(value, key, lineno)?,
                "layer.min_spawn_size" => {
                    self.layer.min_spawn_size = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "layer.top_terms_n" => {
                    self.layer.top_terms_n = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "layer.retire_after" => {
                    self.layer.retire_after = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "events.window" => {
                    self.events.window = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "events.r_v" => self.events.r_v = parse_f64(value, key, lineno)?,
                "events.r_ps" => self.events.r_ps = parse_f64(value, key, lineno)?,
                "events.r_ns" => self.events.r_ns = parse_f64(value, key, lineno)?,
                "events.tau_e" => self.events.tau_e = parse_f64(value, key, lineno)?,
                "events.min_batch_fraction" => {
                    self.events.min_batch_fraction = parse_f64(value, key, lineno)?
                }
                "events.exclude_top_n" => {
                    self.events.novel_exclude_top_n = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                "lexicon" => {
                    let p = resolve(base, value);
                    let (lex, mut w) = Lexicon::load(&p)?;
                    self.lexicon = lex;
                    warnings.append(&mut w);
                }
                "seed" => {
                    self.seed = value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| at(key, e.to_string()))?
                }
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown configuration key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(warnings)
    }
}

fn parse_f64(value: &str, key: &str, lineno: usize) -> Result<f64> {
    value.parse().map_err(|e: std::num::ParseFloatError| {
        Error::Config(format!("line {}: bad {key} value: {e}", lineno + 1))
    })
}

fn resolve(base: &Path, value: &str) -> PathBuf {
    let p = Path::new(value);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
