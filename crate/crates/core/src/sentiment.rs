//! Lexicon-based dual-polarity sentiment-strength scoring.
//!
//! Each message gets an independent positive strength in `[1, 4]` and
//! negative strength in `[-4, -1]`. Scoring runs over the raw text (before
//! topic preprocessing) since sentiment cues live in stopwords, punctuation
//! and emoticons. Modifier rules, applied in order to each matched word:
//! repeated-letter emphasis, then a directly preceding booster, then a
//! negator within the two preceding tokens (flip polarity, magnitude - 1,
//! floored at the neutral 1).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentiment word list: strengths, boosters, negators and emoticons with
/// disjoint key sets.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Lexicon {
    /// term -> strength in -4..=-2 or 2..=4
    pub words: BTreeMap<String, i8>,
    /// term -> +1 (strengthen) or -1 (weaken)
    pub boosters: BTreeMap<String, i8>,
    pub negators: BTreeSet<String>,
    /// glyph -> strength in -4..=-2 or 2..=4
    pub emoticons: BTreeMap<String, i8>,
}

/// Per-message sentiment strengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentimentScore {
    /// Positive strength, 1 (neutral) to 4.
    pub pos: i8,
    /// Negative strength, -1 (neutral) to -4.
    pub neg: i8,
}

impl Lexicon {
    /// The bundled ~200-entry mini lexicon used for tests and as the
    /// default when no lexicon file is configured.
    pub fn bundled_mini() -> Lexicon {
        let (lex, warnings) = Lexicon::parse(include_str!("../assets/mini_lexicon.tsv"))
            .expect("bundled lexicon is valid");
        debug_assert!(warnings.is_empty());
        lex
    }

    /// Parses the tab-separated lexicon format:
    /// `term<TAB>category<TAB>value`, category one of
    /// `word|booster|negator|emoticon`, `#`-prefixed comment lines ignored.
    /// A duplicate term within one category wins last and yields a warning;
    /// the same term in two categories is an error.
    pub fn parse(content: &str) -> Result<(Lexicon, Vec<String>)> {
        let mut lex = Lexicon::default();
        let mut warnings = Vec::new();
        for (lineno, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (term, category, value) = match (parts.next(), parts.next(), parts.next()) {
                (Some(t), Some(c), Some(v)) if !t.is_empty() => (t, c, v),
                _ => {
                    return Err(Error::Lexicon(format!(
                        "line {}: expected term<TAB>category<TAB>value",
                        lineno + 1
                    )))
                }
            };
            let value: i8 = value
                .trim()
                .parse()
                .map_err(|_| Error::Lexicon(format!("line {}: bad value {value:?}", lineno + 1)))?;
            let term = term.to_string();
            match category {
                "word" | "emoticon" => {
                    if !(2..=4).contains(&value.abs()) {
                        return Err(Error::Lexicon(format!(
                            "line {}: strength {value} outside [-4,-2] u [2,4]",
                            lineno + 1
                        )));
                    }
                    let map = if category == "word" {
                        &mut lex.words
                    } else {
                        &mut lex.emoticons
                    };
                    if map.insert(term.clone(), value).is_some() {
                        warnings.push(format!(
                            "duplicate {category} entry {term:?}: keeping the later value"
                        ));
                    }
                }
                "booster" => {
                    if value != 1 && value != -1 {
                        return Err(Error::Lexicon(format!(
                            "line {}: booster value must be +1 or -1",
                            lineno + 1
                        )));
                    }
                    if lex.boosters.insert(term.clone(), value).is_some() {
                        warnings.push(format!(
                            "duplicate booster entry {term:?}: keeping the later value"
                        ));
                    }
                }
                "negator" => {
                    if !lex.negators.insert(term.clone()) {
                        warnings.push(format!("duplicate negator entry {term:?}"));
                    }
                }
                other => {
                    return Err(Error::Lexicon(format!(
                        "line {}: unknown category {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        lex.check_disjoint()?;
        Ok((lex, warnings))
    }

    pub fn load(path: &std::path::Path) -> Result<(Lexicon, Vec<String>)> {
        Lexicon::parse(&std::fs::read_to_string(path)?)
    }

    fn check_disjoint(&self) -> Result<()> {
        for term in self.words.keys() {
            if self.boosters.contains_key(term)
                || self.negators.contains(term)
                || self.emoticons.contains_key(term)
            {
                return Err(Error::Lexicon(format!(
                    "term {term:?} appears in more than one category"
                )));
            }
        }
        for term in self.boosters.keys() {
            if self.negators.contains(term) || self.emoticons.contains_key(term) {
                return Err(Error::Lexicon(format!(
                    "term {term:?} appears in more than one category"
                )));
            }
        }
        for term in &self.negators {
            if self.emoticons.contains_key(term) {
                return Err(Error::Lexicon(format!(
                    "term {term:?} appears in more than one category"
                )));
            }
        }
        Ok(())
    }
}

/// True when the word contains a letter repeated three or more times in a
/// row.
fn has_long_run(word: &str) -> bool {
    let mut run = 0;
    let mut prev = None;
    for c in word.chars() {
        if Some(c) == prev {
            run += 1;
            if run >= 3 {
                return true;
            }
        } else {
            prev = Some(c);
            run = 1;
        }
    }
    false
}

/// Rebuilds the word with every character run capped at `max_run`.
fn collapse_runs(word: &str, max_run: usize) -> String {
    let mut out = String::with_capacity(word.len());
    let mut prev = None;
    let mut run = 0;
    for c in word.chars() {
        if Some(c) == prev {
            run += 1;
        } else {
            prev = Some(c);
            run = 1;
        }
        if run <= max_run {
            out.push(c);
        }
    }
    out
}

fn normalize_word(raw: &str) -> String {
    raw.to_lowercase()
        .trim_matches(|c: char| !c.is_alphanumeric() && c != '\'')
        .trim_matches('\'')
        .to_string()
}

/// Looks up a word strength, collapsing exaggerated letter runs when the
/// literal form misses. Returns the strength and whether the emphasis bonus
/// applies.
fn word_strength(lex: &Lexicon, word: &str) -> Option<(i8, bool)> {
    let emphatic = has_long_run(word);
    if let Some(&s) = lex.words.get(word) {
        return Some((s, emphatic));
    }
    if emphatic {
        for max_run in [2usize, 1] {
            if let Some(&s) = lex.words.get(collapse_runs(word, max_run).as_str()) {
                return Some((s, true));
            }
        }
    }
    None
}

fn bump_magnitude(value: i8, delta: i8) -> i8 {
    let sign = if value < 0 { -1 } else { 1 };
    let mag = (value.abs() + delta).max(1);
    sign * mag
}

/// Scores one raw message. Texts with no lexicon matches score the neutral
/// `(1, -1)`.
pub fn score_message(text: &str, lex: &Lexicon) -> SentimentScore {
    let raw_tokens: Vec<&str> = text.split_whitespace().collect();
    let words: Vec<String> = raw_tokens.iter().map(|t| normalize_word(t)).collect();

    let mut pos: i8 = 1;
    let mut neg: i8 = -1;
    let mut add = |value: i8| {
        if value > 0 {
            pos = pos.max(value.min(4));
        } else if value < 0 {
            neg = neg.min(value.max(-4));
        }
    };

    for (k, raw) in raw_tokens.iter().enumerate() {
        // Emoticons are standalone tokens; modifiers do not apply to them.
        if let Some(&s) = lex
            .emoticons
            .get(*raw)
            .or_else(|| lex.emoticons.get(raw.to_lowercase().as_str()))
        {
            add(s);
            continue;
        }
        let word = &words[k];
        if word.is_empty() {
            continue;
        }
        let Some((base, emphatic)) = word_strength(lex, word) else {
            continue;
        };
        let mut value = if emphatic {
            bump_magnitude(base, 1)
        } else {
            base
        };
        if k > 0 {
            if let Some(&b) = lex.boosters.get(words[k - 1].as_str()) {
                value = bump_magnitude(value, b);
            }
        }
        let negated = (k.saturating_sub(2)..k).any(|j| lex.negators.contains(words[j].as_str()));
        if negated {
            value = bump_magnitude(-value, -1);
        }
        add(value);
    }

    SentimentScore { pos, neg }
}

/// Arithmetic means of the positive and negative strengths of a non-empty
/// segment.
pub fn segment_sentiment(scores: &[SentimentScore]) -> Result<(f64, f64)> {
    if scores.is_empty() {
        return Err(Error::EmptySegment);
    }
    let n = scores.len() as f64;
    let pos = scores.iter().map(|s| s.pos as f64).sum::<f64>() / n;
    let neg = scores.iter().map(|s| s.neg as f64).sum::<f64>() / n;
    Ok((pos, neg))
}
