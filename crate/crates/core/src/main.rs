//! Command-line front door for the topic-pathway engine.

use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use topicpath::config::RunConfig;
use topicpath::corpus::{self, Microblog};
use topicpath::engine::Engine;
use topicpath::error::Error;
use topicpath::evaluate::synth::{self, SyntheticSpec};
use topicpath::sentiment::{self, Lexicon};
use topicpath::{report, snapshot};

#[derive(Parser)]
#[command(
    name = "topicpath",
    version,
    about = "Incremental topic-pathway separation and event detection for short-text streams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Process a message stream end to end and write reports.
    Run {
        /// Flat key-value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Line-delimited JSON input (id, timestamp, text per object).
        #[arg(long)]
        input: PathBuf,
        /// Output directory for reports.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the configured RNG seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write a resumable snapshot here after the run.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Continue a snapshotted run over the (full) input stream.
    Resume {
        /// Snapshot produced by a previous run; updated in place afterward.
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute coherence curves for an existing pathways.json.
    Coherence {
        #[arg(long)]
        config: Option<PathBuf>,
        /// The stream the pathways were learned from.
        #[arg(long)]
        input: PathBuf,
        /// pathways.json from a previous run.
        #[arg(long)]
        pathways: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic stream fixture with ground-truth labels.
    Synth {
        /// JSON synthetic-stream description.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score one message against a lexicon and print the result.
    ScoreLexicon {
        /// Lexicon file; the bundled mini lexicon when omitted.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        text: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            input,
            out,
            seed,
            snapshot: snapshot_path,
        } => {
            let (cfg, warnings) = RunConfig::load(config.as_deref(), seed)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let mut engine = Engine::new(cfg)?;
            let messages = read_stream(&input)?;
            engine.ingest(messages)?;
            let events = report::write_all(&engine, &out)?;
            if let Some(path) = snapshot_path {
                snapshot::save(&engine, &path)?;
            }
            eprintln!(
                "processed {} batches, {} pathways, {} events",
                engine.batch_sizes().len(),
                engine.tracker().pathway_count(),
                events.len()
            );
            Ok(())
        }
        Command::Resume {
            snapshot: snapshot_path,
            input,
            out,
        } => {
            let mut engine = snapshot::load(&snapshot_path)?;
            let messages = read_stream(&input)?;
            let stats = engine.ingest(messages)?;
            let events = report::write_all(&engine, &out)?;
            snapshot::save(&engine, &snapshot_path)?;
            eprintln!(
                "resumed over {} new batches, {} pathways, {} events",
                stats.batches_processed,
                engine.tracker().pathway_count(),
                events.len()
            );
            Ok(())
        }
        Command::Coherence {
            config,
            input,
            pathways,
            out,
        } => {
            let (cfg, _) = RunConfig::load(config.as_deref(), None)?;
            run_coherence(&cfg, &input, &pathways, &out)
        }
        Command::Synth { spec, out } => {
            let content = std::fs::read_to_string(&spec)?;
            let spec: SyntheticSpec = serde_json::from_str(&content)
                .map_err(|e| Error::Config(format!("bad synthetic spec: {e}")))?;
            let (messages, truth) = synth::generate(&spec);
            std::fs::create_dir_all(&out)?;
            write_jsonl(&out.join("stream.jsonl"), &messages)?;
            write_jsonl(&out.join("truth.jsonl"), &truth)?;
            eprintln!(
                "wrote {} messages across {} batches",
                messages.len(),
                spec.batches
            );
            Ok(())
        }
        Command::ScoreLexicon { lexicon, text } => {
            let lex = match lexicon {
                Some(path) => {
                    let (lex, warnings) = Lexicon::load(&path)?;
                    for w in warnings {
                        eprintln!("warning: {w}");
                    }
                    lex
                }
                None => Lexicon::bundled_mini(),
            };
            let score = sentiment::score_message(&text, &lex);
            println!("pos={} neg={}", score.pos, score.neg);
            Ok(())
        }
    }
}

/// Reads a line-delimited JSON stream, skipping malformed lines with a
/// counted warning.
fn read_stream(path: &Path) -> Result<Vec<Microblog>, Error> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut messages = Vec::new();
    let mut skipped = 0u64;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        match corpus::parse_jsonl_line(&line) {
            None => {}
            Some(Ok(m)) => messages.push(m),
            Some(Err(e)) => {
                skipped += 1;
                if skipped <= 5 {
                    eprintln!("warning: skipping line {}: {e}", lineno + 1);
                }
            }
        }
    }
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} malformed input lines");
    }
    Ok(messages)
}

fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) -> Result<(), Error> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Rebuilds the coherence index from the stream with the run's
/// preprocessing, reads pathway term frequencies from pathways.json, and
/// writes a fresh coherence.csv.
fn run_coherence(
    cfg: &RunConfig,
    input: &Path,
    pathways_path: &Path,
    out: &Path,
) -> Result<(), Error> {
    use topicpath::evaluate::{coherence_curve, DocTermIndex};

    #[derive(serde::Deserialize)]
    struct PathwayIn {
        id: u64,
        term_freqs: std::collections::BTreeMap<String, u64>,
    }
    #[derive(serde::Deserialize)]
    struct PathwaysIn {
        pathways: Vec<PathwayIn>,
    }

    let messages = read_stream(input)?;
    let mut index = DocTermIndex::new();
    let mut corpus_freqs: std::collections::BTreeMap<String, u64> =
        std::collections::BTreeMap::new();
    for batch in corpus::segment_stream(messages, &cfg.batch) {
        let tokenized = corpus::preprocess(&batch, &cfg.batch);
        for msg in &tokenized {
            index.add_document(corpus::ngrams(&msg.tokens, cfg.batch.ngram_max));
        }
        let (_, vectors) = corpus::extract_features(&tokenized, &cfg.batch);
        for (_, v) in &vectors {
            for (term, w) in v.term_weights() {
                *corpus_freqs.entry(term.to_string()).or_insert(0) += w as u64;
            }
        }
    }

    let doc: PathwaysIn = serde_json::from_str(&std::fs::read_to_string(pathways_path)?)
        .map_err(|e| Error::Config(format!("bad pathways.json: {e}")))?;

    std::fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_path(out.join("coherence.csv"))?;
    w.write_record(["scope", "n", "score"])?;

    let rank = |freqs: &std::collections::BTreeMap<String, u64>| -> Vec<String> {
        let mut all: Vec<(&String, &u64)> = freqs.iter().collect();
        all.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        all.into_iter().take(100).map(|(t, _)| t.clone()).collect()
    };

    for (n, score) in coherence_curve(&rank(&corpus_freqs), &index, 2, 100) {
        w.write_record(["corpus".to_string(), n.to_string(), format!("{score:.6}")])?;
    }
    for p in &doc.pathways {
        for (n, score) in coherence_curve(&rank(&p.term_freqs), &index, 2, 100) {
            w.write_record([format!("TP{}", p.id), n.to_string(), format!("{score:.6}")])?;
        }
    }
    w.flush()?;
    Ok(())
}
