//! ⟨code, doc⟩ ingestion, query derivation, triplet construction and splits.

mod query;
mod synthetic;

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{extract_graph, ConceptGraph, GraphDocument, SchemaError};
use crate::syntax::parse_source;

pub use query::derive_query;
pub use synthetic::generate_synthetic;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed record on line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error(
        "bad split fractions train={train} valid={valid}: both must be positive and sum below 1"
    )]
    BadFractions { train: f64, valid: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodePair {
    pub id: String,
    pub code: String,
    pub docstring: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplet {
    pub id: String,
    pub graph: ConceptGraph,
    pub code_text: String,
    pub query_text: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub total: usize,
    pub parsed: usize,
    pub skipped_parse_error: usize,
    pub skipped_empty_query: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplits {
    pub train: Vec<Triplet>,
    pub valid: Vec<Triplet>,
    pub test: Vec<Triplet>,
    pub seed: u64,
}

#[derive(Deserialize)]
struct PairLine {
    id: Option<String>,
    code: String,
    docstring: String,
}

/// Reads line-delimited JSON pairs. Blank lines are ignored; a record
/// without an `"id"` gets its zero-padded 1-based line number.
pub fn read_pairs(path: &Path) -> Result<Vec<CodePair>, CorpusError> {
    let reader = BufReader::new(File::open(path)?);
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: PairLine =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedLine {
                line: line_no,
                reason: e.to_string(),
            })?;
        for (field, value) in [("code", &record.code), ("docstring", &record.docstring)] {
            if value.trim().is_empty() {
                return Err(CorpusError::MalformedLine {
                    line: line_no,
                    reason: format!("empty {field}"),
                });
            }
        }
        pairs.push(CodePair {
            id: record.id.unwrap_or_else(|| format!("{line_no:08}")),
            code: record.code,
            docstring: record.docstring,
        });
    }
    Ok(pairs)
}

pub fn write_pairs(path: &Path, pairs: &[CodePair]) -> Result<(), CorpusError> {
    let mut out = BufWriter::new(File::create(path)?);
    for pair in pairs {
        serde_json::to_writer(&mut out, pair).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Parses each pair, derives its query and extracts its canonical graph.
/// Records that fail to parse or yield an empty query are counted and skipped.
pub fn build_triplets(pairs: &[CodePair]) -> (Vec<Triplet>, ExtractionReport) {
    let mut report = ExtractionReport {
        total: pairs.len(),
        ..Default::default()
    };
    let mut triplets = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let Ok(snippet) = parse_source(&pair.code) else {
            report.skipped_parse_error += 1;
            continue;
        };
        let query = derive_query(&pair.docstring);
        if query.is_empty() {
            report.skipped_empty_query += 1;
            continue;
        }
        report.parsed += 1;
        triplets.push(Triplet {
            id: pair.id.clone(),
            graph: extract_graph(&snippet),
            code_text: pair.code.clone(),
            query_text: query,
        });
    }
    (triplets, report)
}

/// Shuffles under `seed` and slices into train / valid / test.
pub fn split_corpus(
    triplets: &[Triplet],
    train_frac: f64,
    valid_frac: f64,
    seed: u64,
) -> Result<CorpusSplits, CorpusError> {
    let valid_fracs = train_frac.is_finite()
        && valid_frac.is_finite()
        && train_frac > 0.0
        && valid_frac > 0.0
        && train_frac + valid_frac < 1.0;
    if !valid_fracs {
        return Err(CorpusError::BadFractions {
            train: train_frac,
            valid: valid_frac,
        });
    }

    let mut shuffled = triplets.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let n = shuffled.len();
    let n_train = ((n as f64 * train_frac).round() as usize).min(n);
    let n_valid = ((n as f64 * valid_frac).round() as usize).min(n - n_train);
    let test = shuffled.split_off(n_train + n_valid);
    let valid = shuffled.split_off(n_train);
    Ok(CorpusSplits {
        train: shuffled,
        valid,
        test,
        seed,
    })
}

#[derive(Serialize, Deserialize)]
struct TripletLine {
    id: String,
    query: String,
    code: String,
    graph: GraphDocument,
}

pub fn triplet_to_json(t: &Triplet) -> String {
    let line = TripletLine {
        id: t.id.clone(),
        query: t.query_text.clone(),
        code: t.code_text.clone(),
        graph: GraphDocument::from(&t.graph),
    };
    serde_json::to_string(&line).expect("triplet records always serialize")
}

pub fn triplet_from_json(text: &str) -> Result<Triplet, SchemaError> {
    let line: TripletLine = serde_json::from_str(text)?;
    Ok(Triplet {
        id: line.id,
        graph: ConceptGraph::try_from(line.graph)?,
        code_text: line.code,
        query_text: line.query,
    })
}

pub fn write_triplets(path: &Path, triplets: &[Triplet]) -> Result<(), CorpusError> {
    let mut out = BufWriter::new(File::create(path)?);
    for t in triplets {
        out.write_all(triplet_to_json(t).as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_triplets(path: &Path) -> Result<Vec<Triplet>, CorpusError> {
    let reader = BufReader::new(File::open(path)?);
    let mut triplets = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t = triplet_from_json(&line).map_err(|e| CorpusError::MalformedLine {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        triplets.push(t);
    }
    Ok(triplets)
}
