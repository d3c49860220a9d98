//! The `cgsearch` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{
    build_triplets, generate_synthetic, read_pairs, read_triplets, split_corpus, write_pairs,
    write_triplets,
};
use crate::graph::{extract_graph, graph_to_json, stats, GraphStats};
use crate::model::{checkpoint_from_json, checkpoint_to_json, Model};
use crate::search::{embed_candidates, evaluate_mrr, search, train, TrainConfig};
use crate::syntax::parse_source;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cgsearch",
    version,
    about = "Concept-graph code search toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the canonical concept graph of a Java snippet
    Extract { snippet: PathBuf },
    /// Aggregate graph statistics over a triplet file
    Stats { triplets: PathBuf },
    /// Turn a ⟨code, docstring⟩ pairs file into triplets
    BuildCorpus {
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic pairs file
    GenSynthetic {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shuffle triplets into train/valid/test files
    Split {
        triplets: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        train_frac: f64,
        #[arg(long, default_value_t = 0.1)]
        valid_frac: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train from a JSON config; flags override its paths
    Train(TrainArgs),
    /// Pooled MRR of a checkpoint on a triplet file
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, default_value_t = 1000)]
        pool_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank by code vectors alone
        #[arg(long)]
        no_graph: bool,
    },
    /// Rank candidate triplets for a natural-language query
    Search {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long)]
        no_graph: bool,
    },
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    valid: Option<PathBuf>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    best_checkpoint: Option<PathBuf>,
    #[arg(long)]
    metrics: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

fn data<E: std::fmt::Display>(context: impl std::fmt::Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Data(format!("{context}: {e}"))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(data(path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(data(path.display()))
}

fn load_checkpoint(path: &Path) -> Result<Model, Failure> {
    checkpoint_from_json(&read_text(path)?).map_err(data(path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("output types serialize")
}

/// Runs one command line, writing results to `out` and diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_DATA
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let mut emit = |line: String| writeln!(out, "{line}").map_err(data("stdout"));
    match command {
        Command::Extract { snippet } => {
            let source = read_text(&snippet)?;
            let parsed = parse_source(&source).map_err(data(snippet.display()))?;
            emit(graph_to_json(&extract_graph(&parsed)))
        }
        Command::Stats { triplets } => {
            let triplets = read_triplets(&triplets).map_err(data(triplets.display()))?;
            let mut total = GraphStats::default();
            for t in &triplets {
                total.merge(&stats(&t.graph));
            }
            emit(to_json(&total))
        }
        Command::BuildCorpus { pairs, out: path } => {
            let pairs = read_pairs(&pairs).map_err(data(pairs.display()))?;
            let (triplets, report) = build_triplets(&pairs);
            write_triplets(&path, &triplets).map_err(data(path.display()))?;
            emit(to_json(&report))
        }
        Command::GenSynthetic { n, seed, out: path } => {
            write_pairs(&path, &generate_synthetic(n, seed)).map_err(data(path.display()))
        }
        Command::Split {
            triplets,
            train_frac,
            valid_frac,
            seed,
            out_dir,
        } => {
            let all = read_triplets(&triplets).map_err(data(triplets.display()))?;
            let splits = split_corpus(&all, train_frac, valid_frac, seed)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            fs::create_dir_all(&out_dir).map_err(data(out_dir.display()))?;
            for (name, part) in [
                ("train", &splits.train),
                ("valid", &splits.valid),
                ("test", &splits.test),
            ] {
                let path = out_dir.join(format!("{name}.jsonl"));
                write_triplets(&path, part).map_err(data(path.display()))?;
            }
            emit(to_json(&serde_json::json!({
                "train": splits.train.len(),
                "valid": splits.valid.len(),
                "test": splits.test.len(),
                "seed": seed,
            })))
        }
        Command::Train(args) => run_train(args, &mut emit, err),
        Command::Eval {
            checkpoint,
            test,
            pool_size,
            seed,
            no_graph,
        } => {
            if pool_size == 0 {
                return Err(Failure::Usage("--pool-size must be at least 1".into()));
            }
            let model = load_checkpoint(&checkpoint)?;
            let test_set = read_triplets(&test).map_err(data(test.display()))?;
            let result = evaluate_mrr(&model, &test_set, pool_size, seed, !no_graph)
                .map_err(data(test.display()))?;
            emit(to_json(&result))
        }
        Command::Search {
            checkpoint,
            candidates,
            query,
            top_k,
            no_graph,
        } => {
            let model = load_checkpoint(&checkpoint)?;
            let pool = read_triplets(&candidates).map_err(data(candidates.display()))?;
            let index =
                embed_candidates(&model, &pool, !no_graph).map_err(data(candidates.display()))?;
            let ranked =
                search(&model, &index, &query, top_k).map_err(data(candidates.display()))?;
            for (rank, hit) in ranked.iter().enumerate() {
                emit(to_json(&serde_json::json!({
                    "rank": rank + 1,
                    "id": hit.id,
                    "score": hit.score,
                })))?;
            }
            Ok(())
        }
    }
}

fn run_train(
    args: TrainArgs,
    emit: &mut dyn FnMut(String) -> Result<(), Failure>,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let text = read_text(&args.config)?;
    let mut config: TrainConfig = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.config.display())))?;
    let overrides = [
        (args.train, &mut config.train_path),
        (args.valid, &mut config.valid_path),
        (args.checkpoint, &mut config.checkpoint_path),
        (args.best_checkpoint, &mut config.best_checkpoint_path),
        (args.metrics, &mut config.metrics_path),
    ];
    for (flag, field) in overrides {
        if flag.is_some() {
            *field = flag;
        }
    }
    let required = |p: &Option<PathBuf>, name: &str| {
        p.clone()
            .ok_or_else(|| Failure::Usage(format!("config needs {name} (or the matching flag)")))
    };
    let train_path = required(&config.train_path, "train_path")?;
    let valid_path = required(&config.valid_path, "valid_path")?;
    let checkpoint_path = required(&config.checkpoint_path, "checkpoint_path")?;
    config
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let train_set = read_triplets(&train_path).map_err(data(train_path.display()))?;
    let valid_set = read_triplets(&valid_path).map_err(data(valid_path.display()))?;
    let outcome = train(&config, &train_set, &valid_set).map_err(data("training"))?;

    for m in &outcome.metrics {
        let _ = writeln!(
            err,
            "epoch {:>3}  loss {:.4}  valid mrr {:.4}",
            m.epoch, m.train_loss, m.valid_mrr
        );
    }
    write_text(&checkpoint_path, &checkpoint_to_json(&outcome.model))?;
    if let Some(path) = &config.best_checkpoint_path {
        write_text(path, &checkpoint_to_json(&outcome.best_model))?;
    }
    if let Some(path) = &config.metrics_path {
        let lines: String = outcome.metrics.iter().map(|m| to_json(m) + "\n").collect();
        write_text(path, &lines)?;
    }
    emit(to_json(&serde_json::json!({
        "initial_loss": outcome.initial_loss,
        "final_loss": outcome.metrics.last().map(|m| m.train_loss),
        "best_epoch": outcome.best_epoch,
        "best_valid_mrr": outcome.metrics[outcome.best_epoch - 1].valid_mrr,
    })))
}

/// Entry point for the binary.
pub fn cli_main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
