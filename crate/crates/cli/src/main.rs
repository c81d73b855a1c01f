//! `bugsev`: ingest bug-report CSVs, train severity classifiers, evaluate,
//! benchmark all nine model families, and score individual reports.
//!
//! Exit codes: 0 success, 1 partial benchmark (some model rows failed),
//! 2 usage or schema errors, 3 data errors, 4 artifact checksum mismatch,
//! 5 unsupported artifact version.

use bugsev_cli::{artifact, corpus_io};

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand};

use bugsev::config::{derive_seed, RunConfig};
use bugsev::corpus::{
    parse_csv, stratified_split, BugReport, MappedSeverity, SchemaConfig, SeverityPolicy,
};
use bugsev::eval::{benchmark, evaluate_model};
use bugsev::model::{train_model, ModelKind};
use bugsev::Error as CoreError;

use artifact::{load_artifact, save_artifact, ArtifactError};

const EXIT_OK: i32 = 0;
const EXIT_PARTIAL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_DATA: i32 = 3;
const EXIT_CHECKSUM: i32 = 4;
const EXIT_VERSION: i32 = 5;

#[derive(Parser)]
#[command(name = "bugsev", version, about = "Bug severity prediction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a bug-report CSV into the canonical line-JSON corpus format.
    Ingest {
        /// Input CSV with the seven-column bug-report schema.
        #[arg(long)]
        input: PathBuf,
        /// Output corpus path; the exclusion ledger lands alongside.
        #[arg(long)]
        out: PathBuf,
        /// Optional TOML column-name remapping.
        #[arg(long)]
        schema: Option<PathBuf>,
        /// Optional TOML severity policy (label = "high"|"low"|"excluded").
        #[arg(long)]
        policy: Option<PathBuf>,
    },
    /// Train one model on the configured training split and save an artifact.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// One of: logreg, linear-svm, passive-aggressive, sgd, gbdt-exact,
        /// gbdt-histogram, gbdt-oblivious, naive-bayes, knn.
        #[arg(long)]
        model: String,
        /// Optional TOML run configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a saved artifact against a labelled corpus.
    Evaluate {
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Run all nine models under one shared split; write JSON and Markdown.
    Benchmark {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Report JSON path; the Markdown table lands alongside as `.md`.
        #[arg(long)]
        out: PathBuf,
        /// Override the configured fold count.
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Predict the severity of a single report.
    Predict {
        #[arg(long)]
        artifact: PathBuf,
        /// Short description text (may be empty).
        #[arg(long, default_value = "")]
        text: String,
        #[arg(long)]
        bug_type: Option<String>,
        #[arg(long)]
        priority: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    };
    std::process::exit(code);
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    if let Some(artifact_err) = err.downcast_ref::<ArtifactError>() {
        return match artifact_err {
            ArtifactError::Version { .. } => EXIT_VERSION,
            ArtifactError::Checksum { .. } => EXIT_CHECKSUM,
            _ => EXIT_DATA,
        };
    }
    if let Some(core_err) = err.downcast_ref::<CoreError>() {
        return match core_err {
            CoreError::Schema { .. } | CoreError::Config(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
    }
    EXIT_DATA
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Ingest {
            input,
            out,
            schema,
            policy,
        } => cmd_ingest(&input, &out, schema.as_deref(), policy.as_deref()),
        Command::Train {
            corpus,
            model,
            config,
            out,
        } => cmd_train(&corpus, &model, config.as_deref(), &out),
        Command::Evaluate { artifact, corpus } => cmd_evaluate(&artifact, &corpus),
        Command::Benchmark {
            corpus,
            config,
            out,
            folds,
        } => cmd_benchmark(&corpus, config.as_deref(), &out, folds),
        Command::Predict {
            artifact,
            text,
            bug_type,
            priority,
        } => cmd_predict(&artifact, &text, bug_type, priority),
    }
}

fn load_toml<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let content = std::fs::read_to_string(path)
        .with_context(|| format!("reading {what} from {}", path.display()))?;
    toml::from_str(&content).with_context(|| format!("parsing {what} from {}", path.display()))
}

fn load_run_config(path: Option<&Path>) -> anyhow::Result<RunConfig> {
    match path {
        Some(path) => load_toml(path, "run config"),
        None => Ok(RunConfig::default()),
    }
}

fn cmd_ingest(
    input: &Path,
    out: &Path,
    schema: Option<&Path>,
    policy: Option<&Path>,
) -> anyhow::Result<i32> {
    let schema = match schema {
        Some(path) => load_toml::<SchemaConfig>(path, "schema mapping")?,
        None => SchemaConfig::default(),
    };
    let policy = match policy {
        Some(path) => {
            let table: BTreeMap<String, MappedSeverity> = load_toml(path, "severity policy")?;
            SeverityPolicy::new(table)
        }
        None => SeverityPolicy::default(),
    };

    let corpus = parse_csv(input, &schema, &policy)?;
    corpus_io::write_corpus(&corpus, out)?;

    let ledger = corpus.ledger();
    println!(
        "ingested {} rows: kept {}, excluded {} ({} HIGH / {} LOW, prevalence {:.1}%)",
        ledger.total_rows,
        ledger.kept_rows,
        ledger.excluded.len(),
        corpus.high_count(),
        corpus.low_count(),
        corpus.prevalence() * 100.0
    );
    println!(
        "corpus written to {}, ledger to {}",
        out.display(),
        corpus_io::ledger_path(out).display()
    );
    if corpus.is_empty() {
        eprintln!("warning: input contained no usable data rows");
    } else if corpus.is_degenerate() {
        eprintln!("warning: corpus is degenerate (single class); training will fail");
    }
    Ok(EXIT_OK)
}

fn resolve_model(name: &str) -> anyhow::Result<ModelKind> {
    match ModelKind::parse(name) {
        Some(kind) => Ok(kind),
        None => {
            let reason = if name.eq_ignore_ascii_case("distilbert") {
                "unsupported: out of scope".to_string()
            } else {
                format!("unknown model `{name}`")
            };
            Err(anyhow::Error::new(CoreError::Config(format!(
                "{reason}; valid names: {}",
                ModelKind::valid_names().join(", ")
            ))))
        }
    }
}

fn cmd_train(
    corpus_path: &Path,
    model_name: &str,
    config_path: Option<&Path>,
    out: &Path,
) -> anyhow::Result<i32> {
    let kind = resolve_model(model_name)?;
    let config = load_run_config(config_path)?;
    let corpus = corpus_io::read_corpus(corpus_path)?;
    if corpus.is_degenerate() || corpus.len() < 2 {
        return Err(anyhow::Error::new(CoreError::DegenerateLabels(format!(
            "corpus {} does not contain both classes",
            corpus_path.display()
        ))));
    }

    let split_seed = derive_seed(config.seed, "split");
    let (train, test) = stratified_split(&corpus, config.test_fraction, split_seed)?;
    let model = train_model(kind, train.reports(), train.labels(), &config)?;

    if !test.is_empty() {
        let report = evaluate_model(&model, test.reports(), test.labels())?;
        println!("held-out metrics: {}", serde_json::to_string(&report)?);
    } else {
        eprintln!("warning: empty test split, no held-out metrics");
    }

    save_artifact(&model, out)?;
    println!("artifact written to {}", out.display());
    Ok(EXIT_OK)
}

fn cmd_evaluate(artifact_path: &Path, corpus_path: &Path) -> anyhow::Result<i32> {
    let model = load_artifact(artifact_path)?;
    let corpus = corpus_io::read_corpus(corpus_path)?;
    let report = evaluate_model(&model, corpus.reports(), corpus.labels())?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(EXIT_OK)
}

fn cmd_benchmark(
    corpus_path: &Path,
    config_path: Option<&Path>,
    out: &Path,
    folds: Option<usize>,
) -> anyhow::Result<i32> {
    let mut config = load_run_config(config_path)?;
    if let Some(folds) = folds {
        config.folds = folds;
    }
    let corpus = corpus_io::read_corpus(corpus_path)?;
    let report = benchmark(&corpus, &config)?;

    corpus_io::write_atomic(out, &report.to_json()?)?;
    let markdown_path = out.with_extension("md");
    corpus_io::write_atomic(&markdown_path, &report.to_markdown())?;

    println!("{}", report.to_markdown());
    println!(
        "report written to {} and {}",
        out.display(),
        markdown_path.display()
    );
    if report.has_failures() {
        for model in report.models.iter().filter(|m| m.error.is_some()) {
            eprintln!(
                "model {} failed: {}",
                model.model,
                model.error.as_deref().unwrap_or("unknown")
            );
        }
        return Ok(EXIT_PARTIAL);
    }
    Ok(EXIT_OK)
}

fn cmd_predict(
    artifact_path: &Path,
    text: &str,
    bug_type: Option<String>,
    priority: Option<String>,
) -> anyhow::Result<i32> {
    let model = load_artifact(artifact_path)?;
    let report = BugReport {
        project: String::new(),
        bug_id: 0,
        resolution_status: String::new(),
        short_description: text.to_string(),
        bug_type,
        priority_label: priority,
        raw_severity: String::new(),
    };
    let prediction = model.predict_report(&report)?;
    let output = serde_json::json!({
        "model": model.kind.name(),
        "class": prediction.class,
        "probability": prediction.probability,
        "score": prediction.score,
    });
    println!("{output}");
    Ok(EXIT_OK)
}
