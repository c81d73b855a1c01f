//! Canonical corpus persistence: one JSON record per line, with the
//! exclusion ledger written alongside. Downstream commands never re-parse
//! CSV quirks.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use bugsev::corpus::{BugReport, Corpus, ExclusionLedger, SeverityClass};

#[derive(Serialize, Deserialize)]
struct CorpusRecord {
    #[serde(flatten)]
    report: BugReport,
    label: SeverityClass,
}

/// Ledger path next to a corpus file: `corpus.jsonl` -> `corpus.ledger.json`.
pub fn ledger_path(corpus_path: &Path) -> PathBuf {
    let stem = corpus_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "corpus".to_string());
    corpus_path.with_file_name(format!("{stem}.ledger.json"))
}

pub fn write_corpus(corpus: &Corpus, path: &Path) -> anyhow::Result<()> {
    let mut out = Vec::new();
    for (report, &label) in corpus.reports().iter().zip(corpus.labels()) {
        let record = CorpusRecord {
            report: report.clone(),
            label,
        };
        serde_json::to_writer(&mut out, &record)?;
        out.push(b'\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing corpus to {}", path.display()))?;

    let ledger = serde_json::to_string_pretty(corpus.ledger())?;
    let ledger_file = ledger_path(path);
    std::fs::write(&ledger_file, ledger)
        .with_context(|| format!("writing ledger to {}", ledger_file.display()))?;
    Ok(())
}

pub fn read_corpus(path: &Path) -> anyhow::Result<Corpus> {
    let content = std::fs::read_to_string(path)
        .with_context(|| format!("reading corpus from {}", path.display()))?;
    let mut reports = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: CorpusRecord = serde_json::from_str(line)
            .with_context(|| format!("corpus line {}", i + 1))?;
        reports.push(record.report);
        labels.push(record.label);
    }
    let ledger = ExclusionLedger {
        source: path.display().to_string(),
        total_rows: reports.len(),
        kept_rows: reports.len(),
        excluded: Vec::new(),
    };
    Ok(Corpus::new(reports, labels, ledger)?)
}

/// Write a string atomically next to its final location.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    let mut file = std::fs::File::create(&tmp)?;
    file.write_all(contents.as_bytes())?;
    file.sync_all()?;
    drop(file);
    std::fs::rename(&tmp, path)?;
    Ok(())
}
