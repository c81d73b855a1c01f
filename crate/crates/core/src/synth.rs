//! Synthetic bug-report corpora for offline testing and benchmarking.
//!
//! The real Eclipse Bugzilla export is not redistributable here, so the test
//! suites run against generated corpora with controllable class balance and
//! text signal.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{BugReport, Corpus, ExclusionLedger, SeverityClass};

const BUG_TYPES: [&str; 4] = ["Database", "Network", "UI", "Documentation"];
const PRIORITIES: [&str; 3] = ["P1", "P2", "P3"];
const HIGH_SEVERITIES: [&str; 3] = ["blocker", "critical", "major"];
const LOW_SEVERITIES: [&str; 3] = ["normal", "minor", "trivial"];

fn vocab(prefix: &str, size: usize) -> Vec<String> {
    (0..size).map(|i| format!("{prefix}{i}")).collect()
}

fn build_report(
    rng: &mut ChaCha8Rng,
    bug_id: u64,
    label: SeverityClass,
    description: String,
) -> BugReport {
    let raw_severity = if label.is_high() {
        HIGH_SEVERITIES[rng.gen_range(0..HIGH_SEVERITIES.len())]
    } else {
        LOW_SEVERITIES[rng.gen_range(0..LOW_SEVERITIES.len())]
    };
    BugReport {
        project: "Synth".to_string(),
        bug_id,
        resolution_status: "FIXED".to_string(),
        short_description: description,
        bug_type: Some(BUG_TYPES[rng.gen_range(0..BUG_TYPES.len())].to_string()),
        priority_label: Some(PRIORITIES[rng.gen_range(0..PRIORITIES.len())].to_string()),
        raw_severity: raw_severity.to_string(),
    }
}

fn assemble(reports: Vec<BugReport>, labels: Vec<SeverityClass>, source: &str) -> Corpus {
    let ledger = ExclusionLedger {
        source: source.to_string(),
        total_rows: reports.len(),
        kept_rows: reports.len(),
        excluded: Vec::new(),
    };
    Corpus::new(reports, labels, ledger).expect("parallel reports and labels")
}

/// Corpus with `n_high` HIGH rows out of `n` and unstructured descriptions.
///
/// Useful when only the label distribution matters (splits, folds, weights).
pub fn random_corpus(n: usize, n_high: usize, seed: u64) -> Corpus {
    assert!(n_high <= n, "n_high must not exceed n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = vocab("word", 40);
    let mut reports = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i < n_high {
            SeverityClass::High
        } else {
            SeverityClass::Low
        };
        let len = rng.gen_range(3..8);
        let description = (0..len)
            .map(|_| words[rng.gen_range(0..words.len())].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        reports.push(build_report(&mut rng, i as u64 + 1, label, description));
        labels.push(label);
    }
    assemble(reports, labels, "synthetic:random")
}

/// Perfectly separable corpus: the two classes draw their descriptions from
/// disjoint vocabularies, `docs_per_class` rows each.
pub fn separable_corpus(docs_per_class: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let high_words = vocab("crash", 30);
    let low_words = vocab("tweak", 30);
    let mut reports = Vec::with_capacity(docs_per_class * 2);
    let mut labels = Vec::with_capacity(docs_per_class * 2);
    let mut bug_id = 0u64;
    for (label, words) in [
        (SeverityClass::High, &high_words),
        (SeverityClass::Low, &low_words),
    ] {
        for _ in 0..docs_per_class {
            bug_id += 1;
            let len = rng.gen_range(4..9);
            let description = (0..len)
                .map(|_| words[rng.gen_range(0..words.len())].as_str())
                .collect::<Vec<_>>()
                .join(" ");
            reports.push(build_report(&mut rng, bug_id, label, description));
            labels.push(label);
        }
    }
    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.shuffle(&mut rng);
    let reports = order.iter().map(|&i| reports[i].clone()).collect();
    let labels = order.iter().map(|&i| labels[i]).collect();
    assemble(reports, labels, "synthetic:separable")
}

/// Imbalanced corpus with overlapping vocabularies.
///
/// `high_prevalence` controls the HIGH fraction and `signal` in `[0, 1]`
/// controls how strongly class-specific words dominate each description.
/// With partial signal the classes overlap, so unweighted learners drift
/// toward the majority class.
pub fn imbalanced_corpus(n: usize, high_prevalence: f64, signal: f64, seed: u64) -> Corpus {
    assert!((0.0..=1.0).contains(&high_prevalence));
    assert!((0.0..=1.0).contains(&signal));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shared = vocab("shared", 60);
    let high_words = vocab("fault", 15);
    let low_words = vocab("polish", 15);
    let n_high = ((n as f64) * high_prevalence).round() as usize;

    let mut reports = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i < n_high {
            SeverityClass::High
        } else {
            SeverityClass::Low
        };
        let own = if label.is_high() {
            &high_words
        } else {
            &low_words
        };
        let other = if label.is_high() {
            &low_words
        } else {
            &high_words
        };
        let len = rng.gen_range(5..10);
        let mut tokens = Vec::with_capacity(len);
        for _ in 0..len {
            let roll: f64 = rng.gen();
            let pool = if roll < 0.5 {
                &shared
            } else if rng.gen::<f64>() < (0.5 + signal / 2.0) {
                own
            } else {
                other
            };
            tokens.push(pool[rng.gen_range(0..pool.len())].as_str());
        }
        reports.push(build_report(
            &mut rng,
            i as u64 + 1,
            label,
            tokens.join(" "),
        ));
        labels.push(label);
    }

    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.shuffle(&mut rng);
    let reports: Vec<BugReport> = order.iter().map(|&i| reports[i].clone()).collect();
    let labels = order.iter().map(|&i| labels[i]).collect();
    assemble(reports, labels, "synthetic:imbalanced")
}

/// Render a corpus back to the seven-column CSV format, for ingest tests.
pub fn to_csv(corpus: &Corpus) -> String {
    let mut out = String::from(
        "Project,Bug_ID,Resolution_Status,Short_Description,Bug_Type,Priority_Label,Severity_Label\n",
    );
    for report in corpus.reports() {
        let quote = |s: &str| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            quote(&report.project),
            report.bug_id,
            quote(&report.resolution_status),
            quote(&report.short_description),
            quote(report.bug_type.as_deref().unwrap_or("")),
            quote(report.priority_label.as_deref().unwrap_or("")),
            quote(&report.raw_severity),
        ));
    }
    out
}
