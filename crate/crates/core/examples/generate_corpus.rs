//! Write a synthetic bug-report CSV for trying out the toolkit offline.
//!
//! Usage: generate_corpus <out.csv> [rows] [high_prevalence] [seed]

use bugsev::synth;

fn main() {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| {
        eprintln!("usage: generate_corpus <out.csv> [rows] [high_prevalence] [seed]");
        std::process::exit(2);
    });
    let rows: usize = args.next().map(|a| a.parse().expect("rows")).unwrap_or(1000);
    let prevalence: f64 = args
        .next()
        .map(|a| a.parse().expect("high_prevalence"))
        .unwrap_or(0.128);
    let seed: u64 = args.next().map(|a| a.parse().expect("seed")).unwrap_or(42);

    let corpus = synth::imbalanced_corpus(rows, prevalence, 0.85, seed);
    std::fs::write(&out, synth::to_csv(&corpus)).expect("write csv");
    eprintln!(
        "wrote {} rows ({} HIGH / {} LOW) to {out}",
        corpus.len(),
        corpus.high_count(),
        corpus.low_count()
    );
}
