//! Runs one suite of the check registry in-process and prints its JSON lines.

use shav_lab::suite::{jsonl, select, SuiteConfig};

fn main() {
    let suite = std::env::args().nth(1).unwrap_or_else(|| "special-fn".to_string());
    let cfg = SuiteConfig::with_overrides(42, 1.0, &[]).expect("default config");
    let checks = select(&suite).unwrap_or_else(|e| panic!("{e}"));
    let reports: Vec<_> = checks.iter().map(|c| c.run(&cfg)).collect();
    print!("{}", jsonl(&reports, &cfg));
}
