//! Programmatic use of the check harness: run a small suite and print the
//! JSON report, byte-identical across runs with the same configuration.
//!
//! Run with: cargo run --example suite_report

use relcat_kit::verifier::{run_suite, SuiteConfig};

fn main() {
    let config = SuiteConfig {
        checks: vec!["iso".into(), "retraction".into(), "axioms".into()],
        n_range: (1, 2),
        seeds: vec![5],
        ..SuiteConfig::default()
    };
    let report = run_suite(&config).unwrap();
    println!("{}", report.to_json());
    eprintln!(
        "{} entries, {} failures",
        report.entries.len(),
        report.fail_count
    );
}
