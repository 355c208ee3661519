//! Runs every acceptance criterion at its stated tolerance and prints one line per criterion.
//! Exits with status 1 if any criterion fails.

use lempert_cli::verify::{Config, CRITERIA};

fn main() {
    let config = Config::default();
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for criterion in CRITERIA {
        if !only.is_empty() && !only.iter().any(|t| criterion.selected_by(t)) {
            continue;
        }
        let report = criterion.run(&config, None);
        println!("{}", report.line());
        if !report.passed() {
            failed.push(report.name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: {} failed: {}", failed.len(), failed.join(", "));
        std::process::exit(1);
    }
}
