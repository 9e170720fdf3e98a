//! A small end-to-end sweep: generate instances, verify them, summarize.

use dyadic_maximal::sweep::{cmd_generate, cmd_report, cmd_verify, SweepConfig};

fn main() -> dyadic_maximal::Result<()> {
    let dir = std::env::temp_dir().join(format!("dyadic-sweep-{}", std::process::id()));
    let config = SweepConfig {
        trials: 5,
        seed: 1,
        out: dir.clone(),
        ..Default::default()
    };
    let files = cmd_generate(&config)?;
    println!("generated {} instances in {}", files.len(), dir.display());

    let summary = cmd_verify(&config, &files)?;
    println!(
        "{} records, {} failures, report {}",
        summary.records.len(),
        summary.failures().count(),
        summary.report.display()
    );
    cmd_report(&summary.report, std::io::stdout().lock())?;
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
