use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dyadic_maximal::sweep::{self, QSpec, RSpec, SweepConfig};

/// Generate random dyadic instances, verify them, and summarize reports.
#[derive(Parser)]
#[command(name = "dyadic-maximal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random instance files into --out.
    Generate(SweepArgs),
    /// Check instance files (or directories of them); append records to <out>/report.jsonl.
    Verify {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(required = true)]
        instances: Vec<PathBuf>,
    },
    /// Summarize a report as CSV.
    Report {
        report: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
    p: Vec<f64>,
    /// Numbers, `p`, `2p` or `inf`.
    #[arg(long, value_delimiter = ',', default_value = "p,2p,inf")]
    q: Vec<String>,
    /// `auto` or a real > 1.
    #[arg(long, default_value = "auto")]
    r: String,
    #[arg(long, default_value_t = 1)]
    depth_min: usize,
    #[arg(long, default_value_t = 4)]
    depth_max: usize,
    #[arg(long, default_value_t = 2)]
    branch_min: usize,
    #[arg(long, default_value_t = 3)]
    branch_max: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value = "sweep")]
    out: PathBuf,
    /// Halve C(p) to exercise the failure path.
    #[arg(long, hide = true)]
    debug_halve_cp: bool,
}

impl SweepArgs {
    fn config(&self) -> dyadic_maximal::Result<SweepConfig> {
        let config = SweepConfig {
            trials: self.trials,
            seed: self.seed,
            p: self.p.clone(),
            q: self.q.iter().map(|s| s.parse::<QSpec>()).collect::<Result<_, _>>()?,
            r: self.r.parse::<RSpec>()?,
            depth: (self.depth_min, self.depth_max),
            branching: (self.branch_min, self.branch_max),
            tolerance: self.tol,
            out: self.out.clone(),
            cp_scale: if self.debug_halve_cp { 0.5 } else { 1.0 },
            ..Default::default()
        };
        config.validate()?;
        Ok(config)
    }
}

fn run(cli: Cli) -> dyadic_maximal::Result<bool> {
    match cli.command {
        Command::Generate(args) => {
            for path in sweep::cmd_generate(&args.config()?)? {
                println!("{}", path.display());
            }
            Ok(true)
        }
        Command::Verify { sweep: args, instances } => {
            let summary = sweep::cmd_verify(&args.config()?, &instances)?;
            for rec in summary.failures() {
                eprintln!(
                    "FAIL {} p={} q={} {}{}",
                    rec.instance,
                    rec.p,
                    rec.q,
                    rec.check.as_str(),
                    rec.failed_link
                        .as_deref()
                        .map(|l| format!(" link={l}"))
                        .unwrap_or_default()
                );
            }
            let failed = summary.failures().count();
            println!(
                "{} records, {} failed, report {}",
                summary.records.len(),
                failed,
                summary.report.display()
            );
            Ok(failed == 0)
        }
        Command::Report { report, out } => {
            match out {
                Some(path) => sweep::cmd_report(&report, std::fs::File::create(path)?)?,
                None => sweep::cmd_report(&report, std::io::stdout().lock())?,
            };
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
