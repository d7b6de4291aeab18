use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use skewbc::scenario::{run_file, EXIT_CONFIG};
use skewbc::verify::{verify, Selector, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "skewbc", version, about = "Energy-stable SBP-SAT boundary conditions for skew-symmetric flow models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for initial noise and the random verification draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for the CSV and JSON output of `run`.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Override the operator order (2, 4 or 6).
    #[arg(long, global = true)]
    order: Option<u32>,
    /// Override the monitor cadence in steps.
    #[arg(long, global = true)]
    cadence: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML scenario and write its energy report.
    Run { config: PathBuf },
    /// Run verification suites: sbp, rotations, lemma4 (alias boundary-term), energy-rate, bounds, strong or all.
    Verify { selector: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { ref config } => {
            let outcome = run_file(config, |c| {
                if let Some(s) = cli.seed {
                    c.seed = s;
                }
                if let Some(d) = &cli.out_dir {
                    c.output.dir = d.clone();
                }
                if let Some(o) = cli.order {
                    c.order = o;
                }
                if let Some(k) = cli.cadence {
                    c.time.cadence = k;
                }
            });
            if let Some(e) = &outcome.error {
                eprintln!("error: {e}");
            }
            if let Some(s) = &outcome.summary {
                println!(
                    "{}: {} steps to t = {}, energy {:.6e} -> {:.6e}, max identity residual {:.2e}",
                    s.verdict, s.steps, s.time_reached, s.initial_energy, s.final_energy, s.max_identity_residual
                );
                println!("bound ({}): {}", s.bound.mode, s.bound.detail);
                if let Some(a) = &s.abort {
                    println!("aborted: {a}");
                }
            }
            if let (Some(c), Some(j)) = (&outcome.csv_path, &outcome.json_path) {
                println!("wrote {} and {}", c.display(), j.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Command::Verify { ref selector } => {
            let Some(sel) = Selector::parse(selector) else {
                eprintln!(
                    "error: unknown selector `{selector}` (expected one of {})",
                    Selector::NAMES.join(", ")
                );
                return ExitCode::from(EXIT_CONFIG as u8);
            };
            let seed = cli.seed.unwrap_or(DEFAULT_SEED);
            let report = verify(sel, seed);
            for c in &report.checks {
                println!("{c}");
            }
            let failed = report.failures().count();
            println!("seed {seed}: {} checks, {failed} failed", report.checks.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
