use std::process::ExitCode;

use clap::Parser;
use spatial_infinity::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for c in &outcome.checks {
                let mark = if c.passed { "pass" } else { "FAIL" };
                println!("{mark}  {:<40} {:.3e} (threshold {:.1e})", c.name, c.value, c.threshold);
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
