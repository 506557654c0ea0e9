use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use instanton::cli::{emit, run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    eprintln!("{}: {:.3} s", report.command, start.elapsed().as_secs_f64());
    match emit(&cli, &report) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: writing report: {e}");
            ExitCode::from(2)
        }
    }
}
