use std::io::Write;
use std::process::ExitCode;

use argmin_eig_cli::{configure_threads, emit, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let report = match run(&cli) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    };
    match emit(&report, cli.options.output.as_deref()) {
        Ok(Some(text)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
        }
        Ok(None) => {}
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(report.exit as u8)
}
