use std::process::ExitCode;

use clap::error::ErrorKind;
use ostrovsky_cli::{dispatch, parse_config, ConfigError};

fn main() -> ExitCode {
    let cfg = match parse_config(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(ConfigError::Clap(e)) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(ConfigError::Clap(e)) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(&cfg) {
        Ok(report) if report.failed() => {
            for c in report.failed_checks() {
                eprintln!("check failed: {}", c.name);
            }
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
