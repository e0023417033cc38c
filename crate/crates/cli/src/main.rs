use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use resonance_recoil::error::{EXIT_CONFIG, EXIT_OK};
use resonance_recoil::{run, Cli};
use serde_json::json;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::from(EXIT_OK as u8);
        }
        Err(e) => {
            let message = e.to_string();
            let first = message
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            eprintln!(
                "{}",
                json!({"error": "config", "exit_code": EXIT_CONFIG, "message": first})
            );
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
