use std::io;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use crowdwatch_cli::{run_analyze, run_generate, run_replay, Cli, Command, EXIT_DANGER, EXIT_ERROR, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };

    let result = match &cli.command {
        Command::Analyze(args) => run_analyze(args).map(|report| {
            println!("{}", serde_json::to_string_pretty(&report.summary).expect("summary serializes"));
            report.danger()
        }),
        Command::Replay(args) => run_replay(args, io::stdout().lock()).map(|report| report.danger()),
        Command::Generate(args) => run_generate(args, io::stdout().lock()).map(|n| {
            eprintln!("generated {n} messages");
            false
        }),
    };

    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(EXIT_DANGER as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
