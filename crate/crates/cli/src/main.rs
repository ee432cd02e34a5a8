mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, ToeplitzCommand};
use commands::CliResult;
use report::Outcome;

fn dispatch(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Generate(a) => commands::generate(a),
        Command::Chowla(a) => commands::chowla(a),
        Command::Sarnak(a) => commands::sarnak(a),
        Command::Davenport(a) => commands::davenport(a),
        Command::Entropy(a) => commands::entropy(a),
        Command::HatTest(a) => commands::hat_test(a),
        Command::Toeplitz(ToeplitzCommand::Build(a)) => commands::toeplitz_build(a),
        Command::Toeplitz(ToeplitzCommand::Analyze(a)) => commands::toeplitz_analyze(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Determinize(a) => commands::determinize(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot start {} worker threads: {e}", cli.threads);
        return ExitCode::from(2);
    }
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report::render(&outcome, cli.report, rayon::current_num_threads());
    match &cli.report_path {
        Some(path) => {
            if let Err(e) = report::write_atomic(path, text.as_bytes()) {
                eprintln!("error: cannot write report `{}`: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if outcome.passed == Some(false) {
        if let Some(note) = &outcome.failure_note {
            eprintln!("{} failed: {note}", outcome.command);
        }
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
