mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use fracmt_core::{Error, Result};
use serde_json::json;

use args::Cli;

const THREADS_VAR: &str = "FRACMT_THREADS";

fn exit_code(kind: &str) -> u8 {
    match kind {
        "accuracy" => 3,
        "io" => 4,
        _ => 2,
    }
}

fn report_error(kind: &str, message: &str) -> ExitCode {
    let obj = json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{obj}");
    ExitCode::from(exit_code(kind))
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Error::Input(format!(
            "{THREADS_VAR} must be a non-negative integer, got `{raw}`"
        ))
    })?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Input(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let report = commands::execute(cli)?;
    match &cli.out {
        Some(path) => {
            report.write_to(cli.format, path)?;
        }
        None => {
            let text = report.render(cli.format)?;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("input", e.render().to_string().trim_end()),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(e.kind(), &e.to_string()),
    }
}
