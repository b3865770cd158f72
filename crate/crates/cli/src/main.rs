use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use semicentroid_cli::args::Cli;
use semicentroid_cli::commands::execute;

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let outcome = execute(cli.command)?;
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(outcome.text.as_bytes())
        .context("writing to stdout")?;
    Ok(if outcome.success {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
