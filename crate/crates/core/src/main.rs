use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use expflow::cli::{execute, exit_code, Command, RunConfig};

/// Expansive flows: entropy estimates, certificates and checks.
#[derive(Parser, Debug)]
#[command(name = "expflow", version)]
struct Args {
    /// entropy | certify | verify | shadow | code | expansivity | spec | fixtures
    command: String,
    /// Plain-text key = value configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// key=value overrides applied after the file.
    #[arg(value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let prepared = args.command.parse::<Command>().and_then(|cmd| {
        let mut cfg = match &args.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::new(),
        };
        for kv in &args.set {
            cfg.assign(kv)?;
        }
        Ok((cmd, cfg))
    });
    let code = match prepared {
        Ok((cmd, cfg)) => execute(cmd, &cfg),
        Err(e) => {
            eprintln!("expflow: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
