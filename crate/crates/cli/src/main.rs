mod config;
mod run;

use std::process::ExitCode;

use clap::Parser;

use config::{Args, JobConfig};
use run::EXIT_PARSE;

fn main() -> ExitCode {
    let cfg = match JobConfig::from_args(Args::parse()) {
        Ok(c) => c,
        Err(m) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_PARSE as u8);
        }
    };
    let result = if cfg.explain { run::explain(&cfg) } else { run::run(&cfg) };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            if let Some(path) = &cfg.json_out {
                let body = serde_json::to_string_pretty(&out.json).unwrap();
                if let Err(e) = std::fs::write(path, body + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(run::EXIT_PRECONDITION as u8);
                }
            }
            ExitCode::from(out.code as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code() as u8)
        }
    }
}
