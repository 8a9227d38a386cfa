use clap::Parser;
use hdisc::{run, Cli, RunConfig};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cfg = RunConfig::from(Cli::parse());
    match run(&cfg) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hdisc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
