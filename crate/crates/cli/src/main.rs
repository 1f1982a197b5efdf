use std::process::ExitCode;

use admlab::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(lines) => {
            for l in lines {
                if cli.dump_config {
                    print!("{l}");
                } else {
                    println!("{l}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
