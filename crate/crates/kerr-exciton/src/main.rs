use clap::Parser;

use kerr_exciton::cli::{execute, Cli};

fn main() {
    if let Err(err) = execute(Cli::parse()) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
