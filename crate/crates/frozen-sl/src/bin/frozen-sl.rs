use clap::Parser;
use frozen_sl::cli;

fn main() {
    let parsed = cli::Cli::parse();
    std::process::exit(cli::run(parsed));
}
