use clap::Parser;

use selberg3d::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
