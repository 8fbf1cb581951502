use std::io;
use std::process::exit;

use clap::Parser;

use godp::cli::{run, Cli, CliConfig, EXIT_IO};

fn main() {
    let cli = Cli::parse();
    let env_depth = std::env::var("GODP_DEPTH").ok();
    let cfg = match CliConfig::from_args(cli, env_depth.as_deref()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("godp: {msg}");
            exit(EXIT_IO);
        }
    };
    let code = run(&cfg, &mut io::stdout().lock(), &mut io::stderr().lock());
    exit(code);
}
