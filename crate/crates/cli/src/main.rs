use std::path::PathBuf;

use clap::Parser;
use phononet_cli::{execute, CliError, Experiment, Format, Overrides};

/// Phonon-network simulations driven by a TOML configuration.
#[derive(Parser)]
#[command(name = "phononet", version)]
struct Args {
    #[arg(value_enum)]
    experiment: Experiment,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides PHONONET_OUT_DIR and output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for parameter sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let overrides = Overrides { out: args.out, format: args.format, threads: args.threads };
    match execute(args.experiment, &args.config, &overrides) {
        Ok(path) => println!("{}", path.display()),
        Err(e) => {
            eprintln!("phononet: {e}");
            std::process::exit(CliError::exit_code(&e));
        }
    }
}
