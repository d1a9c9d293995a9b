use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ringlab_cli::config::RunConfig;
use ringlab_cli::experiments::{execute, Artifacts};
use ringlab_cli::CliError;

#[derive(Debug, Parser)]
#[command(name = "ringlab", version, about = "Random normal matrix ring experiments")]
enum Cli {
    /// Run the experiment described by a TOML configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override one entry, e.g. `sampler.n=200`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory; defaults to `out` in the configuration, then `./ringlab-out`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write SVG plots.
        #[arg(long)]
        plots: bool,
    },
}

/// Errors carry the experiment name once the configuration has been read.
fn run(cli: Cli) -> Result<bool, (Option<&'static str>, CliError)> {
    let Cli::Run { config, set, out, seed, plots } = cli;
    let text = std::fs::read_to_string(&config).map_err(|e| (None, CliError::io(&config, e)))?;
    let cfg = RunConfig::load(&text, &set, seed).map_err(|e| (None, e))?;
    let kind = Some(cfg.kind.name());
    let dir = out
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("ringlab-out"));
    let mut art = Artifacts::new(&dir, plots).map_err(|e| (kind, e))?;
    let report = execute(&cfg, &mut art).map_err(|e| (kind, e))?;
    eprint!("{}", report.summary());
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err((kind, e)) => {
            match kind {
                Some(kind) => eprintln!("error in {kind} experiment: {e}"),
                None => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
