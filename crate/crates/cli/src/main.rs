use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use paracomm_cli::{manifest::write_manifest, run, Command, RunConfig};

/// Numerical experiments for the parabolic Calderón commutator.
#[derive(Debug, Parser)]
#[command(name = "paracomm", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Command,
    /// TOML config; omitted sections take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Reduced grids and sample counts for smoke runs.
    #[arg(long)]
    quick: bool,
    /// Also write an SVG plot where the experiment has a log-log series.
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.quick {
        cfg = cfg.quick();
    }
    cfg.plot |= cli.plot;
    let outcome = run(cli.command, &cfg, &cli.out)?;
    write_manifest(&cli.out, &cfg, &outcome)?;
    println!("{}", outcome.line());
    Ok(outcome.pass)
}
