use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hydrolimit::harness::{cmd_check, cmd_report, cmd_run, cmd_sweep, RunConfig, CONFIG_KEYS, OUTPUT_ENV, SUITES};

#[derive(Parser)]
#[command(
    name = "hydrolimit",
    version,
    about = "Anisotropic vs hydrostatic polluted-atmosphere experiments"
)]
struct Cli {
    /// Flat `key = value` config file; defaults apply to missing keys.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of the initial data.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// One solver run.
    Run,
    /// Anisotropic runs over eps against the hydrostatic limit.
    Sweep {
        /// Comma-separated, strictly descending; defaults to `eps_list`.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// A named property suite.
    Check { suite: String },
    /// Renders the results in a directory to `report.md`.
    Report { dir: Option<PathBuf> },
    /// Lists the config keys.
    Keys,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> hydrolimit::Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    match cli.cmd {
        Cmd::Run => {
            let r = cmd_run(&cfg)?;
            for v in &r.verdicts {
                println!(
                    "{:<16} {:>12.4e}  limit {:>8.1e}  {}",
                    v.name,
                    v.value,
                    v.limit,
                    pass(v.pass)
                );
            }
            println!("status: {:?}, output in {}", r.status, cfg.output_path().display());
            Ok(r.passed())
        }
        Cmd::Sweep { eps } => {
            let list = eps.unwrap_or_else(|| cfg.eps_list.clone());
            let r = cmd_sweep(&cfg, &list)?;
            for (k, f) in &r.fits {
                println!("{k:<14} slope {:>7.3}  r2 {:.4}", f.slope, f.r_squared);
            }
            println!("output in {}", cfg.output_path().display());
            Ok(r.complete)
        }
        Cmd::Check { suite } => {
            let r = cmd_check(&suite, &cfg)?;
            for v in &r.items {
                println!(
                    "{:<24} {:>12.4e}  limit {:>8.1e}  {}",
                    v.name,
                    v.value,
                    v.limit,
                    pass(v.pass)
                );
            }
            println!("{suite}: {}", pass(r.pass));
            Ok(r.pass)
        }
        Cmd::Report { dir } => {
            let dir = dir.unwrap_or_else(|| cfg.output_path());
            print!("{}", cmd_report(&dir)?);
            Ok(true)
        }
        Cmd::Keys => {
            for (k, doc) in CONFIG_KEYS {
                println!("{k:<20} {doc}");
            }
            println!("\nsuites: {}", SUITES.join(", "));
            println!("output root: ${OUTPUT_ENV} (default ./hydrolimit-out)");
            Ok(true)
        }
    }
}

fn pass(p: bool) -> &'static str {
    if p {
        "pass"
    } else {
        "FAIL"
    }
}
