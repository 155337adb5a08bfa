use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nilweier_cli::{commands, threads_from_env, Outcome, RunConfig};

#[derive(Parser)]
#[command(name = "nilweier", version, about = "Timelike minimal surfaces in Nil3 from loop-group potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write per-theta meshes, a CSV point table and a manifest.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate every structure-equation check and write a JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Recover the potential from the frames along the axes.
    Roundtrip {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the built-in potentials.
    ListBuiltins,
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Generate { config, out } => {
            let p = RunConfig::load(&config)?.prepare()?;
            let m = commands::generate(&p, &out)?;
            log::info!("wrote {} files to {}", m.files.len() + 1, out.display());
            Ok(Outcome::Pass)
        }
        Command::Verify { config, report } => {
            let p = RunConfig::load(&config)?.prepare()?;
            let r = commands::verify(&p)?;
            std::fs::write(&report, r.to_json()).with_context(|| format!("writing {}", report.display()))?;
            for c in r.checks.iter().filter(|c| !c.pass) {
                log::warn!("{} failed: value {:e}, threshold {:e}", c.check, c.value, c.threshold);
            }
            Ok(r.outcome())
        }
        Command::Roundtrip { config } => {
            let p = RunConfig::load(&config)?.prepare()?;
            let r = commands::roundtrip(&p)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            Ok(if r.pass { Outcome::Pass } else { Outcome::Fail })
        }
        Command::ListBuiltins => {
            print!("{}", commands::list_builtins());
            Ok(Outcome::Pass)
        }
    }
}

/// The error chain, skipping causes already spelled out by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = e.to_string();
    for cause in e.chain().skip(1) {
        let text = cause.to_string();
        if !out.contains(&text) {
            out = format!("{out}: {text}");
        }
    }
    out
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let pool = threads_from_env().and_then(|n| {
        if let Some(n) = n {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
        Ok(())
    });
    if let Err(e) = pool {
        eprintln!("error: {}", describe(&e));
        return ExitCode::from(1);
    }
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(1)
        }
    }
}
