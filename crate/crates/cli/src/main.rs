use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use dyngibbs_cli::config::{parse_schedule, DeltaSource, RunConfig};
use dyngibbs_cli::error::{exit_code, fail, ExitKind};
use dyngibbs_cli::verify::{run_suite, Status, VerifyOptions};
use dyngibbs_cli::{cmd_bench, cmd_run};

#[derive(Parser)]
#[command(name = "dyngibbs", version, about = "Dynamic Gibbs sampling over a stream of model updates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maintain samples and estimates across an update stream.
    Run(RunArgs),
    /// Time each update against regenerating every chain.
    Bench(RunArgs),
    /// Run the acceptance suite on built-in instances.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Instance document (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// Update stream (JSONL, one batch per line).
    #[arg(long)]
    updates: Option<PathBuf>,
    /// Sample count and error level as functions of n.
    #[arg(long, default_value = "N=100,eps=0.05")]
    schedule: String,
    /// given:X, check, or model:ising|hardcore|coloring.
    #[arg(long, default_value = "check")]
    delta: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Queries (JSON array). Defaults to the marginal of the first vertex.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Smaller sample sizes for a fast smoke run.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for a JSON report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<RunConfig> {
        Ok(RunConfig {
            instance: self.instance.clone(),
            updates: self.updates.clone(),
            schedule: parse_schedule(&self.schedule)?,
            delta: self.delta.parse::<DeltaSource>()?,
            seed: self.seed,
            queries: self.queries.clone(),
            out: self.out.clone(),
            threads: self.threads,
        })
    }
}

fn verify(args: &VerifyArgs) -> anyhow::Result<()> {
    let mut opts = VerifyOptions {
        quick: args.quick,
        ..VerifyOptions::default()
    };
    if let Some(s) = args.seed {
        opts.seed = s;
    }
    let results = dyngibbs_cli::commands::with_threads(args.threads, || {
        run_suite(&opts, |r| {
            println!("{}", r.line());
            let _ = std::io::stdout().flush();
        })
    })?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let text = serde_json::to_string_pretty(&results)?;
        std::fs::write(dir.join("verify.json"), text + "\n")?;
    }
    let failed: Vec<usize> = results.iter().filter(|r| r.status == Status::Fail).map(|r| r.id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(fail(ExitKind::Verification, format!("criteria failed: {failed:?}")))
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run(a) => {
            let s = cmd_run(&a.config()?)?;
            eprintln!("run: {} updates, {} chains, outputs in {}", s.steps, s.chains, a.out.display());
        }
        Command::Bench(a) => {
            let r = cmd_bench(&a.config()?)?;
            eprintln!(
                "bench: {} updates, dynamic {:.1} ms, regeneration {:.1} ms, ratio {:.4}",
                r.steps.len(),
                r.dynamic_total_ms,
                r.baseline_total_ms,
                r.ratio
            );
        }
        Command::Verify(a) => verify(&a)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitKind::Usage.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
