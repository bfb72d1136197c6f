use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use semirandom_ham::budgets::{Budgets, Schedule, DEFAULT_SEED_DENSITY};
use semirandom_ham::cycle::CycleBudget;
use semirandom_ham::harness::{run_trials_with, Executor, OutputFormat, TrialConfig};
use semirandom_ham::replay::{write_replays, ReplayFile, Verified};
use semirandom_ham::{strong_core, Graph, SamplingMode, Variant};

#[derive(Parser)]
#[command(
    name = "semiham",
    version,
    about = "Online Hamiltonian-graph and matching builders for the K-choice random graph process"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and print an aggregate report.
    Run(RunArgs),
    /// Re-verify a replay file offline and check that it reruns identically.
    Replay {
        file: PathBuf,
        /// Only check the certificate; skip the rerun.
        #[arg(long)]
        no_rerun: bool,
    },
    /// Strong k-core partition of an edge-list file.
    Core {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Print the phase budget table.
    Budgets {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        multiplier: f64,
        #[arg(long, default_value_t = Variant::Hamilton)]
        variant: Variant,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = SamplingMode::Missing)]
    mode: SamplingMode,
    #[arg(long, default_value_t = Variant::Hamilton)]
    variant: Variant,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 1.0)]
    multiplier: f64,
    /// Wall-clock limit for each cycle search.
    #[arg(long, default_value_t = 30_000)]
    time_budget_ms: u64,
    /// Step limit for each cycle search.
    #[arg(long, default_value_t = CycleBudget::default().max_steps)]
    max_steps: u64,
    /// Phase-1 edges per seed vertex.
    #[arg(long, default_value_t = DEFAULT_SEED_DENSITY)]
    seed_density: usize,
    /// Seed-graph size as a fraction of n (default n / ln ln n).
    #[arg(long)]
    seed_fraction: Option<f64>,
    /// Phase-3 End threshold (default n / ln^5 n).
    #[arg(long)]
    end_cap: Option<f64>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write one replay file per trial into this directory.
    #[arg(long)]
    replay_dir: Option<PathBuf>,
}

fn executor(jobs: Option<usize>) -> Result<Executor> {
    match jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(1) => Ok(Executor::Sequential),
        #[cfg(feature = "parallel")]
        j => Ok(Executor::Parallel { jobs: j }),
        #[cfg(not(feature = "parallel"))]
        _ => Ok(Executor::Sequential),
    }
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = TrialConfig {
        n: args.n,
        k: args.k,
        mode: args.mode,
        variant: args.variant,
        seed: args.seed,
        trials: args.trials,
        multiplier: args.multiplier,
        seed_density: args.seed_density,
        seed_fraction: args.seed_fraction,
        end_cap: args.end_cap,
        cycle_budget: CycleBudget {
            max_steps: args.max_steps,
            max_time: Some(Duration::from_millis(args.time_budget_ms)),
        },
        format: args.format,
    };
    let set = run_trials_with(&cfg, executor(args.jobs)?)?;
    let text = set.render()?;
    match &args.out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    if let Some(dir) = &args.replay_dir {
        write_replays(&set, dir)?;
    }
    let agg = set.aggregate();
    eprintln!(
        "{} trials: {} succeeded, {} phase failures, {} cycle searches exhausted",
        agg.trials, agg.successes, agg.phase_failures, agg.cycle_not_found
    );
    Ok(())
}

fn replay(file: PathBuf, no_rerun: bool) -> Result<()> {
    let r = ReplayFile::load(&file).with_context(|| format!("loading {}", file.display()))?;
    match r.verify()? {
        Verified::Certificate => println!(
            "certificate verified against {} logged selections",
            r.selected_log.len()
        ),
        Verified::LogOnly => {
            println!("no certificate (trial did not succeed); selection log is consistent")
        }
    }
    if !no_rerun {
        if r.rerun_matches()? {
            println!("rerun reproduces the stored report");
        } else {
            bail!("rerun differs from the stored report");
        }
    }
    Ok(())
}

fn core(file: PathBuf, k: usize) -> Result<()> {
    let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    let g = Graph::parse_edge_list(&text, None)?;
    let p = strong_core(&g, k);
    let out = serde_json::json!({
        "n": g.n(),
        "edges": g.edge_count(),
        "k": k,
        "black": p.black,
        "blue": p.blue,
        "red": p.red,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn budgets(n: usize, k: usize, multiplier: f64, variant: Variant) -> Result<()> {
    let schedule = match variant {
        Variant::Hamilton => Schedule::Hamilton,
        Variant::Matching => Schedule::Matching,
    };
    let b = Budgets::for_schedule(schedule, n, k, multiplier)?;
    let mut v = serde_json::to_value(&b)?;
    v["round_bound"] = b.round_bound().into();
    v["edge_bound"] = b.edge_bound().into();
    v["selection_bound"] = b.selection_bound().into();
    v["lower_bound_reference"] = b.lower_bound_reference().into();
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Replay { file, no_rerun } => replay(file, no_rerun),
        Command::Core { file, k } => core(file, k),
        Command::Budgets {
            n,
            k,
            multiplier,
            variant,
        } => budgets(n, k, multiplier, variant),
    }
}
