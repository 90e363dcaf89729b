use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fcdn::capacity::{expected_group_count, expected_group_size};
use fcdn::catalogue::{load_population_table, Populations};
use fcdn::catchment::{simulate_catchment, trace_table, validate_analytic};
use fcdn::harness::{emit_results, run_experiment_with, ExperimentConfig, Format};
use fcdn::placement::Selector;
use fcdn::topology::{all_pairs_hop_distance, load_topology};
use fcdn::{Algorithm, Result};

#[derive(Parser)]
#[command(name = "fcdn-sim", version, about = "Anycast CDN placement and capacity simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write result tables.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Compare simulated catchment windows with the renewal prediction.
    ValidateCatchment {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long = "T")]
        duration: f64,
        #[arg(long)]
        reps: usize,
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write per-replication summaries here.
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Print the vertices one placement algorithm selects.
    Place {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        k: usize,
        /// `node,population` table; equal populations when omitted.
        #[arg(long)]
        population: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            out,
            workers,
            seed,
            format,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let dataset = run_experiment_with(&cfg, workers)?;
            emit_results(&dataset, &cfg, &out, format)?;
            for d in &dataset.diagnostics {
                eprintln!("warning: {d}");
            }
            println!("{} rows written to {}", dataset.rows.len(), out.display());
            Ok(true)
        }
        Command::ValidateCatchment {
            mu,
            tau,
            duration,
            reps,
            tol,
            seed,
            traces,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sims = (0..reps)
                .map(|_| simulate_catchment(mu, tau, duration, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            if let Some(path) = traces {
                std::fs::write(&path, trace_table(&sims))
                    .map_err(|e| fcdn::Error::Io { path, source: e })?;
            }
            let v = validate_analytic(
                &sims,
                expected_group_count(duration, tau, mu)?,
                expected_group_size(mu, tau)?,
                tol,
            )?;
            let mark = |ok| if ok { "ok" } else { "FAIL" };
            println!(
                "groups    expected {:.3}  simulated {:.3}  error {:.4}  {}",
                v.expected_count,
                v.simulated_count,
                v.count_error,
                mark(v.count_ok())
            );
            println!(
                "size      expected {:.3}  simulated {:.3}  error {:.4}  {}",
                v.expected_size,
                v.simulated_size,
                v.size_error,
                mark(v.size_ok())
            );
            if !v.passed() {
                eprintln!("error: simulation differs from prediction by more than {tol}");
            }
            Ok(v.passed())
        }
        Command::Place {
            topology,
            algo,
            k,
            population,
            seed,
        } => {
            let g = load_topology(&topology)?;
            let dist = all_pairs_hop_distance(&g);
            let pops = match population {
                Some(p) => load_population_table(&g, p)?,
                None => Populations(vec![1; g.node_count()]),
            };
            let selector = Selector::new(&g, &dist, &pops)?;
            let picks = selector.select(algo, k, &mut ChaCha8Rng::seed_from_u64(seed))?;
            for v in picks {
                println!("{}\t{}", g.id(v), g.display_name(v));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
