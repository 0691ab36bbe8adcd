use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use aamr_bench::config::{BetaGrid, BetaRange, ExperimentConfig};
use aamr_bench::demo::{run_demo, DemoOptions};
use aamr_bench::report::{best_beta, ratio_crosses};
use aamr_bench::verify::verify_dir;
use aamr_bench::{run_to_dir, VariantName};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bench",
    version,
    about = "β-sweeps of the parallel AAMR schemes on random ball intersections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write results.csv, summary.csv and plots/ to --out.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
        #[arg(long)]
        beta_min: Option<f64>,
        #[arg(long)]
        beta_max: Option<f64>,
        #[arg(long)]
        beta_step: Option<f64>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Iterates of both schemes on a few random balls, as CSV.
    Demo {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 40)]
        iters: usize,
        /// Write balls.csv and iterates.csv here instead of printing the iterates.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-validate a results directory.
    Verify {
        #[arg(long)]
        out: PathBuf,
        /// Also rerun the sweep and compare results.csv byte for byte.
        #[arg(long)]
        rerun: bool,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            counts,
            beta_min,
            beta_max,
            beta_step,
            jobs,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(c) = counts {
                cfg.constraint_counts = c;
            }
            if beta_min.is_some() || beta_max.is_some() || beta_step.is_some() {
                let base = match cfg.beta_grid {
                    BetaGrid::Range(r) => r,
                    BetaGrid::List(_) => match BetaGrid::default() {
                        BetaGrid::Range(r) => r,
                        BetaGrid::List(_) => unreachable!("default grid is a range"),
                    },
                };
                cfg.beta_grid = BetaGrid::Range(BetaRange {
                    min: beta_min.unwrap_or(base.min),
                    max: beta_max.unwrap_or(base.max),
                    step: beta_step.unwrap_or(base.step),
                });
            }
            cfg.validate()?;
            let summary = run_to_dir(&cfg, &out, jobs)?;
            println!("wrote {} summary rows to {}", summary.len(), out.display());
            for &n in &cfg.constraint_counts {
                for variant in [VariantName::Original, VariantName::Alternative] {
                    if let Some((beta, interior)) = best_beta(&summary, n, variant) {
                        let at = if interior { "interior" } else { "grid edge" };
                        println!("N={n} {variant:?}: fewest iterations at beta={beta} ({at})");
                    }
                }
                let (above, below) = ratio_crosses(&summary, n, 0.7, 0.95);
                println!("N={n} ratio: >1 below beta 0.7: {above}; <1 above beta 0.95: {below}");
            }
            Ok(true)
        }
        Command::Demo {
            n,
            dim,
            seed,
            iters,
            out,
        } => {
            let opts = DemoOptions {
                n,
                dim,
                seed: seed.unwrap_or(DemoOptions::default().seed),
                iterations: iters,
            };
            let demo = run_demo(&opts)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                    for (name, text) in [
                        ("balls.csv", &demo.balls_csv),
                        ("iterates.csv", &demo.iterates_csv),
                    ] {
                        let path = dir.join(name);
                        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                    }
                }
                None => print!("{}", demo.iterates_csv),
            }
            Ok(true)
        }
        Command::Verify { out, rerun, jobs } => {
            let report = verify_dir(&out, rerun, jobs)?;
            println!("{} records, {} converged", report.records, report.converged);
            for p in &report.problems {
                println!("problem: {p}");
            }
            match report.rerun_identical {
                Some(true) => println!("rerun: results.csv identical"),
                Some(false) => println!("rerun: results.csv differs"),
                None => {}
            }
            println!("{}", if report.ok() { "ok" } else { "FAILED" });
            Ok(report.ok())
        }
    }
}
