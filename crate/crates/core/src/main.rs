use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lowfreq_levy::harness::experiment::{rate_table, run_oracle_check};
use lowfreq_levy::harness::report::{write_oracle_check, write_rates, write_run};
use lowfreq_levy::harness::{run_experiment, ExperimentConfig};
use lowfreq_levy::{par, Result};

#[derive(Parser)]
#[command(version, about = "Monte Carlo experiments for jump-measure functional estimation")]
struct Cli {
    /// Overrides the seed in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output directory (default: `out_dir` from the config, else ./out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo risk surface, adaptive selection and rate fits.
    Run { config: PathBuf },
    /// Theoretical rate for each configured sample size.
    Rates { config: PathBuf },
    /// Deterministic oracle cutoff, penalties and risk bounds.
    OracleCheck { config: PathBuf },
}

fn load(cli: &Cli, path: &Path) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::from_file(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let dir = cli.out_dir.clone().or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    cfg.out_dir = Some(dir.clone());
    Ok((cfg, dir))
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    match &cli.command {
        Command::Run { config } => {
            let (cfg, dir) = load(cli, config)?;
            let report = run_experiment(&cfg)?;
            for s in &report.sizes {
                let ad = s.adaptive.as_ref().map(|a| format!(" adaptive_mse={:.4e} ratio={:.3}", a.mse, a.oracle_ratio));
                println!(
                    "n={} failures={} oracle_m={} oracle_mse={:.4e} m*={}{}",
                    s.n,
                    s.failures,
                    s.oracle_bandwidth_m,
                    s.oracle_bandwidth_mse,
                    s.m_star,
                    ad.unwrap_or_default()
                );
            }
            for f in &report.slopes {
                let theo = f.theoretical.map(|t| format!(" theoretical={t:.3}")).unwrap_or_default();
                println!("slope {}: {:.3} ± {:.3}{}", f.quantity, f.slope, f.stderr, theo);
            }
            write_run(&report, &dir)
        }
        Command::Rates { config } => {
            let (cfg, dir) = load(cli, config)?;
            let rows = rate_table(&cfg)?;
            for r in &rows {
                println!("n={} T={} {:?} exponent={:.4} value={:.4e}", r.n, r.t, r.form, r.exponent, r.value);
            }
            write_rates(&rows, &dir)
        }
        Command::OracleCheck { config } => {
            let (cfg, dir) = load(cli, config)?;
            let check = run_oracle_check(&cfg)?;
            println!("theta={}", check.theta);
            for s in &check.sizes {
                println!("n={} m*={}", s.n, s.m_star);
            }
            write_oracle_check(&check, &dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match par::with_threads(cli.threads, || execute(&cli)) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
