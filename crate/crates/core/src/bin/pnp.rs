use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pnp::harness::{builtin_cases, find_case, synthetic_cases};
use pnp::{converge, parse_config, run, PnpError, StudyTarget, Termination};

#[derive(Parser)]
#[command(name = "pnp", about = "Poisson-Nernst-Planck finite difference solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON-configured simulation.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid-refinement study for a builtin case or a config.
    Converge {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        case: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated cell widths.
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<f64>>,
        #[arg(long)]
        h_ref: Option<f64>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// List builtin cases.
    Cases,
}

fn fail(e: PnpError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn load(path: &PathBuf) -> Result<pnp::SimConfig, PnpError> {
    parse_config(&std::fs::read_to_string(path).map_err(|e| PnpError::Config(format!("{}: {e}", path.display())))?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run { config, out } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match run(&cfg, Some(&out)) {
                Ok(rec) if rec.termination == Termination::Error => {
                    fail(rec.error.unwrap_or_else(|| PnpError::Config("run failed".into())))
                }
                Ok(rec) => {
                    println!(
                        "{:?} after {} steps, t = {}, F = {}",
                        rec.termination,
                        rec.rows.len() - 1,
                        rec.rows.last().map_or(0.0, |r| r.t),
                        rec.final_energy().unwrap_or(f64::NAN)
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Converge { case, config, h, h_ref, t_final, out } => {
            let target = match (case, config) {
                (Some(name), _) => match find_case(&name) {
                    Some(c) => StudyTarget::Case(c),
                    None => return fail(PnpError::Config(format!("unknown case '{name}' (see `pnp cases`)"))),
                },
                (None, Some(path)) => match load(&path) {
                    Ok(c) => StudyTarget::Config(Box::new(c)),
                    Err(e) => return fail(e),
                },
                (None, None) => unreachable!("clap enforces --case or --config"),
            };
            match converge(&target, h.as_deref(), h_ref, t_final, &out) {
                Ok(rows) => {
                    println!("{:>10} {:>12} {:>8} {:>12} {:>8}", "h", "error_c", "order", "error_psi", "order");
                    let fmt = |o: Option<f64>| o.map_or("-".to_string(), |v| format!("{v:.4}"));
                    for r in rows {
                        println!(
                            "{:>10} {:>12.5e} {:>8} {:>12.5e} {:>8}",
                            r.h,
                            r.error_c,
                            fmt(r.order_c),
                            r.error_psi,
                            fmt(r.order_psi)
                        );
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Cases => {
            for c in builtin_cases().iter().chain(synthetic_cases().iter()) {
                println!("{:<24} {}", c.name, c.description);
            }
            ExitCode::SUCCESS
        }
    }
}
