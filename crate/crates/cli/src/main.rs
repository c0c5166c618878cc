use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};
use ofdm_energy::scenario::{default_paper_scenario, load_scenario, ScenarioSpec};
use ofdm_energy_cli::accept::{run_all, run_criterion, Context, Scale, CRITERIA};
use ofdm_energy_cli::solve::{run_solve, Overrides, Solver};
use ofdm_energy_cli::sweep::{
    default_alpha0_grid, metadata_toml, parse_alpha0, run_sweep, write_csv, Aggregate, Mode,
    SweepSpec,
};

#[derive(Parser)]
#[command(name = "ofdm-energy", version, about = "Energy-optimal downlink OFDM scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one channel realization and write the schedule as JSON.
    Solve {
        /// Scenario TOML; the built-in default scenario if omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum)]
        solver: Solver,
        /// Channel seed; defaults to the scenario's.
        #[arg(long)]
        seed: Option<u64>,
        /// Base-station energy weight, overriding the scenario.
        #[arg(long)]
        alpha0: Option<f64>,
        /// Upper limit on the frame length (s).
        #[arg(long)]
        tmax: Option<f64>,
        /// Relative solver tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep alpha0 and the slot count J; write one CSV row per cell.
    Tradeoff {
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Comma list `a,b,c` or log range `lo:hi:n`. Default: 0 and 25
        /// points from 1e-3 to 1e3 times P_rc/P_tc.
        #[arg(long, allow_hyphen_values = true)]
        alpha0: Option<String>,
        /// Slot counts; default every J in 1..=K.
        #[arg(long = "J", value_delimiter = ',')]
        j: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "cog")]
        mode: Vec<Mode>,
        /// Number of channel realizations.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// First channel seed; defaults to the scenario's.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "per-seed")]
        aggregate: Aggregate,
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        workers: Option<usize>,
        /// CSV path; metadata goes to `<out>.meta.toml`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance criteria and print one line per criterion.
    Accept {
        #[arg(long, value_enum, default_value = "quick")]
        scale: Scale,
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Only these criteria, e.g. `c1,c4`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write the outcomes as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn scenario(path: Option<&Path>) -> Result<ScenarioSpec> {
    match path {
        Some(p) => Ok(load_scenario(p)?),
        None => Ok(default_paper_scenario()),
    }
}

fn workers(n: Option<usize>) -> usize {
    n.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve {
            scenario: path,
            solver,
            seed,
            alpha0,
            tmax,
            tol,
            out,
        } => {
            let spec = scenario(path.as_deref())?;
            let ov = Overrides {
                seed,
                alpha0,
                t_max: tmax,
                tol,
            };
            let res = run_solve(&spec, solver, &ov)?;
            if !res.validation.feasible {
                eprintln!("warning: {}", res.validation.violations.join("; "));
            }
            let mut text = serde_json::to_string_pretty(&res)?;
            text.push('\n');
            write_out(out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Tradeoff {
            scenario: path,
            alpha0,
            j,
            mode,
            seeds,
            seed,
            aggregate,
            tmax,
            tol,
            workers: w,
            out,
        } => {
            let spec = scenario(path.as_deref())?;
            if seeds == 0 {
                bail!("--seeds must be at least 1");
            }
            let first = seed.unwrap_or(spec.seed);
            let sweep = SweepSpec {
                alpha0: match alpha0 {
                    Some(s) => parse_alpha0(&s)?,
                    None => default_alpha0_grid(&spec),
                },
                j_values: if j.is_empty() { (1..=spec.k()).collect() } else { j },
                modes: mode,
                seeds: (first..first + seeds).collect(),
                aggregate,
                t_max_s: tmax,
                tol,
            };
            sweep.validate(spec.k())?;
            let rows = run_sweep(&spec, &sweep, workers(w))?;
            let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_csv(&rows, io::BufWriter::new(file))?;
            let meta = PathBuf::from(format!("{}.meta.toml", out.display()));
            fs::write(&meta, metadata_toml(&spec, &sweep))
                .with_context(|| format!("writing {}", meta.display()))?;
            eprintln!("{} rows -> {}", rows.len(), out.display());
            Ok(true)
        }
        Command::Accept {
            scale,
            scenario: path,
            only,
            workers: w,
            out,
        } => {
            let ctx = Context {
                spec: scenario(path.as_deref())?,
                scale,
                workers: workers(w),
            };
            let print = |o: &ofdm_energy_cli::accept::Outcome| println!("{}", o.line());
            let outcomes = if only.is_empty() {
                run_all(&ctx, print)
            } else {
                let mut v = Vec::new();
                for id in &only {
                    let Some(o) = run_criterion(&ctx, id) else {
                        let known: Vec<&str> = CRITERIA.iter().map(|c| c.0).collect();
                        bail!("unknown criterion '{id}' (known: {})", known.join(", "));
                    };
                    print(&o);
                    v.push(o);
                }
                v
            };
            if let Some(p) = out {
                fs::write(&p, serde_json::to_string_pretty(&outcomes)? + "\n")
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(!outcomes.iter().any(|o| o.is_failure()))
        }
    }
}

/// Usage line of the named subcommand, or of the whole program.
fn usage_for(sub: Option<&str>) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    match sub.and_then(|s| cmd.find_subcommand_mut(s)) {
        Some(sc) => sc.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if !e.render().to_string().contains("Usage:") {
                eprintln!("\n{}", usage_for(std::env::args().nth(1).as_deref()));
            }
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = e
                .downcast_ref::<ofdm_energy::Error>()
                .is_some_and(|x| x.is_infeasible());
            ExitCode::from(if infeasible { 2 } else { 1 })
        }
    }
}
