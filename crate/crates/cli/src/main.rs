//! `hatlab`: exact and simulated analysis of the two-player hat game.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hatlab_core::bounds;
use hatlab_core::exact::{parse_rational, BigRational};
use hatlab_core::game::{self, dual_finite, FinitePair, PairFile};
use hatlab_core::machine::{self, Builtin, MachineFile, MachinePair};
use hatlab_core::monte_carlo::{self, DEFAULT_MAX_BLOCKS};
use hatlab_core::search::{self, CheckpointOptions, SearchConfig, SearchMode};
use hatlab_core::{HatError, Result};
use serde_json::Value;

const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hatlab",
    version,
    about = "Strategies, closed forms and bounds for the two-player hat game"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact win probability and win polynomial of a finite pair file.
    Eval {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long, value_parser = exact_p)]
        p: BigRational,
    },
    /// Closed-form win rate of a block strategy.
    ClosedForm {
        #[arg(long)]
        strategy: String,
        #[arg(long, value_enum, default_value = "pretty")]
        format: Format,
        #[arg(long, value_parser = exact_p)]
        p: Option<BigRational>,
    },
    /// Colour-swapped strategy (block machine or finite pair).
    Dual {
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite pair that runs a block strategy on the first N hats.
    Truncate {
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        hats: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive or hill-climbing search over finite tables.
    Search(SearchArgs),
    /// Lower and upper bounds on the optimal win rate at p.
    Bounds {
        #[arg(long, value_parser = exact_p)]
        p: BigRational,
    },
    /// CSV of the bounds over a grid of p values.
    Curve {
        /// "start:stop:count" or a comma-separated list of rationals.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
        /// Leave the upper bound blank where it cannot be evaluated exactly.
        #[arg(long)]
        exact_only: bool,
    },
    /// Monte Carlo estimate of a strategy's win rate.
    Simulate {
        #[arg(long)]
        strategy: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_BLOCKS)]
        max_blocks: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pretty,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchKind {
    Exhaustive,
    Symmetric,
    Hillclimb,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(value_enum)]
    kind: SearchKind,
    #[arg(long)]
    hats: usize,
    #[arg(long, value_parser = exact_p)]
    p: BigRational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    restarts: u32,
    #[arg(long, default_value_t = search::DEFAULT_MAX_ITERATIONS)]
    max_iterations: u64,
    /// Accept moves that keep the score unchanged.
    #[arg(long)]
    sideways: bool,
    /// Climb on symmetric pairs (one table used by both players).
    #[arg(long)]
    symmetric: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
}

fn exact_p(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { EXIT_IO } else { EXIT_DOMAIN })
        }
    }
}

enum Strategy {
    Machine(MachinePair),
    Finite(FinitePair),
}

/// A built-in name, a block-machine file, or a finite pair file.
fn load_strategy(spec: &str) -> Result<Strategy> {
    if let Ok(b) = spec.parse::<Builtin>() {
        return Ok(Strategy::Machine(machine::builtin_machine(b)));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(HatError::UnknownStrategy(format!(
            "{spec} (not a built-in name and no such file)"
        )));
    }
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    if value.get("hats").is_some() {
        Ok(Strategy::Finite(PairFile::parse(&text)?))
    } else {
        Ok(Strategy::Machine(MachineFile::parse(&text)?))
    }
}

fn load_machine(spec: &str) -> Result<MachinePair> {
    match load_strategy(spec)? {
        Strategy::Machine(m) => Ok(m),
        Strategy::Finite(_) => Err(HatError::InvalidInput(format!(
            "{spec} is a finite pair, not a block strategy"
        ))),
    }
}

fn write_or_return(out: Option<&Path>, text: String) -> Result<String> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn run(cli: &Cli) -> Result<String> {
    let json = cli.json;
    match &cli.command {
        Command::Eval { pair, p } => {
            let pair = PairFile::read(pair)?;
            let value = game::win_probability(&pair, p)?;
            Ok(report::eval(&pair, p, &value, json))
        }
        Command::ClosedForm {
            strategy,
            format,
            p,
        } => {
            let mp = load_machine(strategy)?;
            let cf = machine::derive_closed_form(&mp)?;
            let at = match p {
                Some(p) => Some((p.clone(), cf.value.eval(p)?)),
                None => None,
            };
            Ok(report::closed_form(
                strategy,
                &cf,
                matches!(format, Format::Exact),
                at,
                json,
            ))
        }
        Command::Dual { strategy, out } => {
            let text = match load_strategy(strategy)? {
                Strategy::Machine(mp) => MachineFile::render(&machine::dual_machine(&mp)),
                Strategy::Finite(pair) => PairFile::render(&FinitePair::new(
                    dual_finite(pair.player1()),
                    dual_finite(pair.player2()),
                )?),
            };
            write_or_return(out.as_deref(), text)
        }
        Command::Truncate {
            strategy,
            hats,
            out,
        } => {
            let pair = machine::truncate_to_finite(&load_machine(strategy)?, *hats)?;
            write_or_return(out.as_deref(), PairFile::render(&pair))
        }
        Command::Search(args) => {
            let mut cfg = SearchConfig::new(args.hats, args.p.clone());
            cfg.seed = args.seed;
            cfg.restarts = args.restarts;
            cfg.max_iterations = args.max_iterations;
            cfg.sideways_moves = args.sideways;
            cfg.workers = args.workers;
            cfg.checkpoint = args.checkpoint.as_ref().map(CheckpointOptions::new);
            let (mode, symmetric) = match args.kind {
                SearchKind::Exhaustive => (SearchMode::Exhaustive, false),
                SearchKind::Symmetric => (SearchMode::Exhaustive, true),
                SearchKind::Hillclimb => (SearchMode::HillClimb, args.symmetric),
            };
            cfg.mode = mode;
            cfg.symmetric = symmetric;
            let r = search::run_search(&cfg)?;
            eprintln!("wall time: {:.3} s", r.wall_time);
            Ok(report::search(&cfg, &r, json))
        }
        Command::Bounds { p } => {
            let r = bounds::upper_bound(p)?;
            Ok(report::bounds(&r, json))
        }
        Command::Curve {
            grid,
            out,
            exact_only,
        } => {
            let grid = bounds::parse_grid(grid)?;
            let rows = bounds::emit_curve(&grid, out, *exact_only)?;
            Ok(report::curve(out, rows.len(), json))
        }
        Command::Simulate {
            strategy,
            p,
            trials,
            seed,
            max_blocks,
            workers,
        } => {
            let strategy = load_strategy(strategy)?;
            let sim = || match &strategy {
                Strategy::Machine(mp) => {
                    monte_carlo::simulate_machine_pair(mp, *p, *trials, *seed, *max_blocks)
                }
                Strategy::Finite(pair) => {
                    monte_carlo::simulate_finite_pair(pair, *p, *trials, *seed)
                }
            };
            let r = match workers {
                Some(w) => rayon::ThreadPoolBuilder::new()
                    .num_threads((*w).max(1))
                    .build()
                    .map_err(|e| HatError::InvalidInput(e.to_string()))?
                    .install(sim)?,
                None => sim()?,
            };
            Ok(report::simulation(&r, json))
        }
    }
}
