use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rvd_planner::cli_io::commands::dump_lp;
use rvd_planner::cli_io::{self, GammaGrid, RunOptions};
use rvd_planner::search::PlanStatus;

/// Variable-horizon rendezvous and docking planner.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a maneuver with the local horizon search; writes plan.csv and summary.txt.
    Plan(CommonArgs),
    /// Solve every horizon up to n_ub; writes profile.csv.
    Sweep(CommonArgs),
    /// Compare full enumeration, local search and ternary search; writes compare.csv.
    Compare(CommonArgs),
    /// Sample the docking-point reference; writes reference.csv.
    Propagate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario's fuel weight.
    #[arg(long)]
    gamma: Option<f64>,
    /// Weight grid `start:end:step` for compare.
    #[arg(long)]
    gamma_grid: Option<GammaGrid>,
    /// Override the largest candidate horizon.
    #[arg(long)]
    n_ub: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for parallel solves (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Also write the fixed-horizon LP at this horizon to lp_N<horizon>.txt.
    #[arg(long)]
    dump_lp: Option<usize>,
}

fn run(command: Command) -> rvd_planner::Result<ExitCode> {
    let (Command::Plan(args)
    | Command::Sweep(args)
    | Command::Compare(args)
    | Command::Propagate(args)) = &command;
    let config = cli_io::load_scenario(&args.config)?;
    let opts = RunOptions {
        gamma: args.gamma,
        gamma_grid: args.gamma_grid,
        n_ub: args.n_ub,
        out_dir: args.out.clone(),
    };
    if let Some(horizon) = args.dump_lp {
        let maneuver = config.maneuver(opts.n_ub)?;
        std::fs::create_dir_all(&opts.out_dir)?;
        let path = opts.out_dir.join(format!("lp_N{horizon}.txt"));
        dump_lp(
            &maneuver,
            horizon,
            opts.gamma.unwrap_or(config.gamma),
            &path,
        )?;
    }

    match command {
        Command::Plan(_) => {
            let report = cli_io::cmd_plan(&config, &opts)?;
            println!("{}", report.summary_line());
            Ok(match report.result.status {
                PlanStatus::Planned => ExitCode::SUCCESS,
                PlanStatus::Infeasible => ExitCode::from(2),
            })
        }
        Command::Sweep(_) => {
            let profile = cli_io::cmd_sweep(&config, &opts)?;
            let feasible = profile.solutions.iter().filter(|s| s.is_optimal()).count();
            match profile.best_solution() {
                Some(s) => println!("N_star={} J_star={} feasible={feasible}", s.horizon, s.cost),
                None => println!("no feasible horizon"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(_) => {
            let rows = cli_io::cmd_compare(&config, &opts)?;
            println!("compared {} weights", rows.len());
            Ok(ExitCode::SUCCESS)
        }
        Command::Propagate(_) => {
            let path = cli_io::cmd_propagate(&config, &opts)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    // usage errors share exit code 1 with other failures; 2 means infeasible
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (Command::Plan(args)
    | Command::Sweep(args)
    | Command::Compare(args)
    | Command::Propagate(args)) = &cli.command;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.workers {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
