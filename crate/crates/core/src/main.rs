use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dpg_elasticity::dpg::{SolverKind, SolverOptions};
use dpg_elasticity::material::{problem_by_name, problem_lshape};
use dpg_elasticity::study::{
    format_float, locking_ratios, run_convergence, run_locking, run_lshape, write_csv, write_locking_csv,
    RefinementMode,
};
use dpg_elasticity::{Error, Result};

#[derive(Parser)]
#[command(name = "dpg-elasticity", version, about = "DPG convergence studies for 2D linear elasticity")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Solver::Cholesky, global = true)]
    solver: Solver,
    /// Relative residual tolerance of the linear solve.
    #[arg(long, default_value_t = 1e-10, global = true)]
    tol: f64,
    /// Worker threads, or `auto`.
    #[arg(long, default_value = "auto", global = true)]
    threads: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    Cholesky,
    Cg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Uniform,
    Adaptive,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    j: u8,
    /// Also compute the postprocessed displacement.
    #[arg(long)]
    post: bool,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Uniform refinement study on a problem with known solution.
    Convergence {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        levels: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Locking study over a list of Poisson ratios.
    Locking {
        #[arg(long, value_delimiter = ',', required = true)]
        nu: Vec<f64>,
        #[arg(long = "E", default_value_t = 1e5)]
        e: f64,
        #[arg(long)]
        levels: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Estimator study on the L-shaped domain.
    Lshape {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads != "auto" {
        let n: usize = cli
            .threads
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("--threads expects an integer or auto, got {}", cli.threads)))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let options = SolverOptions {
        kind: match cli.solver {
            Solver::Cholesky => SolverKind::Cholesky,
            Solver::Cg => SolverKind::Cg,
        },
        tol: cli.tol,
    };
    match cli.command {
        Command::Convergence { problem, levels, common } => {
            let problem = problem_by_name(&problem)?;
            let records = run_convergence(&problem, common.k, common.j as usize, levels, common.post, &options)?;
            let mut w = output(&common.out)?;
            write_csv(&mut w, &records)?;
            w.flush()?;
        }
        Command::Locking { nu, e, levels, common } => {
            let runs = run_locking(&nu, e, common.k, common.j as usize, levels, common.post, &options)?;
            {
                let mut w = output(&common.out)?;
                write_locking_csv(&mut w, &runs)?;
                w.flush()?;
            }
            let ratios = locking_ratios(&runs);
            let report = if common.out.is_some() { &mut io::stdout() as &mut dyn Write } else { &mut io::stderr() };
            writeln!(report, "level,max_err_u/min_err_u")?;
            for (l, r) in ratios.iter().enumerate() {
                writeln!(report, "{l},{}", format_float(*r))?;
            }
        }
        Command::Lshape { mode, theta, steps, common } => {
            let problem = problem_lshape(1.0, 0.4)?;
            let mode = match mode {
                Mode::Uniform => RefinementMode::Uniform,
                Mode::Adaptive => RefinementMode::Adaptive,
            };
            let study = run_lshape(&problem, mode, theta, steps, common.k, common.j as usize, common.post, &options)?;
            let mut w = output(&common.out)?;
            write_csv(&mut w, &study.records)?;
            w.flush()?;
            eprintln!("slope of log eta vs log ndof (last 3): {}", format_float(study.slope));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
