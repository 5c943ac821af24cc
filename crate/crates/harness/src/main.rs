use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ftrlm_harness::config::parse_config;
use ftrlm_harness::csv_io::{mean_series, parse_csv, render_csv};
use ftrlm_harness::runner::run_experiment;
use ftrlm_harness::slope::{slope_fit, DEFAULT_WINDOW};
use ftrlm_harness::sweep::{all_passed, default_grid, render_sweep_csv, run_sweep, SweepCell};
use ftrlm_harness::{Error, Result};

#[derive(Parser)]
#[command(
    name = "ftrlm",
    version,
    about = "Momentum-optimizer experiment harness: multi-seed runs, \
             worst-case sweeps, and convergence-rate fits"
)]
struct Cli {
    /// Size of the worker thread pool (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every (algorithm, stepsize, seed) combination of a config file
    /// and emit objective-per-epoch CSV.
    Run {
        /// Path to a key=value experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory used to resolve relative dataset paths
        /// (falls back to $FTRLM_DATA_DIR).
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Replay the adversarial construction and compare realized gaps
    /// against predicted floors. Exits 2 when any cell falls short.
    Lowerbound {
        /// Sweep the default 27-cell grid (also the default with no cell
        /// flags).
        #[arg(long)]
        grid: bool,
        /// Horizon of a single cell; requires --beta and --alpha.
        #[arg(long = "T")]
        t: Option<usize>,
        /// Momentum of a single cell.
        #[arg(long)]
        beta: Option<f64>,
        /// Stepsize decay exponent of a single cell.
        #[arg(long)]
        alpha: Option<f64>,
        /// Stepsize constant.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Lipschitz budget of the construction.
        #[arg(long = "L", default_value_t = 1.0)]
        l: f64,
        /// Write the per-cell CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit log-log rate slopes to the mean series of a run CSV.
    Slopes {
        /// CSV produced by `ftrlm run`.
        #[arg(long)]
        csv: PathBuf,
        /// Fraction of late epochs used in the fit.
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: f64,
        /// Reference optimal value subtracted before taking logs.
        #[arg(long, default_value_t = 0.0)]
        fstar: f64,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.cmd {
        Cmd::Run {
            config,
            out,
            data_dir,
        } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Error::io(&config, e))?;
            let cfg = parse_config(&text)?;
            let data_dir =
                data_dir.or_else(|| std::env::var_os("FTRLM_DATA_DIR").map(PathBuf::from));
            let records = run_experiment(&cfg, data_dir.as_deref())?;
            emit(out.as_deref(), &render_csv(&records)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Lowerbound {
            grid,
            t,
            beta,
            alpha,
            c,
            l,
            out,
        } => {
            let cells = select_cells(grid, t, beta, alpha)?;
            let rows = run_sweep(&cells, c, l)?;
            emit(out.as_deref(), &render_sweep_csv(&rows))?;
            if all_passed(&rows) {
                Ok(ExitCode::SUCCESS)
            } else {
                let short = rows.iter().filter(|r| !r.passed()).count();
                eprintln!(
                    "{short} of {} cells realized a gap below the predicted floor",
                    rows.len()
                );
                Ok(ExitCode::from(2))
            }
        }
        Cmd::Slopes { csv, window, fstar } => {
            let text = std::fs::read_to_string(&csv).map_err(|e| Error::io(&csv, e))?;
            let groups = mean_series(&parse_csv(&text)?);
            if groups.is_empty() {
                return Err(Error::Config(format!(
                    "{}: no mean rows to fit",
                    csv.display()
                )));
            }
            println!("algo,schedule,slope");
            for (algo, schedule, values) in groups {
                let slope = slope_fit(&values, fstar, window)?;
                println!("{algo},{schedule},{slope:e}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn select_cells(
    grid: bool,
    t: Option<usize>,
    beta: Option<f64>,
    alpha: Option<f64>,
) -> Result<Vec<SweepCell>> {
    match (grid, t, beta, alpha) {
        (_, None, None, None) => Ok(default_grid()),
        (false, Some(rounds), Some(beta), Some(alpha_exp)) => Ok(vec![SweepCell {
            rounds,
            beta,
            alpha_exp,
        }]),
        _ => Err(Error::Config(
            "give either --grid or all three of --T, --beta, --alpha".into(),
        )),
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
