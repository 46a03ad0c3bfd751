use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lyapunov_dissipation::experiment::{self, fmt_float, ExperimentConfig, TARGET_LABEL};
use lyapunov_dissipation::Error;

// A closed stdout (e.g. piping into `head`) must not abort a finished run.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Lindblad simulator with Lyapunov feedback for dissipative state preparation.
#[derive(Parser)]
#[command(name = "lyadiss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory and write trajectory.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every cell of the configured sweep and write sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (defaults to the number of CPUs).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check the dark-state conditions and write verify.csv.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Final fidelity over noise intensities and decay rates; writes noise.csv.
    NoiseScan {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated noise intensities, e.g. 0,0.1,0.2
        #[arg(long, value_delimiter = ',', required = true)]
        etas: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run the full and effective pictures side by side.
    CompareZeno {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn out_dir(flag: Option<PathBuf>, cfg: &ExperimentConfig) -> PathBuf {
    flag.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."))
}

fn load(path: &Path) -> Result<ExperimentConfig, Error> {
    ExperimentConfig::from_file(path)
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = load(&config)?;
            let dir = out_dir(out, &cfg);
            let rec = experiment::run_simulate(&cfg, &dir)?;
            say!(
                "{} records, final V = {}, final {TARGET_LABEL} = {}",
                rec.len(),
                fmt_float(rec.final_v()),
                rec.final_population(TARGET_LABEL).map_or("n/a".into(), fmt_float)
            );
            say!("wrote {}", dir.join("trajectory.csv").display());
        }
        Command::Sweep { config, out, jobs } => {
            let cfg = load(&config)?;
            let dir = out_dir(out, &cfg);
            let result = experiment::run_sweep(&cfg, &dir, jobs)?;
            if let Some(best) = result.best() {
                let coords: Vec<String> = result
                    .axes
                    .iter()
                    .zip(&best.axis_values)
                    .map(|(a, v)| format!("{} = {v}", a.path))
                    .collect();
                say!("{} cells, best F_S = {} at {}", result.cells.len(), fmt_float(best.fidelity), coords.join(", "));
            }
            say!("wrote {}", dir.join("sweep.csv").display());
        }
        Command::Verify { config, out } => {
            let cfg = load(&config)?;
            let dir = out_dir(out, &cfg);
            let report = experiment::run_verify(&cfg, &dir)?;
            say!("{}", experiment::verify_text(&report).trim_end());
            if !report.all_pass() {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::NoiseScan { config, etas, out, jobs } => {
            let cfg = load(&config)?;
            let dir = out_dir(out, &cfg);
            let points = experiment::run_noise_scan(&cfg, &etas, &dir, jobs)?;
            for p in &points {
                say!("eta = {}  gamma = {}  F_S = {}", p.eta, p.gamma, fmt_float(p.fidelity));
            }
            say!("wrote {}", dir.join("noise.csv").display());
        }
        Command::CompareZeno { config, out } => {
            let cfg = load(&config)?;
            let dir = out_dir(out, &cfg);
            let cmp = experiment::run_compare_zeno(&cfg, &dir)?;
            for (label, d) in &cmp.deviations {
                say!("{label:<8} max |full - effective| = {}", fmt_float(*d));
            }
            say!("wrote trajectory_full.csv, trajectory_effective.csv, zeno_summary.csv in {}", dir.display());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            // unwritable output paths count as configuration problems too
            ExitCode::from(if e.is_numerical_abort() { EXIT_NUMERICAL } else { EXIT_CONFIG })
        }
    }
}
