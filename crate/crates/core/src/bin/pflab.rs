use clap::{Parser, Subcommand, ValueEnum};
use pflab::harness::{
    self, emit_plots, exit_code, run_experiment, AcceptanceContext, ExperimentConfig, Level,
};
use pflab::nonlinearity::Nonlinearity;
use pflab::solvers::solve_traveling_wave;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "pflab",
    version,
    about = "P-function gradient-estimate laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from an INI or JSON config and write its bundle.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `experiment.output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite.
    Accept {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        /// Also write the summary as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write a gnuplot script for an experiment bundle.
    Plot {
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Traveling wave of the imbalanced double well.
    Wave {
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 20.0)]
        halfwidth: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Write the profile as `xi,u` CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    harness::init_thread_pool();
    match cli.command {
        Command::Run { config, out } => {
            let mut cfg = match ExperimentConfig::from_path(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(2);
                }
            };
            if let Some(out) = out {
                cfg.output = out;
            }
            let result = run_experiment(&cfg);
            match &result {
                Ok(o) => println!(
                    "{}: {} ({})",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.summary,
                    o.bundle.display()
                ),
                Err(e) => eprintln!("error: {e}"),
            }
            code(exit_code(&result))
        }
        Command::Accept { level, json } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let summary = harness::acceptance::run(level, &AcceptanceContext::default());
            for r in &summary.results {
                println!("{r}");
            }
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
                if let Err(e) = std::fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return code(3);
                }
            }
            let failed = summary.results.iter().filter(|r| !r.passed).count();
            if failed == 0 {
                println!("all {} checks passed", summary.results.len());
                code(0)
            } else {
                println!("{failed} of {} checks failed", summary.results.len());
                code(1)
            }
        }
        Command::Plot { bundle } => match emit_plots(&bundle) {
            Ok(path) => {
                println!("{}", path.display());
                code(0)
            }
            Err(e) => {
                eprintln!("error: {e}");
                code(3)
            }
        },
        Command::Wave {
            beta,
            halfwidth,
            tol,
            csv,
        } => {
            let nl = match Nonlinearity::double_well(beta) {
                Ok(nl) => nl,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(2);
                }
            };
            let w = match solve_traveling_wave(&nl, halfwidth, tol) {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("error: {e}");
                    return code(3);
                }
            };
            println!("speed      {:.12}", w.speed);
            println!("sqrt2|b|   {:.12}", std::f64::consts::SQRT_2 * beta.abs());
            println!("wells      {} -> {}", w.wells.0, w.wells.1);
            println!("residual   {:.3e}", w.residual);
            if let Some(path) = csv {
                let mut s = String::from("xi,u\n");
                for (x, u) in w.xi.iter().zip(&w.profile) {
                    let _ = writeln!(s, "{x},{u}");
                }
                if let Err(e) = std::fs::write(&path, s) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return code(3);
                }
            }
            code(0)
        }
    }
}
