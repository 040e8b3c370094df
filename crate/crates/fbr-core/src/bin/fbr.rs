//! Command-line front end: instance generation, solving, benchmarking, and
//! verification.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver failure,
//! 4 verification failure.

use clap::{Parser, Subcommand};
use fbr_core::bench::{
    records_to_csv, run_benchmark, solve_instance, verification_constraints, Algorithm,
};
use fbr_core::error::{FbrError, Result};
use fbr_core::instance::{gen_instance, Instance, DEFAULT_SIDE_FACTOR};
use fbr_core::render::render_svg;
use fbr_core::verify::verify_solution;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fbr",
    about = "Restore biconnectivity of a robot communication network with minimal maximum displacement"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a barely connected instance by seeded rejection sampling
    Gen {
        /// Number of surviving robots (one more is sampled, then removed)
        #[arg(long)]
        n: usize,
        /// Communication radius in meters
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[arg(long)]
        seed: u64,
        /// Sampling square side = side-factor * h * sqrt(n + 1)
        #[arg(long, default_value_t = DEFAULT_SIDE_FACTOR)]
        side_factor: f64,
        /// Output instance path (JSON)
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance with one algorithm
    Solve {
        #[arg(long)]
        algo: String,
        /// Input instance path
        #[arg(long = "in")]
        input: PathBuf,
        /// Output solution path (JSON)
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG rendering of the solved instance
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Sweep instance sizes and algorithms, emitting one CSV row per run
    Bench {
        /// Comma-separated algorithms: ea-scr,ea-opt,bt,cr,opt
        #[arg(long)]
        algos: String,
        /// Comma-separated robot counts, e.g. 8,16,32
        #[arg(long)]
        n_list: String,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed0: u64,
        #[arg(long, default_value_t = DEFAULT_SIDE_FACTOR)]
        side_factor: f64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-verify a solution file against its instance
    Verify {
        /// Input instance path
        #[arg(long = "in")]
        input: PathBuf,
        /// Solution path produced by `solve`
        #[arg(long)]
        solution: PathBuf,
    },
}

fn load_instance(path: &PathBuf) -> Result<Instance> {
    Instance::from_json(&std::fs::read_to_string(path)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            n,
            h,
            seed,
            side_factor,
            out,
        } => {
            let instance = gen_instance(n, h, seed, side_factor)?;
            std::fs::write(&out, instance.to_json()?)?;
            println!("wrote instance n={n} seed={seed} to {}", out.display());
            Ok(())
        }
        Command::Solve {
            algo,
            input,
            out,
            svg,
        } => {
            let algorithm: Algorithm = algo.parse()?;
            let instance = load_instance(&input)?;
            let output = solve_instance(&instance, algorithm)?;
            std::fs::write(&out, output.to_json()?)?;
            if let Some(svg_path) = svg {
                std::fs::write(&svg_path, render_svg(&instance, Some(&output)))?;
            }
            let config = instance.config()?;
            let constraints =
                verification_constraints(&instance, algorithm, &output.augmentation)?;
            let report = verify_solution(&config, &output.solution, constraints.as_ref())?;
            println!(
                "{algorithm}: minmax {:.6} m, iterations {}, verified biconnected: {}",
                report.minmax, output.solution.iterations, report.biconnected
            );
            if !report.biconnected || !report.violated_pairs.is_empty() {
                return Err(FbrError::VerificationFailure(format!(
                    "biconnected: {}, violated pairs: {:?}",
                    report.biconnected, report.violated_pairs
                )));
            }
            Ok(())
        }
        Command::Bench {
            algos,
            n_list,
            trials,
            seed0,
            side_factor,
            out,
        } => {
            let algorithms: Vec<Algorithm> = algos
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<_>>()?;
            let n_values: Vec<usize> = n_list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| FbrError::InvalidInput(format!("bad n '{s}': {e}")))
                })
                .collect::<Result<_>>()?;
            let records = run_benchmark(&algorithms, &n_values, trials, seed0, side_factor)?;
            std::fs::write(&out, records_to_csv(&records))?;
            let failures = records.iter().filter(|r| !r.succeeded).count();
            println!(
                "wrote {} records ({} failures) to {}",
                records.len(),
                failures,
                out.display()
            );
            Ok(())
        }
        Command::Verify { input, solution } => {
            let instance = load_instance(&input)?;
            let output = fbr_core::bench::SolveOutput::from_json(&std::fs::read_to_string(
                &solution,
            )?)?;
            let config = instance.config()?;
            let constraints =
                verification_constraints(&instance, output.algorithm, &output.augmentation)?;
            let report = verify_solution(&config, &output.solution, constraints.as_ref())?;
            println!("biconnected: {}", report.biconnected);
            println!("minmax: {:.9} m", report.minmax);
            println!("violated pairs: {}", report.violated_pairs.len());
            println!("disjoint-path witnesses: {}", report.witness_samples.len());
            if !report.biconnected || !report.violated_pairs.is_empty() {
                return Err(FbrError::VerificationFailure(
                    "solution failed verification".into(),
                ));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
