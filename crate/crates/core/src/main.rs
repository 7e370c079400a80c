use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use clark_lab::bundled::BUNDLED;
use clark_lab::harness::{run_scenario, run_scenario_file, RunOptions};
use clark_lab::herglotz::BlaschkeProduct;
use clark_lab::rank_one::{
    clark_measure, perturb_selfadjoint, perturb_unitary, CyclicOperatorModel, Kind,
};
use clark_lab::report::RunReport;
use clark_lab::scenario::parse_scenario;
use clark_lab::Error;

#[derive(Parser)]
#[command(
    name = "clark-lab",
    version,
    about = "Clark measures and rank-one perturbation checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print its report.
    Run {
        scenario: PathBuf,
        #[arg(long, env = "CLARK_LAB_WORKERS")]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include per-check wall times (makes reports non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run every bundled scenario.
    VerifyAll {
        #[arg(long, env = "CLARK_LAB_WORKERS")]
        workers: Option<usize>,
        /// Directory to write one report per scenario.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Clark measure of a Blaschke product as `angle,mass` CSV.
    Clark {
        #[arg(long)]
        theta: PathBuf,
        /// `re,im`, `a+bi` or a real number.
        #[arg(long, value_parser = parse_complex)]
        alpha: Complex64,
    },
    /// Print the spectral measure of a rank-one perturbation as CSV.
    Perturb {
        #[arg(long)]
        model: PathBuf,
        /// Coupling λ (line models) or the angle of α (circle models).
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    if let Some((re, im)) = s.split_once(',') {
        let re = re.trim().parse::<f64>().map_err(|e| e.to_string())?;
        let im = im.trim().parse::<f64>().map_err(|e| e.to_string())?;
        return Ok(Complex64::new(re, im));
    }
    s.parse::<Complex64>()
        .map_err(|e| format!("not a complex number: {e}"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> clark_lab::Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn summary_line(report: &RunReport) -> String {
    format!(
        "{}: {}/{} passed",
        report.scenario, report.summary.passed, report.summary.total
    )
}

fn failures(report: &RunReport) {
    for r in report.records.iter().filter(|r| !r.pass) {
        eprintln!(
            "FAIL {} observed={} expected={} tolerance={}",
            r.id, r.observed, r.expected, r.tolerance
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> clark_lab::Result<bool> {
    match command {
        Command::Run {
            scenario,
            workers,
            out,
            timings,
        } => {
            let report = run_scenario_file(&scenario, RunOptions { workers, timings })?;
            let json = report.to_json();
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => println!("{json}"),
            }
            failures(&report);
            eprintln!("{}", summary_line(&report));
            Ok(report.all_pass())
        }
        Command::VerifyAll { workers, out } => {
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
            }
            let mut ok = true;
            for (name, text) in BUNDLED {
                let report = run_scenario(
                    &parse_scenario(text)?,
                    RunOptions {
                        workers,
                        timings: false,
                    },
                )?;
                if let Some(dir) = &out {
                    std::fs::write(dir.join(format!("{name}.json")), report.to_json() + "\n")?;
                }
                failures(&report);
                println!(
                    "{} {}",
                    if report.all_pass() { "PASS" } else { "FAIL" },
                    summary_line(&report)
                );
                ok &= report.all_pass();
            }
            Ok(ok)
        }
        Command::Clark { theta, alpha } => {
            let theta: BlaschkeProduct = read_json(&theta)?;
            let mu = clark_measure(&theta, alpha)?;
            println!("angle,mass");
            for (s, m) in mu.atoms() {
                println!("{s:e},{m:e}");
            }
            Ok(true)
        }
        Command::Perturb { model, lambda } => {
            let model: CyclicOperatorModel = read_json(&model)?;
            println!("position,mass");
            let atoms = match model.kind() {
                Kind::Line => perturb_selfadjoint(&model, lambda)?.atoms().to_vec(),
                Kind::Circle => perturb_unitary(&model, Complex64::from_polar(1.0, lambda))?
                    .atoms()
                    .to_vec(),
            };
            for (x, m) in atoms {
                println!("{x:e},{m:e}");
            }
            Ok(true)
        }
    }
}
