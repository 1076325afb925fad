use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakdiscord::discord::{mutual_information, quantum_discord};
use weakdiscord::pathway::Pathway;
use weakdiscord::qmath::ComplexMatrix;
use weakdiscord::states::DensityOperator;
use weakdiscord::sweep::{cmd_sweep, dense_grid, optimizer_from_env, parse_x_grid, StateSpec, SweepConfig};
use weakdiscord::verify::{run_suite, Suite, VerifyOptions};
use weakdiscord::Error;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;

/// Quantum discord under weak measurements on two-qubit states.
#[derive(Parser)]
#[command(name = "weakdiscord", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the weak strength x and write QD, SQD and WQD to a CSV file.
    Sweep {
        /// werner:Z, bd:C1,C2,C3, werner-paper or bd-paper
        #[arg(long, value_parser = parse_state)]
        state: StateSpec,
        /// direct, kraus or dilation
        #[arg(long, default_value = "direct", value_parser = parse_pathway)]
        pathway: Pathway,
        /// table1 or dense:N
        #[arg(long, default_value = "table1", value_parser = parse_grid)]
        x_grid: XGrid,
        /// N uniform points on [0, 5]; overrides --x-grid
        #[arg(long)]
        dense: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an invariant suite; exits 1 if any check fails.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        /// List every check, not only failures.
        #[arg(long)]
        verbose: bool,
        #[arg(long, hide = true)]
        fault_half_prefactor: bool,
    },
    /// Print a state with its spectrum, marginals, mutual information and QD.
    State {
        /// werner:Z, bd:C1,C2,C3, werner-paper or bd-paper
        #[arg(value_parser = parse_state)]
        preset: StateSpec,
        /// Print the density matrix as JSON instead.
        #[arg(long)]
        json: bool,
    },
}

// a bare Vec field would make clap expect repeated values
#[derive(Clone, Debug)]
struct XGrid(Vec<f64>);

fn parse_grid(s: &str) -> Result<XGrid, String> {
    parse_x_grid(s).map(XGrid).map_err(|e| e.to_string())
}

fn parse_state(s: &str) -> Result<StateSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pathway(s: &str) -> Result<Pathway, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) => EXIT_IO,
        Error::Convergence { .. } | Error::RouteMismatch { .. } => EXIT_VERIFY_FAILED,
        Error::Domain(_) | Error::Dimension(_) => EXIT_DOMAIN,
    }
}

fn print_matrix(m: &ComplexMatrix) {
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m[(i, j)];
                format!("{:>9.5}{:+.5}i", z.re, z.im)
            })
            .collect();
        println!("  {}", row.join("  "));
    }
}

fn print_state(spec: &StateSpec, rho: &DensityOperator) -> weakdiscord::Result<()> {
    println!("state {spec}");
    println!("density matrix:");
    print_matrix(rho.matrix());
    let eig: Vec<String> = rho.eigenvalues().iter().map(|v| format!("{v:.6}")).collect();
    println!("eigenvalues: {}", eig.join(" "));
    let (a, b) = rho.marginals()?;
    println!("marginal A:");
    print_matrix(a.matrix());
    println!("marginal B:");
    print_matrix(b.matrix());
    println!("I(A:B) = {:.6}", mutual_information(rho)?);
    let qd = quantum_discord(rho, &optimizer_from_env()?)?;
    println!(
        "QD = {:.6} (theta = {:.6}, phi = {:.6})",
        qd.qd,
        qd.opt_basis.theta(),
        qd.opt_basis.phi()
    );
    Ok(())
}

fn run(cli: Cli) -> weakdiscord::Result<u8> {
    match cli.command {
        Command::Sweep { state, pathway, x_grid, dense, out } => {
            let cfg = SweepConfig {
                state,
                x_grid: dense.map(dense_grid).unwrap_or(x_grid.0),
                pathway,
                optimizer: optimizer_from_env()?,
                output_path: out,
            };
            println!("{}", cmd_sweep(&cfg)?);
            Ok(0)
        }
        Command::Verify { suite, verbose, fault_half_prefactor } => {
            let suite: Suite = suite.parse()?;
            let opts = VerifyOptions { fault_half_prefactor, optimizer: optimizer_from_env()? };
            let report = run_suite(suite, &opts);
            if verbose {
                for c in &report.checks {
                    let tag = if c.passed { "ok  " } else { "FAIL" };
                    println!("{tag} [{}] {}: {:e} (tol {:e})", c.suite, c.name, c.deviation, c.tolerance);
                }
            }
            print!("{report}");
            Ok(if report.passed() { 0 } else { EXIT_VERIFY_FAILED })
        }
        Command::State { preset, json } => {
            let rho = preset.build()?;
            if json {
                println!("{}", rho.to_json()?);
            } else {
                print_state(&preset, &rho)?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
