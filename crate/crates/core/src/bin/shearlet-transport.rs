use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shearlet_transport::cli::{execute, exit_code, parse_config_with, read_config_file, Command, RunConfig};
use shearlet_transport::Result;

#[derive(Parser)]
#[command(name = "shearlet-transport", version, about = "Adaptive anisotropic transport solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Adaptive solve of a built-in problem; CSV columns n, delta, error, rate.
    Solve(Flags),
    /// Oracle partitions of the reference cartoon; CSV columns J, N, error, rate.
    CartoonBench(Flags),
    /// Bisection partitions of the reference cartoon (even J only).
    BisectBench(Flags),
    /// Sparse tensor combination over directions; CSV columns n, inv_n, log_inv_n, E_L.
    Parametric(Flags),
    /// Per-cycle stability estimates and error bounds.
    Delta(Flags),
}

/// Flags override values read from `--config`.
#[derive(Args)]
struct Flags {
    /// File of key=value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// aniso or iso.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// Uzawa steps per cycle.
    #[arg(long = "K")]
    k: Option<String>,
    #[arg(long = "J0")]
    j0: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    max_cycles: Option<String>,
    #[arg(long)]
    dof_budget: Option<String>,
    /// Finest direction level.
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long)]
    cdof: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    full_tensor: bool,
    #[arg(long)]
    j_min: Option<String>,
    #[arg(long)]
    j_max: Option<String>,
    #[arg(long)]
    csv: Option<String>,
    #[arg(long)]
    mesh_dump: Option<String>,
}

fn build(command: Command, f: Flags) -> Result<RunConfig> {
    let text = match &f.config {
        Some(path) => read_config_file(path)?,
        None => String::new(),
    };
    let flags = [
        ("problem", f.problem),
        ("mode", f.mode),
        ("theta", f.theta),
        ("k", f.k),
        ("j0", f.j0),
        ("eps", f.eps),
        ("max_cycles", f.max_cycles),
        ("dof_budget", f.dof_budget),
        ("l", f.l),
        ("cdof", f.cdof),
        ("alpha", f.alpha),
        ("j_min", f.j_min),
        ("j_max", f.j_max),
        ("csv", f.csv),
        ("mesh_dump", f.mesh_dump),
        ("full_tensor", f.full_tensor.then(|| "true".to_string())),
        ("command", Some(command.as_str().to_string())),
    ];
    let overrides: Vec<(&str, String)> = flags.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
    parse_config_with(&text, &overrides)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Solve(f) => (Command::Solve, f),
        Cmd::CartoonBench(f) => (Command::CartoonBench, f),
        Cmd::BisectBench(f) => (Command::BisectBench, f),
        Cmd::Parametric(f) => (Command::Parametric, f),
        Cmd::Delta(f) => (Command::Delta, f),
    };
    let result = build(command, flags).and_then(|cfg| execute(&cfg, std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
