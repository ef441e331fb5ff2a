//! Adaptive anisotropic (or isotropic) solve of a built-in transport problem.
//!
//! `cargo run --release --example adaptive_solver -- [curve|boundary|manufactured] [aniso|iso] [cycles]`

use std::time::Instant;

use shearlet_transport::solver::{run_with_observer, Mode, SolverConfig, TransportProblem};

fn main() -> shearlet_transport::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map_or("boundary", String::as_str);
    let mode = match args.get(2).map(String::as_str) {
        Some("iso") => Mode::Isotropic,
        _ => Mode::Anisotropic,
    };
    let cycles: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(14);
    let problem = TransportProblem::builtin(name).expect("built-in problem");
    let config = SolverConfig { mode, max_cycles: cycles, delta: true, dof_budget: Some(2500), ..Default::default() };
    let t0 = Instant::now();
    println!("{:>5} {:>7} {:>11} {:>11} {:>11} {:>7} {:>7} {:>6}", "cycle", "n", "errbound", "loop_bound", "error", "ratio", "delta", "secs");
    let report = run_with_observer(&problem, &config, |_, r| {
        let e = r.error.unwrap_or(f64::NAN);
        println!(
            "{:>5} {:>7} {:>11.4e} {:>11.4e} {:>11.4e} {:>7.3} {:>7.4} {:>6.1}",
            r.cycle,
            r.n,
            r.errbound,
            r.loop_bound,
            e,
            r.errbound / e,
            r.delta.unwrap_or(f64::NAN),
            t0.elapsed().as_secs_f64()
        );
    })?;
    if let Some(s) = report.error_slope(50, 2000) {
        println!("fitted error slope over n in [50, 2000]: {s:.3}");
    }
    println!("stop: {:?}", report.stop);
    Ok(())
}
