//! Stability of the Petrov-Galerkin pair along an adaptive run: the proximality
//! estimate, the error bound against the true error, and the effect of a richer
//! test space on the final partition.
//!
//! `cargo run --release --example stability_estimates -- [problem] [aniso|iso] [cycles]`

use shearlet_transport::fem::{l2_project, TestSpace};
use shearlet_transport::solver::{delta_of, run_with_observer, Discretization, Mode, SolverConfig, TransportProblem};

fn main() -> shearlet_transport::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map_or("boundary", String::as_str);
    let mode = if args.get(2).is_some_and(|m| m == "iso") { Mode::Isotropic } else { Mode::Anisotropic };
    let cycles: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(8);
    let problem = TransportProblem::builtin(name).expect("built-in problem");
    let config = SolverConfig { mode, max_cycles: cycles, delta: true, ..SolverConfig::default() };

    println!("{:>5} {:>6} {:>8} {:>11} {:>11} {:>8}", "cycle", "n", "delta", "errbound", "error", "ratio");
    let report = run_with_observer(&problem, &config, |_, row| {
        let e = row.error.unwrap_or(f64::NAN);
        println!(
            "{:>5} {:>6} {:>8.4} {:>11.4e} {:>11.4e} {:>8.3}",
            row.cycle,
            row.n,
            row.delta.unwrap_or(f64::NAN),
            row.errbound,
            e,
            row.errbound / e
        );
    })?;

    // same error, test space refined twice instead of once
    let exact = problem.exact.as_ref().expect("oracle");
    let d1 = Discretization::new(report.partition.clone(), &problem)?;
    let z2 = TestSpace::with_depth(&report.partition, &problem.b, 2)?;
    let d2 = Discretization::with_test_space(report.partition.clone(), z2, &problem)?;
    let e: Vec<f64> = l2_project(exact, &d1.x).iter().zip(&report.u).map(|(a, b)| a - b).collect();
    println!(
        "final partition: delta {:.4} with dim Z = {}, {:.4} with dim Z = {}",
        delta_of(&d1, &e),
        d1.z.dim(),
        delta_of(&d2, &e),
        d2.z.dim()
    );
    Ok(())
}
