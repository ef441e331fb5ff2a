//! Uzawa iterates on a fixed uniform grid against the direct saddle point solution.
//!
//! `cargo run --release --example uzawa_contraction -- [problem] [level]`

use shearlet_transport::fem::sparse::dot;
use shearlet_transport::geometry::Partition;
use shearlet_transport::solver::{Discretization, TransportProblem};

fn main() -> shearlet_transport::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map_or("boundary", String::as_str);
    let level: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let problem = TransportProblem::builtin(name).expect("built-in problem");
    let disc = Discretization::new(Partition::uniform(level), &problem)?;
    let uh = disc.direct_solve()?;
    println!("problem={name} grid={0}x{0} dim X={1} dim Z={2}", 1 << level, disc.dim(), disc.z.dim());
    let exact = problem.exact.as_ref().expect("oracle");
    let delta = disc.estimate_delta(&uh, exact);
    println!("delta(u_h) = {delta:.4}");
    let mut u = vec![0.0; disc.dim()];
    let dist = |u: &[f64]| {
        let d: Vec<f64> = u.iter().zip(&uh).map(|(a, b)| a - b).collect();
        dot(&d, &d).sqrt()
    };
    let mut prev = dist(&u);
    println!("{:>3} {:>14} {:>8}", "k", "|u_h - u^k|", "ratio");
    for k in 1..=10 {
        u = disc.uzawa_step(&u).0;
        let d = dist(&u);
        println!("{k:>3} {d:>14.6e} {:>8.4}", d / prev);
        prev = d;
    }
    Ok(())
}
