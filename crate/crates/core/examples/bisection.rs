//! Bisection-only partitions (rules R1–R3) for the reference cartoon, with the
//! normalized rate `error·N/log₂N` and a nestedness check between successive scales.

use std::time::Instant;

use shearlet_transport::cartoon::{build_bisection_partition, nterm_error, Cartoon};
use shearlet_transport::geometry::Partition;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cartoon = Cartoon::reference();
    println!("{:>3} {:>8} {:>12} {:>8} {:>12} {:>7} {:>7} {:>8}", "J", "N", "error", "rate", "err*N/logN", "splits", "nested", "secs");
    let mut prev: Option<(f64, Partition)> = None;
    for j in (6..=12).step_by(2) {
        let t = Instant::now();
        let build = build_bisection_partition(&cartoon, j)?;
        let n = build.partition.len() as f64;
        let err = nterm_error(&cartoon, &build.partition);
        let rate = prev.as_ref().map_or(f64::NAN, |(p, _)| (p / err).log2() / 2.0);
        let nest = prev.as_ref().map(|(_, q)| build.partition.refines(q));
        println!(
            "{j:>3} {n:>8} {err:>12.4e} {rate:>8.3} {:>12.4} {:>7} {:>7} {:>8.2}",
            err * n / n.log2(),
            build.splits,
            nest.map_or("-".to_string(), |b| b.to_string()),
            t.elapsed().as_secs_f64()
        );
        prev = Some((err, build.partition));
    }
    Ok(())
}
