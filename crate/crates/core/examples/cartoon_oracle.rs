//! Shearlet-inspired oracle partitions for the reference cartoon: cell counts,
//! best piecewise-affine errors and the normalized rate `error·N/√log₂N`.

use std::time::Instant;

use shearlet_transport::cartoon::{build_oracle_partition, nterm_error, Cartoon};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cartoon = Cartoon::reference();
    println!("{:>3} {:>8} {:>12} {:>8} {:>14} {:>10}", "J", "N", "error", "rate", "err*N/sqrtlog", "secs");
    let mut prev: Option<f64> = None;
    for j in 6..=12 {
        let t = Instant::now();
        let build = build_oracle_partition(&cartoon, j)?;
        let n = build.partition.len() as f64;
        let err = nterm_error(&cartoon, &build.partition);
        let rate = prev.map_or(f64::NAN, |p| (p / err).log2());
        prev = Some(err);
        println!(
            "{j:>3} {n:>8} {err:>12.4e} {rate:>8.3} {:>14.4} {:>10.2}   non-par gamma cells/level: {:?}",
            err * n / n.log2().sqrt(),
            t.elapsed().as_secs_f64(),
            build.gamma_non_parallelograms
        );
    }
    Ok(())
}
