//! Closed-form solutions of the built-in problems, traced along characteristics,
//! and the averaged solution of the direction family as a function of the angle.

use std::f64::consts::FRAC_PI_4;

use shearlet_transport::geometry::Point2;
use shearlet_transport::parametric::{g_exact, reference_integral, FunctionalG};
use shearlet_transport::solver::exact_solution;

fn main() -> shearlet_transport::Result<()> {
    let spots = [
        ("boundary", None, Point2::new(0.9, 0.3)),
        ("curve", None, Point2::new(0.5, 0.5)),
        ("curve", None, Point2::new(0.1, 0.6)),
        ("manufactured", None, Point2::new(0.3, 0.7)),
        ("parametric", Some(0.0), Point2::new(0.4, 0.2)),
        ("parametric", Some(FRAC_PI_4), Point2::new(0.1, 0.9)),
    ];
    for (name, theta, p) in spots {
        let u = exact_solution(name, theta, p)?;
        let th = theta.map_or(String::new(), |t| format!(" theta={t:.4}"));
        println!("u_{name}{th}({}, {}) = {u:.6}", p.x1, p.x2);
    }

    let g = FunctionalG::default();
    println!("\n{:>8} {:>12}", "theta", "G(u)");
    for i in 0..=8 {
        let t = FRAC_PI_4 * i as f64 / 8.0;
        println!("{t:>8.4} {:>12.8}", g_exact(&g, t));
    }
    println!("integral over [0, pi/4]: {:.10}", reference_integral(&g));
    Ok(())
}
