//! Sparse tensor quadrature of the averaged solution over all transport directions.
//!
//! Usage: `parametric_combination [max_L] [c_dof] [full]`

use std::time::Instant;

use shearlet_transport::parametric::{
    default_template, reference_integral, run_sparse, work_accounting, FunctionalG, ParametricProblem, SparseTensorPlan,
};

fn main() -> shearlet_transport::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let max_l: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(4);
    let c_dof: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let full = args.get(2).is_some_and(|s| s == "full");

    let g = FunctionalG::default();
    let t = Instant::now();
    let reference = reference_integral(&g);
    println!("reference I = {reference:.12}  ({:.2}s)", t.elapsed().as_secs_f64());

    let problem = ParametricProblem::sheared();
    let template = default_template();
    println!("{:>2} {:>7} {:>12} {:>12} {:>9} {:>7}", "L", "n", "I_L", "E_L", "E_L*n", "secs");
    for l in 1..=max_l {
        let plan = SparseTensorPlan { c_dof, full_tensor: full, ..SparseTensorPlan::new(l) };
        let t = Instant::now();
        let rep = run_sparse(&problem, &g, &plan, &template, reference)?;
        let w = work_accounting(&rep);
        println!(
            "{l:>2} {:>7} {:>12.8} {:>12.4e} {:>9.4} {:>7.1}",
            rep.n,
            rep.estimate,
            rep.error,
            w.error_n,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
