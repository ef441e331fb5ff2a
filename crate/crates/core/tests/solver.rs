use std::sync::Arc;

use shearlet_transport::fem::{l2_error, l2_project, PiecewiseFn, TestSpace};
use shearlet_transport::geometry::{Partition, Point2};
use shearlet_transport::solver::{
    approx_refine, delta_of, run_isotropic, triangles_by_owner, Discretization, Mode, Pieces, SolverConfig,
    StopReason, TransportProblem,
};

fn norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[test]
fn direct_solution_is_a_uzawa_fixed_point() {
    let p = TransportProblem::boundary();
    let d = Discretization::new(Partition::uniform(2), &p).unwrap();
    let uh = d.direct_solve().unwrap();
    let (next, r) = d.uzawa_step(&uh);
    assert!(norm(&next, &uh) < 1e-10);
    assert!(d.project_astar(&r).iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-8);
}

#[test]
fn zero_data_gives_zero_iterates() {
    let base = TransportProblem::curve();
    let p = TransportProblem::new(
        "zero",
        base.b.clone(),
        base.div_b.clone(),
        base.c.clone(),
        PiecewiseFn::constant(0.0),
        Arc::new(|_| 0.0),
        None,
    )
    .unwrap();
    let d = Discretization::new(Partition::uniform(2), &p).unwrap();
    let u = d.uzawa_iterate(&vec![0.0; d.dim()], 5);
    assert!(u.iter().all(|&x| x == 0.0));
}

#[test]
fn uzawa_contracts_at_most_like_delta() {
    for p in [TransportProblem::boundary(), TransportProblem::curve()] {
        let d = Discretization::new(Partition::uniform(2), &p).unwrap();
        let uh = d.direct_solve().unwrap();
        // relative defect of the current error against A*Z
        let mut u = vec![0.0; d.dim()];
        let mut dist = norm(&u, &uh);
        for _ in 0..4 {
            let e: Vec<f64> = uh.iter().zip(&u).map(|(a, b)| a - b).collect();
            let delta = delta_of(&d, &e);
            u = d.uzawa_step(&u).0;
            let next = norm(&u, &uh);
            assert!(next / dist <= delta + 0.05, "{}: ratio {} vs delta {delta}", p.name, next / dist);
            dist = next;
        }
    }
}

#[test]
fn test_space_dimensions() {
    let p = TransportProblem::boundary();
    // one cell, refined to four squares and split into eight triangles:
    // 9 vertices + 16 edges, with 9 nodes on the outflow sides x1 = 1 and x2 = 1
    let z = TestSpace::new(&Partition::uniform(0), &p.b).unwrap();
    assert_eq!(z.dim(), 25 - 9);
    for j in 0..4 {
        let d = Discretization::new(Partition::uniform(j), &p).unwrap();
        assert!(d.z.dim() >= d.dim());
    }
}

#[test]
fn test_space_reproduces_quadratics_vanishing_on_outflow() {
    let p = TransportProblem::boundary();
    let z = TestSpace::new(&Partition::uniform(2), &p.b).unwrap();
    let q = |x: Point2| (1.0 - x.x1) * (1.0 - x.x2);
    let r = z.interpolate(q);
    for t in (0..z.mesh.triangles.len()).step_by(7) {
        let tri = z.mesh.triangle(t);
        let c = Point2::new((tri[0].x1 + tri[1].x1 + tri[2].x1) / 3.0, (tri[0].x2 + tri[1].x2 + tri[2].x2) / 3.0);
        assert!((z.eval_in(&r, t, c).0 - q(c)).abs() < 1e-13);
    }
}

#[test]
fn delta_does_not_grow_with_richer_test_space() {
    let p = TransportProblem::curve();
    let part = Partition::uniform(2);
    let coarse = Discretization::new(part.clone(), &p).unwrap();
    let fine = Discretization::with_test_space(part, TestSpace::with_depth(&coarse.x.partition, &p.b, 2).unwrap(), &p).unwrap();
    let ex = p.exact.as_ref().unwrap();
    let e: Vec<f64> = l2_project(ex, &coarse.x).iter().zip(coarse.uzawa_iterate(&vec![0.0; coarse.dim()], 3)).map(|(a, b)| a - b).collect();
    let (dc, df) = (delta_of(&coarse, &e), delta_of(&fine, &e));
    assert!(df <= dc + 1e-10, "{df} > {dc}");
    assert!(dc < 1.0);
}

#[test]
fn petrov_galerkin_error_is_quasi_optimal() {
    for p in [TransportProblem::boundary(), TransportProblem::curve(), TransportProblem::manufactured()] {
        let ex = p.exact.clone().unwrap();
        for j in [2, 3] {
            let d = Discretization::new(Partition::uniform(j), &p).unwrap();
            let uh = d.direct_solve().unwrap();
            let best = l2_project(&ex, &d.x);
            let e: Vec<f64> = best.iter().zip(&uh).map(|(a, b)| a - b).collect();
            let delta = delta_of(&d, &e);
            let err = l2_error(&d.x, &uh, &ex);
            let opt = l2_error(&d.x, &best, &ex);
            assert!(err <= (1.0 / (1.0 - delta) + 0.1) * opt, "{} J={j}: {err} vs {opt}, delta {delta}", p.name);
        }
    }
}

#[test]
fn residual_in_one_cell_marks_only_that_cell() {
    let p = TransportProblem::boundary();
    let d = Discretization::new(Partition::uniform(2), &p).unwrap();
    let mesh = &d.z.mesh;
    let tris: Vec<[Point2; 3]> = (0..mesh.triangles.len()).map(|t| mesh.triangle(t)).collect();
    let by_owner = triangles_by_owner(&mesh.owner, d.x.partition.len());
    let hot = 5;
    let src = Pieces { triangles: &tris, by_owner: &by_owner, h: |t: usize, q: Point2| if mesh.owner[t] == hot { q.x1 } else { 0.0 } };
    let r = approx_refine(&d.x.partition, &src, 0.99, Mode::Anisotropic).unwrap();
    assert_eq!(r.marked, 1);
    assert!(r.partition.len() > d.x.partition.len());
    let r = approx_refine(&d.x.partition, &src, 0.99, Mode::Isotropic).unwrap();
    assert_eq!(r.marked, 1);
    assert_eq!(r.partition.len(), 16 + 3);
}

#[test]
fn isotropic_rate_on_a_smooth_solution() {
    let p = TransportProblem::manufactured();
    let cfg = SolverConfig { max_cycles: 30, dof_budget: Some(2000), ..SolverConfig::default() };
    let rep = run_isotropic(&p, &cfg).unwrap();
    assert_eq!(rep.stop, StopReason::DofBudget);
    let slope = rep.error_slope(50, 4000).unwrap();
    assert!((-1.25..=-0.75).contains(&slope), "slope {slope}");
}
