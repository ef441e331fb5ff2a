//! Discontinuous affine trial spaces and continuous quadratic test spaces.

use std::collections::HashMap;

use super::mesh::{companion_triangulation, refine_once, CompanionMesh};
use super::onb::LocalOnb;
use crate::geometry::{Partition, Point2};
use crate::solver::VectorFn;
use crate::Result;

/// Piecewise affine functions, three orthonormal basis functions per cell.
#[derive(Clone, Debug)]
pub struct TrialSpace {
    pub partition: Partition,
    pub onb: Vec<LocalOnb>,
}

impl TrialSpace {
    pub fn new(partition: Partition) -> TrialSpace {
        let onb = partition.cells.iter().map(|c| LocalOnb::new(c.vertices())).collect();
        TrialSpace { partition, onb }
    }

    pub fn dim(&self) -> usize {
        3 * self.partition.len()
    }

    /// Value of the coefficient vector `u` on cell `cell` at `p`.
    pub fn eval_in(&self, u: &[f64], cell: usize, p: Point2) -> f64 {
        self.onb[cell].combine(&u[3 * cell..3 * cell + 3], p)
    }
}

/// Quadratic Lagrange basis on a triangle: values and gradients at `p`.
///
/// Node order: the three vertices, then the midpoints of edges 01, 12, 20.
pub fn p2_basis(tri: &[Point2; 3], p: Point2) -> ([f64; 6], [Point2; 6]) {
    let [a, b, c] = *tri;
    let det = (b - a).cross(c - a);
    // barycentric gradients
    let g1 = Point2::new(b.x2 - c.x2, c.x1 - b.x1);
    let g2 = Point2::new(c.x2 - a.x2, a.x1 - c.x1);
    let g3 = Point2::new(a.x2 - b.x2, b.x1 - a.x1);
    let gl = [(1.0 / det) * g1, (1.0 / det) * g2, (1.0 / det) * g3];
    let lb = (p - a).cross(c - a) / det;
    let lc = (b - a).cross(p - a) / det;
    let l = [1.0 - lb - lc, lb, lc];
    let mut v = [0.0; 6];
    let mut g = [Point2::new(0.0, 0.0); 6];
    for i in 0..3 {
        v[i] = l[i] * (2.0 * l[i] - 1.0);
        g[i] = (4.0 * l[i] - 1.0) * gl[i];
    }
    for (k, (i, j)) in [(0, 1), (1, 2), (2, 0)].into_iter().enumerate() {
        v[3 + k] = 4.0 * l[i] * l[j];
        g[3 + k] = (4.0 * l[j]) * gl[i] + (4.0 * l[i]) * gl[j];
    }
    (v, g)
}

/// Continuous piecewise quadratics on the companion mesh of the once-refined partition,
/// vanishing on the outflow boundary.
#[derive(Clone, Debug)]
pub struct TestSpace {
    pub mesh: CompanionMesh,
    /// Lagrange nodes: mesh vertices, then edge midpoints.
    pub nodes: Vec<Point2>,
    pub tri_nodes: Vec<[usize; 6]>,
    /// Unconstrained index of every node; `None` on the outflow boundary.
    pub dof_of_node: Vec<Option<usize>>,
    pub ndof: usize,
    /// Boundary edges `(node a, node b, triangle)` of the mesh, counter-clockwise in their triangle.
    pub boundary_edges: Vec<(usize, usize, usize)>,
}

impl TestSpace {
    /// Builds the space on `partition` refined once, constraining nodes where `b·n > 0`.
    pub fn new(partition: &Partition, b: &VectorFn) -> Result<TestSpace> {
        TestSpace::with_depth(partition, b, 1)
    }

    /// As [`TestSpace::new`] with `depth` isotropic refinements instead of one.
    pub fn with_depth(partition: &Partition, b: &VectorFn, depth: u32) -> Result<TestSpace> {
        let mut refined = partition.clone();
        for _ in 0..depth.max(1) {
            refined = refine_once(&refined)?.0;
        }
        let mesh = companion_triangulation(partition, &refined)?;
        Ok(TestSpace::on_mesh(mesh, b))
    }

    pub fn on_mesh(mesh: CompanionMesh, b: &VectorFn) -> TestSpace {
        let nv = mesh.vertices.len();
        let mut nodes = mesh.vertices.clone();
        let mut edge_id: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_count: Vec<usize> = Vec::new();
        let mut tri_nodes = Vec::with_capacity(mesh.triangles.len());
        for tri in &mesh.triangles {
            let mut tn = [tri[0], tri[1], tri[2], 0, 0, 0];
            for k in 0..3 {
                let (a, c) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(c), a.max(c));
                let id = *edge_id.entry(key).or_insert_with(|| {
                    nodes.push(mesh.vertices[a].midpoint(mesh.vertices[c]));
                    edge_count.push(0);
                    nodes.len() - 1
                });
                edge_count[id - nv] += 1;
                tn[3 + k] = id;
            }
            tri_nodes.push(tn);
        }
        let mut constrained = vec![false; nodes.len()];
        let mut boundary_edges = Vec::new();
        for (t, tn) in tri_nodes.iter().enumerate() {
            for k in 0..3 {
                if edge_count[tn[3 + k] - nv] != 1 {
                    continue;
                }
                let (a, c) = (tn[k], tn[(k + 1) % 3]);
                boundary_edges.push((a, c, t));
                let (p, q) = (nodes[a], nodes[c]);
                let d = q - p;
                let n = Point2::new(d.x2, -d.x1);
                let outflow = super::quadrature::gauss_interval(0.0, 1.0, 3)
                    .into_iter()
                    .chain([(0.5, 0.0)])
                    .any(|(s, _)| b(p.lerp(q, s)).dot(n) > 1e-14 * n.norm());
                if outflow {
                    constrained[a] = true;
                    constrained[c] = true;
                    constrained[tn[3 + k]] = true;
                }
            }
        }
        let mut ndof = 0;
        let dof_of_node = constrained
            .iter()
            .map(|&c| {
                if c {
                    None
                } else {
                    ndof += 1;
                    Some(ndof - 1)
                }
            })
            .collect();
        TestSpace { mesh, nodes, tri_nodes, dof_of_node, ndof, boundary_edges }
    }

    pub fn dim(&self) -> usize {
        self.ndof
    }

    /// Global dof indices of the six local nodes of triangle `t`.
    pub fn local_dofs(&self, t: usize) -> [Option<usize>; 6] {
        self.tri_nodes[t].map(|n| self.dof_of_node[n])
    }

    /// Value and gradient of the coefficient vector `r` on triangle `t` at `p`.
    pub fn eval_in(&self, r: &[f64], t: usize, p: Point2) -> (f64, Point2) {
        let (v, g) = p2_basis(&self.mesh.triangle(t), p);
        let mut val = 0.0;
        let mut grad = Point2::new(0.0, 0.0);
        for (k, d) in self.local_dofs(t).into_iter().enumerate() {
            if let Some(d) = d {
                val += r[d] * v[k];
                grad = grad + r[d] * g[k];
            }
        }
        (val, grad)
    }

    /// Nodal interpolant of `f` (constrained nodes dropped).
    pub fn interpolate(&self, f: impl Fn(Point2) -> f64) -> Vec<f64> {
        let mut r = vec![0.0; self.ndof];
        for (n, d) in self.dof_of_node.iter().enumerate() {
            if let Some(d) = d {
                r[*d] = f(self.nodes[n]);
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    #[test]
    fn p2_basis_is_nodal_and_sums_to_one() {
        let tri = [Point2::new(0.1, 0.0), Point2::new(1.0, 0.2), Point2::new(0.3, 0.9)];
        let nodes = [tri[0], tri[1], tri[2], tri[0].midpoint(tri[1]), tri[1].midpoint(tri[2]), tri[2].midpoint(tri[0])];
        for (i, &p) in nodes.iter().enumerate() {
            let (v, _) = p2_basis(&tri, p);
            for (j, &x) in v.iter().enumerate() {
                assert!((x - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        let p = Point2::new(0.4, 0.3);
        let (v, g) = p2_basis(&tri, p);
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let gs = g.iter().fold(Point2::new(0.0, 0.0), |a, &b| a + b);
        assert!(gs.norm() < 1e-12);
        // gradient by finite differences
        let h = 1e-6;
        let (vx, _) = p2_basis(&tri, Point2::new(p.x1 + h, p.x2));
        let (vm, _) = p2_basis(&tri, Point2::new(p.x1 - h, p.x2));
        for k in 0..6 {
            assert!(((vx[k] - vm[k]) / (2.0 * h) - g[k].x1).abs() < 1e-7);
        }
    }

    #[test]
    fn unit_square_dimension() {
        let b: VectorFn = Arc::new(|_| Point2::new(1.0, 1.0));
        let z = TestSpace::new(&Partition::uniform(0), &b).unwrap();
        // 9 vertices + 16 edge midpoints; the right and top sides hold 9 nodes
        assert_eq!(z.nodes.len(), 25);
        assert_eq!(z.ndof, 25 - 9);
    }

    #[test]
    fn outflow_nodes_vanish() {
        let b: VectorFn = Arc::new(|p: Point2| Point2::new(p.x2, 1.0));
        let z = TestSpace::new(&Partition::uniform(2), &b).unwrap();
        let r: Vec<f64> = (0..z.ndof).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        for &(a, c, t) in &z.boundary_edges {
            let (p, q) = (z.nodes[a], z.nodes[c]);
            let d = q - p;
            let mid = p.midpoint(q);
            if b(mid).dot(Point2::new(d.x2, -d.x1)) > 0.0 {
                for s in [0.0, 0.3, 0.5, 0.9, 1.0] {
                    assert!(z.eval_in(&r, t, p.lerp(q, s)).0.abs() < 1e-10);
                }
            }
        }
    }
}
