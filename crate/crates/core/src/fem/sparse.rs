//! Compressed sparse rows with deterministic assembly, plus a Cholesky wrapper.

use faer::prelude::*;
use faer::sparse::linalg::solvers::Cholesky;
use faer::sparse::SparseColMat;
use faer::Side;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries in the order they appear, so equal inputs give equal bits.
    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, f64)>) -> CsrMatrix {
        // stable sort keeps the summation order of duplicates
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last = None;
        for (i, j, v) in t {
            debug_assert!(i < nrows && j < ncols);
            if last == Some((i, j)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix { nrows, ncols, indptr, indices, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    /// `A x`.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    /// `Aᵀ y`.
    pub fn mul_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows);
        let mut out = vec![0.0; self.ncols];
        for (i, &yi) in y.iter().enumerate() {
            for (j, v) in self.row(i) {
                out[j] += v * yi;
            }
        }
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }
}

/// Pins faer to single-threaded kernels so floating point reductions run in a fixed order.
pub fn sequential_kernels() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(faer::Parallelism::None));
}

/// Sparse Cholesky factorization of a symmetric positive definite matrix.
pub struct SpdSolver {
    n: usize,
    chol: Cholesky<usize, f64>,
}

impl std::fmt::Debug for SpdSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpdSolver").field("n", &self.n).finish()
    }
}

impl SpdSolver {
    pub fn new(a: &CsrMatrix) -> Result<SpdSolver> {
        if a.nrows != a.ncols {
            return Err(Error::Factorization(format!("matrix is {}x{}", a.nrows, a.ncols)));
        }
        sequential_kernels();
        let n = a.nrows;
        // lower triangle in column-major order equals the upper triangle of the rows
        let trip: Vec<(usize, usize, f64)> = (0..n)
            .flat_map(|i| a.row(i).filter(move |&(j, _)| j >= i).map(move |(j, v)| (j, i, v)))
            .collect();
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let chol = m
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("non-positive pivot ({e:?})")))?;
        Ok(SpdSolver { n, chol })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves for every column of `rhs` in place.
    pub fn solve_many(&self, rhs: faer::MatMut<'_, f64>) {
        assert_eq!(rhs.nrows(), self.n);
        self.chol.solve_in_place(rhs);
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.chol.solve_in_place(rhs.as_mut());
        (0..self.n).map(|i| rhs.read(i, 0)).collect()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
