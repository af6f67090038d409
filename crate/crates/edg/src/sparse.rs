//! Sparse symmetric matrices and SPD solvers.
//!
//! Assembly accumulates triplets and converts them to CSR with a
//! deterministic sort-and-sum, so a fixed assembly order produces a bitwise
//! reproducible matrix. The direct solver is a sparse Cholesky factorization
//! (fill-reducing ordering, via faer); a Jacobi-preconditioned conjugate
//! gradient solver provides the independent iterative route.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::DMatrix;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("conjugate gradients did not reach tolerance {tol} in {iterations} iterations (relative residual {residual})")]
    CgDidNotConverge {
        iterations: usize,
        tol: f64,
        residual: f64,
    },
}

/// Symmetric sparse matrix in CSR form with both triangles stored.
#[derive(Debug, Clone)]
pub struct SymmetricCsr {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymmetricCsr {
    /// Build from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> SymmetricCsr {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut rows: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut col_idx: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            debug_assert!(r < n && c < n);
            if rows.last() == Some(&r) && col_idx.last() == Some(&c) {
                *values.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SymmetricCsr {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            y[r] = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if c == r {
                    d[r] = v;
                }
            }
        }
        d
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij − A_ji|` over all stored entries.
    pub fn symmetry_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let (tcols, tvals) = self.row(c);
                let vt = match tcols.binary_search(&r) {
                    Ok(pos) => tvals[pos],
                    Err(_) => 0.0,
                };
                defect = defect.max((v - vt).abs());
            }
        }
        defect
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Smallest eigenvalue by dense symmetric eigendecomposition; intended
    /// for definiteness checks on systems of moderate size.
    pub fn smallest_eigenvalue(&self) -> f64 {
        if self.n == 0 {
            return f64::INFINITY;
        }
        let eig = nalgebra::SymmetricEigen::new(self.to_dense());
        eig.eigenvalues.min()
    }

    /// Sparse Cholesky solve; fails with the offending pivot when the matrix
    /// is not positive definite.
    pub fn solve_direct(&self, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        debug_assert_eq!(rhs.len(), self.n);
        if self.n == 0 {
            return Ok(Vec::new());
        }
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                triplets.push(Triplet::new(r, c, v));
            }
        }
        let a = SparseColMat::try_new_from_triplets(self.n, self.n, &triplets)
            .map_err(|e| SolveError::NotPositiveDefinite(format!("matrix build failed: {e:?}")))?;
        let symbolic = SymbolicLlt::try_new(a.symbolic(), faer::Side::Lower)
            .map_err(|e| SolveError::NotPositiveDefinite(format!("symbolic analysis failed: {e:?}")))?;
        let llt = Llt::try_new_with_symbolic(symbolic, a.as_ref(), faer::Side::Lower)
            .map_err(|e| SolveError::NotPositiveDefinite(format!("{e:?}")))?;
        let b = faer::Mat::from_fn(self.n, 1, |i, _| rhs[i]);
        let x = llt.solve(&b);
        Ok((0..self.n).map(|i| x[(i, 0)]).collect())
    }

    /// Jacobi-preconditioned conjugate gradients to relative residual `tol`.
    pub fn solve_cg(
        &self,
        rhs: &[f64],
        tol: f64,
        max_iterations: usize,
    ) -> Result<Vec<f64>, SolveError> {
        debug_assert_eq!(rhs.len(), self.n);
        if self.n == 0 {
            return Ok(Vec::new());
        }
        let b_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if b_norm == 0.0 {
            return Ok(vec![0.0; self.n]);
        }
        let diag = self.diagonal();
        if diag.iter().any(|&d| d <= 0.0) {
            return Err(SolveError::NotPositiveDefinite(
                "non-positive diagonal entry".into(),
            ));
        }

        let mut x = vec![0.0; self.n];
        let mut r = rhs.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let mut ap = vec![0.0; self.n];

        for iter in 0..max_iterations {
            self.matvec(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return Err(SolveError::NotPositiveDefinite(format!(
                    "p·Ap = {pap} at iteration {iter}"
                )));
            }
            let alpha = rz / pap;
            for i in 0..self.n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r_norm <= tol * b_norm {
                return Ok(x);
            }
            for i in 0..self.n {
                z[i] = r[i] / diag[i];
            }
            let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..self.n {
                p[i] = z[i] + beta * p[i];
            }
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        Err(SolveError::CgDidNotConverge {
            iterations: max_iterations,
            tol,
            residual: r_norm / b_norm,
        })
    }

    /// Relative residual `‖Ax − b‖ / ‖b‖`.
    pub fn relative_residual(&self, x: &[f64], b: &[f64]) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let mut ax = vec![0.0; self.n];
        self.matvec(x, &mut ax);
        let num = ax
            .iter()
            .zip(b)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }

    /// Write the lower triangle as coordinate-format text, `i j value` per
    /// line, 0-based row-major.
    pub fn write_coordinate_format(&self, out: &mut impl Write) -> std::io::Result<()> {
        for r in 0..self.n {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if c <= r {
                    writeln!(out, "{r} {c} {v:.17e}")?;
                }
            }
        }
        Ok(())
    }
}
