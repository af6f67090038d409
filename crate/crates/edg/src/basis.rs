//! Local polynomial bases.
//!
//! Cell spaces use scaled monomials `((x,y) − M_T)/h_T` orthonormalized
//! against the cell's quadrature mass matrix, the standard polytopal-DG
//! construction: polygonal cells have no reference element, and the
//! orthonormalization keeps local solves well conditioned for every convex
//! cell shape. Edge spaces use nodal Lagrange bases at Gauss–Lobatto points
//! so that both endpoints carry degrees of freedom, which the continuous
//! (EDG) trace space requires.

use crate::mesh::Cell;
use crate::quadrature::{gauss_lobatto_nodes, CellRule, QuadratureError};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("Gram matrix on cell {cell} is numerically singular (degree {degree})")]
    IllConditioned { cell: usize, degree: usize },
    #[error("edge basis degree must be at least 1, got {0}")]
    DegreeTooLow(usize),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Number of bivariate monomials of total degree ≤ `degree`.
pub fn polynomial_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Orthonormal basis of `P_degree` on one physical cell.
#[derive(Debug, Clone)]
pub struct CellBasis {
    pub cell_id: usize,
    pub degree: usize,
    pub dim: usize,
    /// Monomial exponents in graded lexicographic order.
    exponents: Vec<(u32, u32)>,
    /// Row `a` holds the scaled-monomial coefficients of basis function `a`.
    coeff: DMatrix<f64>,
    center: [f64; 2],
    scale: f64,
}

impl CellBasis {
    /// Orthonormalize scaled monomials against the mass matrix evaluated
    /// with `rule` (which must be exact for degree `2·degree` on the cell).
    pub fn build(cell: &Cell, degree: usize, rule: &CellRule) -> Result<CellBasis, BasisError> {
        let dim = polynomial_dim(degree);
        let exponents = monomial_exponents(degree);
        let center = cell.star_point;
        let scale = cell.diameter;

        let mut gram = DMatrix::zeros(dim, dim);
        let mut mono = vec![0.0; dim];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            monomial_values(&exponents, center, scale, *p, &mut mono);
            for a in 0..dim {
                for b in a..dim {
                    gram[(a, b)] += w * mono[a] * mono[b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                gram[(a, b)] = gram[(b, a)];
            }
        }

        let chol = gram.cholesky().ok_or(BasisError::IllConditioned {
            cell: cell.id,
            degree,
        })?;
        // φ = L⁻¹·monomials  ⇒  ∫ φ φᵀ = L⁻¹ G L⁻ᵀ = I
        let coeff = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(dim, dim))
            .ok_or(BasisError::IllConditioned {
                cell: cell.id,
                degree,
            })?;

        Ok(CellBasis {
            cell_id: cell.id,
            degree,
            dim,
            exponents,
            coeff,
            center,
            scale,
        })
    }

    pub fn eval(&self, i: usize, p: [f64; 2]) -> f64 {
        let mut mono = vec![0.0; self.dim];
        monomial_values(&self.exponents, self.center, self.scale, p, &mut mono);
        (0..self.dim).map(|m| self.coeff[(i, m)] * mono[m]).sum()
    }

    pub fn grad(&self, i: usize, p: [f64; 2]) -> [f64; 2] {
        let mut gx = vec![0.0; self.dim];
        let mut gy = vec![0.0; self.dim];
        monomial_gradients(&self.exponents, self.center, self.scale, p, &mut gx, &mut gy);
        let dx = (0..self.dim).map(|m| self.coeff[(i, m)] * gx[m]).sum();
        let dy = (0..self.dim).map(|m| self.coeff[(i, m)] * gy[m]).sum();
        [dx, dy]
    }

    /// Values of all basis functions at `p`, written into `out`.
    pub fn eval_all(&self, p: [f64; 2], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let mut mono = vec![0.0; self.dim];
        monomial_values(&self.exponents, self.center, self.scale, p, &mut mono);
        for (a, o) in out.iter_mut().enumerate() {
            *o = (0..self.dim).map(|m| self.coeff[(a, m)] * mono[m]).sum();
        }
    }

    /// Gradients of all basis functions at `p`.
    pub fn grad_all(&self, p: [f64; 2], out: &mut [[f64; 2]]) {
        debug_assert_eq!(out.len(), self.dim);
        let mut gx = vec![0.0; self.dim];
        let mut gy = vec![0.0; self.dim];
        monomial_gradients(&self.exponents, self.center, self.scale, p, &mut gx, &mut gy);
        for (a, o) in out.iter_mut().enumerate() {
            o[0] = (0..self.dim).map(|m| self.coeff[(a, m)] * gx[m]).sum();
            o[1] = (0..self.dim).map(|m| self.coeff[(a, m)] * gy[m]).sum();
        }
    }

    /// Evaluate the polynomial with the given basis coefficients at `p`.
    pub fn eval_with_coefficients(&self, coeffs: &[f64], p: [f64; 2]) -> f64 {
        debug_assert_eq!(coeffs.len(), self.dim);
        let mut vals = vec![0.0; self.dim];
        self.eval_all(p, &mut vals);
        coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }
}

fn monomial_exponents(degree: usize) -> Vec<(u32, u32)> {
    let mut exps = Vec::with_capacity(polynomial_dim(degree));
    for total in 0..=degree as u32 {
        for py in 0..=total {
            exps.push((total - py, py));
        }
    }
    exps
}

fn monomial_values(exps: &[(u32, u32)], center: [f64; 2], scale: f64, p: [f64; 2], out: &mut [f64]) {
    let x = (p[0] - center[0]) / scale;
    let y = (p[1] - center[1]) / scale;
    for (m, &(px, py)) in exps.iter().enumerate() {
        out[m] = x.powi(px as i32) * y.powi(py as i32);
    }
}

fn monomial_gradients(
    exps: &[(u32, u32)],
    center: [f64; 2],
    scale: f64,
    p: [f64; 2],
    gx: &mut [f64],
    gy: &mut [f64],
) {
    let x = (p[0] - center[0]) / scale;
    let y = (p[1] - center[1]) / scale;
    for (m, &(px, py)) in exps.iter().enumerate() {
        gx[m] = if px == 0 {
            0.0
        } else {
            px as f64 * x.powi(px as i32 - 1) * y.powi(py as i32) / scale
        };
        gy[m] = if py == 0 {
            0.0
        } else {
            py as f64 * x.powi(px as i32) * y.powi(py as i32 - 1) / scale
        };
    }
}

/// Nodal Lagrange basis of degree `degree` on the edge parameter interval
/// `[0,1]`, with Gauss–Lobatto nodes so both endpoints are nodes.
#[derive(Debug, Clone)]
pub struct EdgeBasis {
    pub degree: usize,
    pub nodes: Vec<f64>,
    /// Barycentric weights of the node set.
    bary: Vec<f64>,
}

impl EdgeBasis {
    pub fn new(degree: usize) -> Result<EdgeBasis, BasisError> {
        if degree < 1 {
            return Err(BasisError::DegreeTooLow(degree));
        }
        let nodes = gauss_lobatto_nodes(degree + 1)?;
        let n = nodes.len();
        let mut bary = vec![0.0; n];
        for i in 0..n {
            let mut w = 1.0;
            for j in 0..n {
                if j != i {
                    w *= nodes[i] - nodes[j];
                }
            }
            bary[i] = 1.0 / w;
        }
        Ok(EdgeBasis { degree, nodes, bary })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Value of the `i`-th Lagrange function at parameter `t`.
    pub fn eval(&self, i: usize, t: f64) -> f64 {
        // barycentric second form, exact at the nodes
        for (j, &tj) in self.nodes.iter().enumerate() {
            if t == tj {
                return if i == j { 1.0 } else { 0.0 };
            }
        }
        let term = |j: usize| self.bary[j] / (t - self.nodes[j]);
        term(i) / (0..self.nodes.len()).map(term).sum::<f64>()
    }

    pub fn eval_all(&self, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.nodes.len());
        for (j, &tj) in self.nodes.iter().enumerate() {
            if t == tj {
                out.fill(0.0);
                out[j] = 1.0;
                return;
            }
        }
        let mut denom = 0.0;
        for j in 0..self.nodes.len() {
            let term = self.bary[j] / (t - self.nodes[j]);
            out[j] = term;
            denom += term;
        }
        for o in out.iter_mut() {
            *o /= denom;
        }
    }
}
