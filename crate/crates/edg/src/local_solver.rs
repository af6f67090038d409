//! Element-local problems and static condensation.
//!
//! On a cell `T` with flux space `[P_k]²`, potential space `P_{k+1}` and
//! edgewise trace space `P_{k+1}` the two local problems read, in matrix
//! form with `z = [σ; u]`:
//!
//! ```text
//!   [  A   B ] [σ]   [ C λ ]        [ 0  ]
//!   [ -Bᵀ  E ] [u] = [ G λ ]   and  [ Mf ]
//! ```
//!
//! with `A = (c·, ·)_T`, `B = (·, div ·)_T`, `E = ⟨α·, ·⟩_{∂T}`, the trace
//! couplings `C = ⟨λ, τ·n⟩_{∂T}` and `G = ⟨αλ, v⟩_{∂T}`, and `α = h_T⁻¹`.
//! Eliminating `z` yields the cell's contribution `S λ = r` to the global
//! trace system: `S = H + [Cᵀ, -Gᵀ] K⁻¹ [C; G]` with `H = ⟨αλ, μ⟩_{∂T}`.
//! The same block equals the bilinear-form expression
//! `S_ij = (c σ_j, σ_i)_T + ⟨α(u_j − λ_j), u_i − λ_i⟩_{∂T}` over lifted
//! trace basis functions, which [`LocalSystem::condense_via_lifting`]
//! evaluates by quadrature as an independent cross-check.

use crate::basis::{BasisError, CellBasis, EdgeBasis};
use crate::mesh::Mesh;
use crate::quadrature::{cell_quadrature, edge_rule, CellRule, QuadratureError};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LocalSolverError {
    #[error("coefficient tensor not symmetric positive definite on cell {cell} at ({x}, {y})")]
    NonSpdCoefficient { cell: usize, x: f64, y: f64 },
    #[error("local saddle matrix of cell {cell} is numerically singular")]
    SingularLocalMatrix { cell: usize },
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Quadrature orders used when assembling the scheme.
///
/// Cell inner products involve degree ≤ 2(k+1) polynomials times the
/// coefficient tensor; the defaults oversample so that quadrature error
/// stays below the discretization error, and [`QuadratureSettings::doubled`]
/// exists to verify that claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSettings {
    /// Polynomial exactness of cell rules.
    pub cell_exactness: usize,
    /// Gauss point count per edge.
    pub edge_points: usize,
}

impl QuadratureSettings {
    pub fn for_degree(k: usize) -> Self {
        QuadratureSettings {
            cell_exactness: 2 * (k + 2) + 4,
            edge_points: k + 4,
        }
    }

    pub fn doubled(self) -> Self {
        QuadratureSettings {
            cell_exactness: 2 * self.cell_exactness,
            edge_points: 2 * self.edge_points,
        }
    }
}

/// Per-cell matrices of the local problems, their factorization, and the
/// bases they are expressed in.
pub struct LocalSystem {
    pub cell_id: usize,
    pub k: usize,
    /// Penalty `α = h_T⁻¹`, the same on every face of the cell.
    pub alpha: f64,
    /// Flux space dimension `2·dim P_k`.
    pub n_flux: usize,
    /// Potential space dimension `dim P_{k+1}`.
    pub n_pot: usize,
    /// Local trace dimension: `(k+2)` nodes per side.
    pub n_trace: usize,
    /// `(c w_j, w_i)_T`; symmetric positive definite.
    pub a_flux: DMatrix<f64>,
    /// `(v_m, div w_i)_T`.
    pub b_div: DMatrix<f64>,
    /// `⟨α v_m, v_l⟩_{∂T}`; symmetric positive semidefinite.
    pub c_pen: DMatrix<f64>,
    /// `⟨χ_p, w_i·n⟩_{∂T}` coupling trace to flux tests.
    pub trace_flux: DMatrix<f64>,
    /// `⟨α χ_p, v_m⟩_{∂T}` coupling trace to potential tests.
    pub trace_pen: DMatrix<f64>,
    /// `⟨α χ_p, χ_q⟩_{∂T}`, block diagonal per side.
    pub trace_mass: DMatrix<f64>,
    pub v_basis: CellBasis,
    /// Scalar basis shared by both flux components.
    pub w_basis: CellBasis,
    pub edge_basis: EdgeBasis,
    saddle_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

/// One cell's contribution to the condensed trace system.
pub struct CondensedElementBlock {
    pub cell_id: usize,
    /// Symmetric positive-semidefinite element matrix over local trace dofs.
    pub s: DMatrix<f64>,
    /// Element load vector.
    pub r: DVector<f64>,
}

/// Build the local system of one cell.
///
/// Fails if the coefficient tensor is not SPD at some quadrature point or if
/// the saddle matrix cannot be factorized with all pivots above
/// `1e-12·‖K‖_max`.
pub fn assemble_local(
    mesh: &Mesh,
    cell_id: usize,
    coeff: &dyn Fn(f64, f64) -> [[f64; 2]; 2],
    k: usize,
    quad: &QuadratureSettings,
) -> Result<LocalSystem, LocalSolverError> {
    let cell = &mesh.cells[cell_id];
    let rule = cell_quadrature(cell, quad.cell_exactness)?;
    assemble_local_with_rule(mesh, cell_id, coeff, k, quad, &rule)
}

/// As [`assemble_local`] with a caller-provided cell rule (reused for the
/// load moments during global assembly).
pub fn assemble_local_with_rule(
    mesh: &Mesh,
    cell_id: usize,
    coeff: &dyn Fn(f64, f64) -> [[f64; 2]; 2],
    k: usize,
    quad: &QuadratureSettings,
    rule: &CellRule,
) -> Result<LocalSystem, LocalSolverError> {
    let cell = &mesh.cells[cell_id];
    let v_basis = CellBasis::build(cell, k + 1, rule)?;
    let w_basis = CellBasis::build(cell, k, rule)?;
    let edge_basis = EdgeBasis::new(k + 1)?;
    let erule = edge_rule(quad.edge_points)?;

    let wdim = w_basis.dim;
    let n_flux = 2 * wdim;
    let n_pot = v_basis.dim;
    let nodes_per_side = edge_basis.node_count();
    let n_sides = cell.edge_ids.len();
    let n_trace = n_sides * nodes_per_side;
    let alpha = 1.0 / cell.diameter;

    let mut a_flux = DMatrix::zeros(n_flux, n_flux);
    let mut b_div = DMatrix::zeros(n_flux, n_pot);
    let mut w_vals = vec![0.0; wdim];
    let mut w_grads = vec![[0.0; 2]; wdim];
    let mut v_vals = vec![0.0; n_pot];

    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let c = coeff(p[0], p[1]);
        // SPD test for a symmetric 2×2: positive diagonal and determinant
        if !(c[0][0] > 0.0 && c[0][0] * c[1][1] - c[0][1] * c[1][0] > 0.0) {
            return Err(LocalSolverError::NonSpdCoefficient {
                cell: cell_id,
                x: p[0],
                y: p[1],
            });
        }
        w_basis.eval_all(*p, &mut w_vals);
        w_basis.grad_all(*p, &mut w_grads);
        v_basis.eval_all(*p, &mut v_vals);
        for comp_i in 0..2 {
            for a in 0..wdim {
                let i = comp_i * wdim + a;
                for comp_j in 0..2 {
                    let c_ij = c[comp_i][comp_j];
                    if c_ij == 0.0 {
                        continue;
                    }
                    for b in 0..wdim {
                        a_flux[(i, comp_j * wdim + b)] += w * c_ij * w_vals[b] * w_vals[a];
                    }
                }
                let dw = w_grads[a][comp_i];
                for m in 0..n_pot {
                    b_div[(i, m)] += w * v_vals[m] * dw;
                }
            }
        }
    }

    let mut c_pen = DMatrix::zeros(n_pot, n_pot);
    let mut trace_flux = DMatrix::zeros(n_flux, n_trace);
    let mut trace_pen = DMatrix::zeros(n_pot, n_trace);
    let mut trace_mass = DMatrix::zeros(n_trace, n_trace);
    let mut l_vals = vec![0.0; nodes_per_side];

    // EXPERIMENT: per-face penalty selection via env var
    let face_alpha = std::env::var("EDG_ALPHA_MODE").as_deref() == Ok("face");
    for (side, &eid) in cell.edge_ids.iter().enumerate() {
        let edge = &mesh.edges[eid];
        let normal = mesh.outward_normal(cell_id, eid);
        let len = edge.length;
        let alpha = if face_alpha { 1.0 / len } else { alpha };
        for (t, w) in erule.points.iter().zip(&erule.weights) {
            let x = mesh.edge_point(eid, *t);
            let ds = w * len;
            edge_basis.eval_all(*t, &mut l_vals);
            v_basis.eval_all(x, &mut v_vals);
            w_basis.eval_all(x, &mut w_vals);
            for m in 0..n_pot {
                for l in 0..n_pot {
                    c_pen[(m, l)] += alpha * ds * v_vals[m] * v_vals[l];
                }
            }
            for i in 0..nodes_per_side {
                let p = side * nodes_per_side + i;
                let li = l_vals[i];
                for comp in 0..2 {
                    for a in 0..wdim {
                        trace_flux[(comp * wdim + a, p)] += ds * li * w_vals[a] * normal[comp];
                    }
                }
                for m in 0..n_pot {
                    trace_pen[(m, p)] += alpha * ds * li * v_vals[m];
                }
                for j in 0..nodes_per_side {
                    trace_mass[(p, side * nodes_per_side + j)] += alpha * ds * li * l_vals[j];
                }
            }
        }
    }

    // saddle matrix [[A, B], [-Bᵀ, E]]
    let n = n_flux + n_pot;
    let mut saddle = DMatrix::zeros(n, n);
    saddle.view_mut((0, 0), (n_flux, n_flux)).copy_from(&a_flux);
    saddle.view_mut((0, n_flux), (n_flux, n_pot)).copy_from(&b_div);
    saddle
        .view_mut((n_flux, 0), (n_pot, n_flux))
        .copy_from(&(-b_div.transpose()));
    saddle.view_mut((n_flux, n_flux), (n_pot, n_pot)).copy_from(&c_pen);

    let norm: f64 = saddle.amax();
    let saddle_lu = saddle.lu();
    let min_pivot = (0..n)
        .map(|i| saddle_lu.u()[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    if !(min_pivot > 1e-12 * norm) {
        return Err(LocalSolverError::SingularLocalMatrix { cell: cell_id });
    }

    Ok(LocalSystem {
        cell_id,
        k,
        alpha,
        n_flux,
        n_pot,
        n_trace,
        a_flux,
        b_div,
        c_pen,
        trace_flux,
        trace_pen,
        trace_mass,
        v_basis,
        w_basis,
        edge_basis,
        saddle_lu,
    })
}

impl LocalSystem {
    pub fn nodes_per_side(&self) -> usize {
        self.edge_basis.node_count()
    }

    fn split(&self, z: DVector<f64>) -> (Vec<f64>, Vec<f64>) {
        let sigma = z.as_slice()[..self.n_flux].to_vec();
        let u = z.as_slice()[self.n_flux..].to_vec();
        (u, sigma)
    }

    /// Lift boundary data: solve the λ-problem for the given local trace
    /// coefficients (side-major nodal order). Returns `(u, σ)` coefficients.
    pub fn solve_lambda(&self, lambda: &[f64]) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(lambda.len(), self.n_trace);
        let lam = DVector::from_column_slice(lambda);
        let mut rhs = DVector::zeros(self.n_flux + self.n_pot);
        rhs.rows_mut(0, self.n_flux)
            .copy_from(&(&self.trace_flux * &lam));
        rhs.rows_mut(self.n_flux, self.n_pot)
            .copy_from(&(&self.trace_pen * &lam));
        let z = self.saddle_lu.solve(&rhs).expect("factorized saddle matrix");
        self.split(z)
    }

    /// Lift the load: solve the f-problem for the given moments
    /// `Mf_m = (f, v_m)_T`. Returns `(u, σ)` coefficients.
    pub fn solve_load(&self, f_moments: &[f64]) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(f_moments.len(), self.n_pot);
        let mut rhs = DVector::zeros(self.n_flux + self.n_pot);
        rhs.rows_mut(self.n_flux, self.n_pot)
            .copy_from(&DVector::from_column_slice(f_moments));
        let z = self.saddle_lu.solve(&rhs).expect("factorized saddle matrix");
        self.split(z)
    }

    /// Load moments `(f, v_m)_T` of the potential test space.
    pub fn f_moments(&self, rule: &CellRule, f: &dyn Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut moments = vec![0.0; self.n_pot];
        let mut v_vals = vec![0.0; self.n_pot];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let fv = f(p[0], p[1]);
            self.v_basis.eval_all(*p, &mut v_vals);
            for (mo, v) in moments.iter_mut().zip(&v_vals) {
                *mo += w * fv * v;
            }
        }
        moments
    }

    /// Element block and load by Schur complement of the saddle matrix.
    pub fn condense(&self, f_moments: &[f64]) -> CondensedElementBlock {
        let n = self.n_flux + self.n_pot;
        // multi-RHS solve for all trace basis liftings at once
        let mut rhs = DMatrix::zeros(n, self.n_trace);
        rhs.view_mut((0, 0), (self.n_flux, self.n_trace))
            .copy_from(&self.trace_flux);
        rhs.view_mut((self.n_flux, 0), (self.n_pot, self.n_trace))
            .copy_from(&self.trace_pen);
        let lift = self.saddle_lu.solve(&rhs).expect("factorized saddle matrix");
        let lift_sigma = lift.view((0, 0), (self.n_flux, self.n_trace));
        let lift_u = lift.view((self.n_flux, 0), (self.n_pot, self.n_trace));

        let s = &self.trace_mass + self.trace_flux.transpose() * lift_sigma
            - self.trace_pen.transpose() * lift_u;

        let (uf, sf) = self.solve_load(f_moments);
        let uf = DVector::from_column_slice(&uf);
        let sf = DVector::from_column_slice(&sf);
        let r = self.trace_pen.transpose() * uf - self.trace_flux.transpose() * sf;

        CondensedElementBlock {
            cell_id: self.cell_id,
            s,
            r,
        }
    }

    /// Element block by the bilinear-form definition: lift every local trace
    /// basis function and integrate `(c σ_j, σ_i)_T + ⟨α(u_j−λ_j), u_i−λ_i⟩`
    /// with fresh quadrature. Slower than [`LocalSystem::condense`]; kept as
    /// the independent cross-check of the Schur route.
    pub fn condense_via_lifting(
        &self,
        mesh: &Mesh,
        coeff: &dyn Fn(f64, f64) -> [[f64; 2]; 2],
        f: &dyn Fn(f64, f64) -> f64,
        quad: &QuadratureSettings,
    ) -> CondensedElementBlock {
        let cell = &mesh.cells[self.cell_id];
        let rule = cell_quadrature(cell, quad.cell_exactness).expect("cell rule");
        let erule = edge_rule(quad.edge_points).expect("edge rule");
        let nodes_per_side = self.nodes_per_side();

        let mut lift_u = Vec::with_capacity(self.n_trace);
        let mut lift_sigma = Vec::with_capacity(self.n_trace);
        for i in 0..self.n_trace {
            let mut unit = vec![0.0; self.n_trace];
            unit[i] = 1.0;
            let (u, sigma) = self.solve_lambda(&unit);
            lift_u.push(u);
            lift_sigma.push(sigma);
        }

        let eval_sigma = |coeffs: &[f64], p: [f64; 2]| -> [f64; 2] {
            let wdim = self.w_basis.dim;
            let mut vals = vec![0.0; wdim];
            self.w_basis.eval_all(p, &mut vals);
            let sx = coeffs[..wdim].iter().zip(&vals).map(|(c, v)| c * v).sum();
            let sy = coeffs[wdim..].iter().zip(&vals).map(|(c, v)| c * v).sum();
            [sx, sy]
        };

        let mut s = DMatrix::zeros(self.n_trace, self.n_trace);
        let mut r = DVector::zeros(self.n_trace);

        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let c = coeff(p[0], p[1]);
            let fv = f(p[0], p[1]);
            let sigmas: Vec<[f64; 2]> = (0..self.n_trace)
                .map(|i| eval_sigma(&lift_sigma[i], *p))
                .collect();
            for i in 0..self.n_trace {
                let ui = self.v_basis.eval_with_coefficients(&lift_u[i], *p);
                r[i] += w * fv * ui;
                for j in 0..self.n_trace {
                    let sj = sigmas[j];
                    let csj = [
                        c[0][0] * sj[0] + c[0][1] * sj[1],
                        c[1][0] * sj[0] + c[1][1] * sj[1],
                    ];
                    s[(i, j)] += w * (csj[0] * sigmas[i][0] + csj[1] * sigmas[i][1]);
                }
            }
        }

        let mut l_vals = vec![0.0; nodes_per_side];
        for (side, &eid) in cell.edge_ids.iter().enumerate() {
            let len = mesh.edges[eid].length;
            for (t, w) in erule.points.iter().zip(&erule.weights) {
                let x = mesh.edge_point(eid, *t);
                let ds = w * len;
                self.edge_basis.eval_all(*t, &mut l_vals);
                // jump (u_i − λ_i) on this side for every local trace index
                let jump: Vec<f64> = (0..self.n_trace)
                    .map(|i| {
                        let u = self.v_basis.eval_with_coefficients(&lift_u[i], x);
                        let lam = if i / nodes_per_side == side {
                            l_vals[i % nodes_per_side]
                        } else {
                            0.0
                        };
                        u - lam
                    })
                    .collect();
                for i in 0..self.n_trace {
                    for j in 0..self.n_trace {
                        s[(i, j)] += self.alpha * ds * jump[i] * jump[j];
                    }
                }
            }
        }

        CondensedElementBlock {
            cell_id: self.cell_id,
            s,
            r,
        }
    }
}
