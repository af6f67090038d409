//! Global condensed system: assembly over trace unknowns, Dirichlet
//! elimination, SPD solve, and local back-substitution.
//!
//! Element blocks from the local solver are scattered through the trace
//! space's dof map. Boundary dofs are fixed to the interpolated Dirichlet
//! datum (continuous interpolant for EDG, edgewise L² projection for HDG)
//! and eliminated symmetrically by moving their columns to the right-hand
//! side, which keeps the remaining interior system symmetric positive
//! definite. After the trace solve, each cell recovers its potential and
//! flux from the stored local factorizations.

use crate::basis::{CellBasis, EdgeBasis};
use crate::local_solver::{
    assemble_local_with_rule, LocalSolverError, LocalSystem, QuadratureSettings,
};
use crate::mesh::Mesh;
use crate::problem::ProblemDefinition;
use crate::projections::{boundary_interpolant, project_edge};
use crate::quadrature::{cell_quadrature, edge_rule, QuadratureError};
use crate::sparse::{SolveError, SymmetricCsr};
use crate::trace_space::{Method, TraceSpace};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SystemError {
    #[error(transparent)]
    Local(#[from] LocalSolverError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("linear solve failed (this signals a loss of positive definiteness in assembly): {0}")]
    Solve(#[from] SolveError),
}

/// Linear solver choice for the condensed system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Sparse Cholesky factorization.
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Cg,
}

impl std::str::FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(SolverKind::Direct),
            "cg" => Ok(SolverKind::Cg),
            other => Err(format!("unknown solver `{other}`, expected direct or cg")),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Direct => "direct",
            SolverKind::Cg => "cg",
        })
    }
}

/// The assembled trace system together with everything needed to recover
/// the interior fields.
pub struct CondensedSystem {
    /// Stiffness over interior trace dofs.
    pub matrix: SymmetricCsr,
    /// Load over interior trace dofs.
    pub rhs: Vec<f64>,
    /// Fixed values for every global dof (zero on interior dofs).
    pub boundary_values: Vec<f64>,
    locals: Vec<LocalSystem>,
    f_moments: Vec<Vec<f64>>,
}

/// Recovered discrete solution: per-cell coefficient vectors in the
/// orthonormal cell bases plus the full trace coefficient vector.
pub struct DiscreteSolution {
    pub k: usize,
    pub method: Method,
    /// Potential coefficients per cell (degree k+1 basis).
    pub u: Vec<Vec<f64>>,
    /// Flux coefficients per cell, x-component block then y-component block
    /// (degree k basis).
    pub sigma: Vec<Vec<f64>>,
    /// Trace coefficients for every global dof, boundary included.
    pub trace: Vec<f64>,
    pub v_bases: Vec<CellBasis>,
    pub w_bases: Vec<CellBasis>,
    pub edge_basis: EdgeBasis,
}

impl DiscreteSolution {
    pub fn eval_u(&self, cell: usize, p: [f64; 2]) -> f64 {
        self.v_bases[cell].eval_with_coefficients(&self.u[cell], p)
    }

    pub fn eval_sigma(&self, cell: usize, p: [f64; 2]) -> [f64; 2] {
        let basis = &self.w_bases[cell];
        let mut vals = vec![0.0; basis.dim];
        basis.eval_all(p, &mut vals);
        let coeffs = &self.sigma[cell];
        let sx = coeffs[..basis.dim].iter().zip(&vals).map(|(c, v)| c * v).sum();
        let sy = coeffs[basis.dim..].iter().zip(&vals).map(|(c, v)| c * v).sum();
        [sx, sy]
    }

    /// Nodal trace coefficients on one edge.
    pub fn trace_on_edge(&self, ts: &TraceSpace, edge: usize) -> Vec<f64> {
        ts.edge_dofs(edge).iter().map(|&d| self.trace[d]).collect()
    }

    pub fn eval_trace(&self, ts: &TraceSpace, edge: usize, t: f64) -> f64 {
        let coeffs = self.trace_on_edge(ts, edge);
        let mut vals = vec![0.0; self.edge_basis.node_count()];
        self.edge_basis.eval_all(t, &mut vals);
        coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }
}

/// Interpolate the Dirichlet datum into the boundary trace dofs.
fn dirichlet_values(
    mesh: &Mesh,
    ts: &TraceSpace,
    problem: &ProblemDefinition,
    quad: &QuadratureSettings,
) -> Result<Vec<f64>, SystemError> {
    let erule = edge_rule(quad.edge_points.max(ts.k + 2))?;
    let mut values = vec![0.0; ts.n_global];
    match ts.method {
        Method::Edg => {
            let field = boundary_interpolant(mesh, ts.k, &erule, &problem.g);
            for edge in mesh.edges.iter().filter(|e| e.is_boundary()) {
                for (node, &dof) in ts.edge_dofs(edge.id).iter().enumerate() {
                    values[dof] = field.coeffs[edge.id][node];
                }
            }
        }
        Method::Hdg => {
            let basis = EdgeBasis::new(ts.k + 1).expect("k+1 >= 1");
            for edge in mesh.edges.iter().filter(|e| e.is_boundary()) {
                let coeffs = project_edge(mesh, edge.id, &basis, &erule, &problem.g);
                for (node, &dof) in ts.edge_dofs(edge.id).iter().enumerate() {
                    values[dof] = coeffs[node];
                }
            }
        }
    }
    Ok(values)
}

/// Assemble the condensed system for a problem on a mesh.
pub fn assemble(
    mesh: &Mesh,
    ts: &TraceSpace,
    problem: &ProblemDefinition,
    quad: &QuadratureSettings,
) -> Result<CondensedSystem, SystemError> {
    let boundary_values = dirichlet_values(mesh, ts, problem, quad)?;
    let mut rhs = vec![0.0; ts.n_interior];
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut locals = Vec::with_capacity(mesh.cells.len());
    let mut f_moments = Vec::with_capacity(mesh.cells.len());

    for cell in 0..mesh.cells.len() {
        let rule = cell_quadrature(&mesh.cells[cell], quad.cell_exactness)?;
        let local = assemble_local_with_rule(mesh, cell, &problem.c, ts.k, quad, &rule)?;
        let moments = local.f_moments(&rule, &problem.f);
        let block = local.condense(&moments);

        let dofs = ts.cell_trace_dofs(mesh, cell);
        for (p, &gp) in dofs.iter().enumerate() {
            let Some(ip) = ts.interior_index(gp) else {
                continue;
            };
            rhs[ip] += block.r[p];
            for (q, &gq) in dofs.iter().enumerate() {
                match ts.interior_index(gq) {
                    Some(iq) => triplets.push((ip, iq, block.s[(p, q)])),
                    // eliminated column moves to the right-hand side
                    None => rhs[ip] -= block.s[(p, q)] * boundary_values[gq],
                }
            }
        }

        locals.push(local);
        f_moments.push(moments);
    }

    Ok(CondensedSystem {
        matrix: SymmetricCsr::from_triplets(ts.n_interior, triplets),
        rhs,
        boundary_values,
        locals,
        f_moments,
    })
}

impl CondensedSystem {
    /// Solve for the interior trace coefficients.
    pub fn solve(&self, solver: SolverKind, tol: f64) -> Result<Vec<f64>, SystemError> {
        let x = match solver {
            SolverKind::Direct => self.matrix.solve_direct(&self.rhs)?,
            SolverKind::Cg => {
                let max_iter = 200 * self.matrix.n().max(50);
                self.matrix.solve_cg(&self.rhs, tol, max_iter)?
            }
        };
        Ok(x)
    }

    /// Combine interior solution and boundary values into the full trace
    /// coefficient vector.
    pub fn full_trace(&self, ts: &TraceSpace, interior: &[f64]) -> Vec<f64> {
        (0..ts.n_global)
            .map(|d| match ts.interior_index(d) {
                Some(i) => interior[i],
                None => self.boundary_values[d],
            })
            .collect()
    }

    /// Back-substitute: recover per-cell potential and flux from the solved
    /// trace via the stored local factorizations.
    pub fn recover(&self, mesh: &Mesh, ts: &TraceSpace, interior: &[f64]) -> DiscreteSolution {
        let trace = self.full_trace(ts, interior);
        let mut u = Vec::with_capacity(self.locals.len());
        let mut sigma = Vec::with_capacity(self.locals.len());
        let mut v_bases = Vec::with_capacity(self.locals.len());
        let mut w_bases = Vec::with_capacity(self.locals.len());
        for (cell, local) in self.locals.iter().enumerate() {
            let dofs = ts.cell_trace_dofs(mesh, cell);
            let lam: Vec<f64> = dofs.iter().map(|&d| trace[d]).collect();
            let (u_lam, sigma_lam) = local.solve_lambda(&lam);
            let (u_f, sigma_f) = local.solve_load(&self.f_moments[cell]);
            u.push(u_lam.iter().zip(&u_f).map(|(a, b)| a + b).collect());
            sigma.push(sigma_lam.iter().zip(&sigma_f).map(|(a, b)| a + b).collect());
            v_bases.push(local.v_basis.clone());
            w_bases.push(local.w_basis.clone());
        }
        DiscreteSolution {
            k: ts.k,
            method: ts.method,
            u,
            sigma,
            trace,
            v_bases,
            w_bases,
            edge_basis: self.locals[0].edge_basis.clone(),
        }
    }

    /// Residual of the three scheme equations for a recovered solution:
    /// the largest absolute defect over all flux, potential, and interior
    /// trace test functions.
    pub fn scheme_residual(
        &self,
        mesh: &Mesh,
        ts: &TraceSpace,
        sol: &DiscreteSolution,
    ) -> f64 {
        use nalgebra::DVector;
        let mut max_defect: f64 = 0.0;
        let mut trace_defect = vec![0.0; ts.n_interior];
        for (cell, local) in self.locals.iter().enumerate() {
            let dofs = ts.cell_trace_dofs(mesh, cell);
            let lam = DVector::from_iterator(dofs.len(), dofs.iter().map(|&d| sol.trace[d]));
            let su = DVector::from_column_slice(&sol.u[cell]);
            let ss = DVector::from_column_slice(&sol.sigma[cell]);

            let r1 = &local.a_flux * &ss + &local.b_div * &su - &local.trace_flux * &lam;
            max_defect = max_defect.max(r1.amax());

            let mf = DVector::from_column_slice(&self.f_moments[cell]);
            let r2 = -local.b_div.transpose() * &ss + &local.c_pen * &su
                - &local.trace_pen * &lam
                - mf;
            max_defect = max_defect.max(r2.amax());

            let r3 = local.trace_flux.transpose() * &ss - local.trace_pen.transpose() * &su
                + &local.trace_mass * &lam;
            for (p, &gp) in dofs.iter().enumerate() {
                if let Some(ip) = ts.interior_index(gp) {
                    trace_defect[ip] += r3[p];
                }
            }
        }
        for d in trace_defect {
            max_defect = max_defect.max(d.abs());
        }
        max_defect
    }

    /// Relative algebraic residual of a solved interior coefficient vector.
    pub fn relative_residual(&self, interior: &[f64]) -> f64 {
        self.matrix.relative_residual(interior, &self.rhs)
    }

    /// Dump the interior matrix in coordinate text format (lower triangle).
    pub fn dump_matrix(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        self.matrix.write_coordinate_format(out)
    }
}

/// Assemble, solve and recover in one call.
pub fn solve_problem(
    mesh: &Mesh,
    ts: &TraceSpace,
    problem: &ProblemDefinition,
    quad: &QuadratureSettings,
    solver: SolverKind,
    tol: f64,
) -> Result<DiscreteSolution, SystemError> {
    let system = assemble(mesh, ts, problem, quad)?;
    let interior = system.solve(solver, tol)?;
    Ok(system.recover(mesh, ts, &interior))
}
