//! L²-orthogonal projections onto the local spaces and the continuous
//! interpolant used for the Dirichlet datum.
//!
//! Cell projections are a plain quadrature inner product because the cell
//! bases are orthonormal. Edge projections solve the small nodal mass system
//! per edge. The boundary interpolant takes the edgewise projection's values
//! at interior Lagrange nodes and averages projected values over the
//! incident edges at shared vertices, yielding a function that is continuous
//! along the boundary.

use crate::basis::{CellBasis, EdgeBasis};
use crate::mesh::Mesh;
use crate::quadrature::{CellRule, EdgeRule};
use nalgebra::{DMatrix, DVector};

/// Coefficients of the L² projection of `f` onto the cell basis.
///
/// Orthonormality makes the mass matrix the identity, so the coefficients
/// are the quadrature inner products against the basis functions.
pub fn project_cell(basis: &CellBasis, rule: &CellRule, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.dim];
    let mut vals = vec![0.0; basis.dim];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let fv = f(p[0], p[1]);
        basis.eval_all(*p, &mut vals);
        for (c, v) in coeffs.iter_mut().zip(&vals) {
            *c += w * fv * v;
        }
    }
    coeffs
}

/// Componentwise projection of a vector field; the returned coefficients are
/// component-major: first all coefficients of the x-component, then y.
pub fn project_cell_vector(
    basis: &CellBasis,
    rule: &CellRule,
    f: impl Fn(f64, f64) -> [f64; 2],
) -> Vec<f64> {
    let mut coeffs = vec![0.0; 2 * basis.dim];
    let mut vals = vec![0.0; basis.dim];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let fv = f(p[0], p[1]);
        basis.eval_all(*p, &mut vals);
        for (a, v) in vals.iter().enumerate() {
            coeffs[a] += w * fv[0] * v;
            coeffs[basis.dim + a] += w * fv[1] * v;
        }
    }
    coeffs
}

/// Nodal coefficients of the edgewise L² projection of `g` onto the edge
/// space. Arc-length factors cancel, so the mass system lives entirely on
/// the parameter interval.
pub fn project_edge(
    mesh: &Mesh,
    edge: usize,
    basis: &EdgeBasis,
    rule: &EdgeRule,
    g: impl Fn(f64, f64) -> f64,
) -> Vec<f64> {
    let n = basis.node_count();
    let mut mass = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    let mut vals = vec![0.0; n];
    for (t, w) in rule.points.iter().zip(&rule.weights) {
        basis.eval_all(*t, &mut vals);
        let p = mesh.edge_point(edge, *t);
        let gv = g(p[0], p[1]);
        for i in 0..n {
            rhs[i] += w * gv * vals[i];
            for j in 0..n {
                mass[(i, j)] += w * vals[i] * vals[j];
            }
        }
    }
    let sol = mass.lu().solve(&rhs).expect("edge mass matrix is SPD");
    sol.iter().copied().collect()
}

/// A function on (a subset of) the mesh skeleton, stored as nodal
/// coefficients per edge in the edge's own parameterization.
#[derive(Debug, Clone)]
pub struct TraceField {
    pub basis: EdgeBasis,
    /// Per-edge nodal coefficients; empty for edges the field does not cover.
    pub coeffs: Vec<Vec<f64>>,
    /// Whether coefficients at shared vertices agree across edges.
    pub continuous: bool,
}

impl TraceField {
    pub fn eval(&self, edge: usize, t: f64) -> f64 {
        let coeffs = &self.coeffs[edge];
        debug_assert!(!coeffs.is_empty(), "edge {edge} not covered by this trace field");
        let mut vals = vec![0.0; self.basis.node_count()];
        self.basis.eval_all(t, &mut vals);
        coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }

    /// Largest disagreement of nodal values at shared vertices; zero for a
    /// genuinely continuous field.
    pub fn vertex_continuity_defect(&self, mesh: &Mesh) -> f64 {
        let last = self.basis.node_count() - 1;
        let mut per_vertex: Vec<Vec<f64>> = vec![Vec::new(); mesh.vertices.len()];
        for (eid, coeffs) in self.coeffs.iter().enumerate() {
            if coeffs.is_empty() {
                continue;
            }
            let ends = mesh.edges[eid].endpoint_ids;
            per_vertex[ends[0]].push(coeffs[0]);
            per_vertex[ends[1]].push(coeffs[last]);
        }
        per_vertex
            .iter()
            .filter(|vals| vals.len() > 1)
            .map(|vals| {
                let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                max - min
            })
            .fold(0.0, f64::max)
    }
}

/// Continuous interpolant of a boundary function `g` into the trace space
/// restricted to `∂Ω`: edgewise L² projection values at interior nodes,
/// averaged projected values at boundary vertices.
pub fn boundary_interpolant(
    mesh: &Mesh,
    k: usize,
    rule: &EdgeRule,
    g: impl Fn(f64, f64) -> f64,
) -> TraceField {
    let basis = EdgeBasis::new(k + 1).expect("k+1 >= 1");
    let covered: Vec<usize> = mesh
        .edges
        .iter()
        .filter(|e| e.is_boundary())
        .map(|e| e.id)
        .collect();
    interpolate_on_edges(mesh, basis, rule, &covered, g)
}

/// The same node-value/vertex-average construction applied to every skeleton
/// edge; used as the computable stand-in for the exact trace in diagnostics.
pub fn skeleton_interpolant(
    mesh: &Mesh,
    k: usize,
    rule: &EdgeRule,
    u: impl Fn(f64, f64) -> f64,
) -> TraceField {
    let basis = EdgeBasis::new(k + 1).expect("k+1 >= 1");
    let covered: Vec<usize> = (0..mesh.edges.len()).collect();
    interpolate_on_edges(mesh, basis, rule, &covered, u)
}

/// Edgewise L² projection on every skeleton edge with no vertex coupling.
pub fn skeleton_projection(
    mesh: &Mesh,
    k: usize,
    rule: &EdgeRule,
    u: impl Fn(f64, f64) -> f64,
) -> TraceField {
    let basis = EdgeBasis::new(k + 1).expect("k+1 >= 1");
    let mut coeffs = vec![Vec::new(); mesh.edges.len()];
    for eid in 0..mesh.edges.len() {
        coeffs[eid] = project_edge(mesh, eid, &basis, rule, &u);
    }
    TraceField {
        basis,
        coeffs,
        continuous: false,
    }
}

fn interpolate_on_edges(
    mesh: &Mesh,
    basis: EdgeBasis,
    rule: &EdgeRule,
    covered: &[usize],
    g: impl Fn(f64, f64) -> f64,
) -> TraceField {
    let nnodes = basis.node_count();
    let last = nnodes - 1;
    let mut coeffs = vec![Vec::new(); mesh.edges.len()];
    for &eid in covered {
        coeffs[eid] = project_edge(mesh, eid, &basis, rule, &g);
    }
    // vertex values: average the incident edges' projected endpoint values
    let mut sums = vec![0.0; mesh.vertices.len()];
    let mut counts = vec![0usize; mesh.vertices.len()];
    for &eid in covered {
        let ends = mesh.edges[eid].endpoint_ids;
        sums[ends[0]] += coeffs[eid][0];
        counts[ends[0]] += 1;
        sums[ends[1]] += coeffs[eid][last];
        counts[ends[1]] += 1;
    }
    for &eid in covered {
        let ends = mesh.edges[eid].endpoint_ids;
        coeffs[eid][0] = sums[ends[0]] / counts[ends[0]] as f64;
        coeffs[eid][last] = sums[ends[1]] / counts[ends[1]] as f64;
    }
    TraceField {
        basis,
        coeffs,
        continuous: true,
    }
}
