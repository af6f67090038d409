//! Embedded (EDG) and hybridizable (HDG) discontinuous Galerkin solvers for
//! the second-order elliptic problem
//!
//! ```text
//!   c σ − ∇u = 0      in Ω,
//!   −div σ   = f      in Ω,
//!        u   = g      on ∂Ω,
//! ```
//!
//! on triangular, quadrilateral and general convex polygonal meshes of a 2D
//! domain. The potential is approximated in `P_{k+1}` per cell, the flux in
//! `[P_k]²`, and the numerical trace in `P_{k+1}` per skeleton edge, with the
//! trace space either continuous across the skeleton (EDG) or edgewise
//! independent (HDG).
//!
//! Interior unknowns are eliminated cell by cell (static condensation),
//! leaving a sparse symmetric positive-definite system in the trace unknowns
//! only; the potential and flux are then recovered by local back-substitution.
//!
//! The [`harness`] module drives manufactured-solution convergence studies
//! and degree-of-freedom comparisons for the two methods.

pub mod basis;
pub mod error_analysis;
pub mod harness;
pub mod local_solver;
pub mod mesh;
pub mod problem;
pub mod projections;
pub mod quadrature;
pub mod reference;
pub mod sparse;
pub mod system;
pub mod trace_space;

// pub use error_analysis::{ConvergenceReport, ErrorRecord};
// pub use harness::{MeshFamily, RunConfig, SolverKind};
// pub use mesh::Mesh;
// pub use problem::ProblemDefinition;
// pub use system::{CondensedSystem, DiscreteSolution};
// pub use trace_space::{Method, TraceSpace};
