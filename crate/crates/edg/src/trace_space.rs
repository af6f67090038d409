//! Global numbering of the skeleton trace unknowns.
//!
//! Both methods carry `k+2` Lagrange nodes per edge (degree `k+1`, endpoints
//! included). EDG identifies the endpoint nodes of all edges meeting at a
//! vertex, producing the continuous skeleton space with one unknown per
//! vertex plus `k` per edge; HDG keeps every edge independent. Degrees of
//! freedom on `∂Ω` are flagged and eliminated against the interpolated
//! Dirichlet datum, so the globally coupled system ranges over the interior
//! trace unknowns only.

use crate::mesh::Mesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Embedded DG: trace continuous across the whole skeleton.
    Edg,
    /// Hybridizable DG: trace independent per edge.
    Hdg,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Edg => "edg",
            Method::Hdg => "hdg",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "edg" => Ok(Method::Edg),
            "hdg" => Ok(Method::Hdg),
            other => Err(format!("unknown method `{other}`, expected edg or hdg")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Global trace degree-of-freedom map.
#[derive(Debug, Clone)]
pub struct TraceSpace {
    pub method: Method,
    pub k: usize,
    /// All trace dofs, boundary included.
    pub n_global: usize,
    /// Globally coupled unknowns after Dirichlet elimination.
    pub n_interior: usize,
    /// Per edge: the `k+2` global dofs in node order (node 0 at the edge's
    /// first endpoint).
    edge_dofs: Vec<Vec<usize>>,
    /// Which global dofs lie on `∂Ω`.
    pub boundary: Vec<bool>,
    interior_index: Vec<Option<usize>>,
}

impl TraceSpace {
    /// EDG numbering puts vertex dofs first (by vertex id), then
    /// edge-interior nodes (by edge id); HDG numbers nodes edge by edge.
    pub fn build(mesh: &Mesh, k: usize, method: Method) -> TraceSpace {
        let nodes_per_edge = k + 2;
        let n_edges = mesh.edges.len();
        let mut edge_dofs = vec![Vec::with_capacity(nodes_per_edge); n_edges];
        let n_global = match method {
            Method::Edg => {
                let nv = mesh.vertices.len();
                for (eid, edge) in mesh.edges.iter().enumerate() {
                    let dofs = &mut edge_dofs[eid];
                    dofs.push(edge.endpoint_ids[0]);
                    for i in 0..k {
                        dofs.push(nv + eid * k + i);
                    }
                    dofs.push(edge.endpoint_ids[1]);
                }
                nv + n_edges * k
            }
            Method::Hdg => {
                for (eid, dofs) in edge_dofs.iter_mut().enumerate() {
                    for i in 0..nodes_per_edge {
                        dofs.push(eid * nodes_per_edge + i);
                    }
                }
                n_edges * nodes_per_edge
            }
        };

        let mut boundary = vec![false; n_global];
        match method {
            Method::Edg => {
                for v in 0..mesh.vertices.len() {
                    boundary[v] = mesh.is_boundary_vertex(v);
                }
                for (eid, edge) in mesh.edges.iter().enumerate() {
                    if edge.is_boundary() {
                        for &d in &edge_dofs[eid][1..=k] {
                            boundary[d] = true;
                        }
                    }
                }
            }
            Method::Hdg => {
                for (eid, edge) in mesh.edges.iter().enumerate() {
                    if edge.is_boundary() {
                        for &d in &edge_dofs[eid] {
                            boundary[d] = true;
                        }
                    }
                }
            }
        }

        let mut interior_index = vec![None; n_global];
        let mut next = 0;
        for (d, idx) in interior_index.iter_mut().enumerate() {
            if !boundary[d] {
                *idx = Some(next);
                next += 1;
            }
        }

        TraceSpace {
            method,
            k,
            n_global,
            n_interior: next,
            edge_dofs,
            boundary,
            interior_index,
        }
    }

    pub fn nodes_per_edge(&self) -> usize {
        self.k + 2
    }

    pub fn edge_dofs(&self, edge: usize) -> &[usize] {
        &self.edge_dofs[edge]
    }

    pub fn global_dof(&self, edge: usize, node: usize) -> usize {
        self.edge_dofs[edge][node]
    }

    /// Condensed index of a global dof, `None` for boundary dofs.
    pub fn interior_index(&self, dof: usize) -> Option<usize> {
        self.interior_index[dof]
    }

    /// Global dofs of a cell's local trace space in side-major node order,
    /// matching the local solver's layout.
    pub fn cell_trace_dofs(&self, mesh: &Mesh, cell: usize) -> Vec<usize> {
        let c = &mesh.cells[cell];
        let mut dofs = Vec::with_capacity(c.edge_ids.len() * self.nodes_per_edge());
        for &eid in &c.edge_ids {
            dofs.extend_from_slice(&self.edge_dofs[eid]);
        }
        dofs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Mesh;
    use std::collections::HashSet;

    #[test]
    fn edg_counts_match_reference_table() {
        let mesh = Mesh::uniform_triangular(4);
        assert_eq!(TraceSpace::build(&mesh, 0, Method::Edg).n_interior, 9);
        assert_eq!(TraceSpace::build(&mesh, 0, Method::Hdg).n_interior, 80);
        assert_eq!(TraceSpace::build(&mesh, 1, Method::Edg).n_interior, 49);
        assert_eq!(TraceSpace::build(&mesh, 2, Method::Edg).n_interior, 89);
        assert_eq!(TraceSpace::build(&mesh, 2, Method::Hdg).n_interior, 160);

        let quad = Mesh::uniform_quadrilateral(4);
        assert_eq!(TraceSpace::build(&quad, 0, Method::Edg).n_interior, 9);
        assert_eq!(TraceSpace::build(&quad, 1, Method::Edg).n_interior, 33);
        assert_eq!(TraceSpace::build(&quad, 1, Method::Hdg).n_interior, 72);
    }

    #[test]
    fn interior_counts_follow_formulas() {
        for n in [2usize, 3, 5] {
            for k in 0..=2usize {
                let mesh = Mesh::uniform_triangular(n);
                let iv = mesh.interior_vertex_count();
                let ie = mesh.interior_edge_count();
                assert_eq!(
                    TraceSpace::build(&mesh, k, Method::Edg).n_interior,
                    iv + k * ie
                );
                assert_eq!(
                    TraceSpace::build(&mesh, k, Method::Hdg).n_interior,
                    (k + 2) * ie
                );
            }
        }
    }

    #[test]
    fn edg_shares_vertex_dofs() {
        let mesh = Mesh::uniform_quadrilateral(2);
        let ts = TraceSpace::build(&mesh, 1, Method::Edg);
        // center vertex of the 2×2 grid has four incident edges; all of them
        // must carry the same endpoint dof
        let center = mesh
            .vertices
            .iter()
            .find(|v| (v.position[0] - 0.5).abs() < 1e-12 && (v.position[1] - 0.5).abs() < 1e-12)
            .unwrap()
            .id;
        let mut dofs_at_center = HashSet::new();
        for e in &mesh.edges {
            if e.endpoint_ids[0] == center {
                dofs_at_center.insert(ts.edge_dofs(e.id)[0]);
            }
            if e.endpoint_ids[1] == center {
                dofs_at_center.insert(*ts.edge_dofs(e.id).last().unwrap());
            }
        }
        assert_eq!(dofs_at_center.len(), 1);
        assert!(!ts.boundary[*dofs_at_center.iter().next().unwrap()]);
    }

    #[test]
    fn hdg_keeps_edges_independent() {
        let mesh = Mesh::uniform_quadrilateral(2);
        let ts = TraceSpace::build(&mesh, 0, Method::Hdg);
        let mut seen = HashSet::new();
        for e in 0..mesh.edges.len() {
            for &d in ts.edge_dofs(e) {
                assert!(seen.insert(d), "dof {d} appears on two edges");
            }
        }
        assert_eq!(seen.len(), ts.n_global);
    }

    #[test]
    fn interior_edge_nodes_have_unique_dofs() {
        let mesh = Mesh::uniform_triangular(3);
        for method in [Method::Edg, Method::Hdg] {
            let ts = TraceSpace::build(&mesh, 2, method);
            let mut interior_seen = HashSet::new();
            for e in &mesh.edges {
                if e.is_boundary() {
                    continue;
                }
                for &d in &ts.edge_dofs(e.id)[1..=2] {
                    assert!(interior_seen.insert(d));
                    assert!(!ts.boundary[d]);
                }
            }
        }
    }

    #[test]
    fn boundary_flags_cover_exactly_the_boundary() {
        let mesh = Mesh::uniform_triangular(2);
        let ts = TraceSpace::build(&mesh, 1, Method::Edg);
        // boundary dofs: 8 boundary vertices + 8 boundary edges · k
        let n_boundary = ts.boundary.iter().filter(|&&b| b).count();
        assert_eq!(n_boundary, 8 + 8);
        assert_eq!(ts.n_interior + n_boundary, ts.n_global);
    }

    #[test]
    fn cell_trace_dofs_are_side_major() {
        let mesh = Mesh::uniform_quadrilateral(2);
        let ts = TraceSpace::build(&mesh, 1, Method::Edg);
        let dofs = ts.cell_trace_dofs(&mesh, 0);
        assert_eq!(dofs.len(), 4 * 3);
        let cell = &mesh.cells[0];
        for (side, &eid) in cell.edge_ids.iter().enumerate() {
            assert_eq!(&dofs[side * 3..side * 3 + 3], ts.edge_dofs(eid));
        }
    }

    #[test]
    fn one_cell_mesh_has_no_interior_dofs() {
        let mesh = Mesh::uniform_quadrilateral(1);
        for method in [Method::Edg, Method::Hdg] {
            let ts = TraceSpace::build(&mesh, 0, method);
            assert_eq!(ts.n_interior, 0, "{method}");
        }
    }
}
