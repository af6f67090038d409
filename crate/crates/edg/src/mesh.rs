//! 2D polygonal meshes, their skeleton topology, and the star-point
//! sub-triangulation used for cell quadrature.
//!
//! A mesh is a conforming subdivision of a simply connected domain into
//! convex polygons with counter-clockwise vertex ordering. Every cell carries
//! a star point (its vertex centroid) from which it is subdivided into one
//! triangle per polygon edge; all cell integrals are evaluated on those
//! triangles. Skeleton edges are derived from the cell lists, never read from
//! input, and each stores its incident cells and a unit normal pointing out
//! of the `left_cell`.

use std::collections::HashMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteVertex(usize),
    #[error("cell {cell} references vertex {vertex} out of range")]
    VertexOutOfRange { cell: usize, vertex: usize },
    #[error("cell {0} has fewer than 3 vertices")]
    TooFewVertices(usize),
    #[error("cell {0} has zero or negative area (vertices must be counter-clockwise)")]
    DegenerateCell(usize),
    #[error("cell {0} is not convex")]
    NonConvexCell(usize),
    #[error("edge ({0}, {1}) is shared by more than two cells")]
    OverSharedEdge(usize, usize),
    #[error("edge ({0}, {1}) is traversed in the same direction by both incident cells")]
    InconsistentOrientation(usize, usize),
    #[error("mesh violates the Euler relation V - E + C = 1 (got {0})")]
    EulerViolation(i64),
    #[error("sub-triangle areas of cell {0} do not sum to its area")]
    SubTriangulationMismatch(usize),
    #[error("mesh file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("failed to read mesh file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: usize,
    pub position: [f64; 2],
}

/// A convex polygonal cell with counter-clockwise vertices.
#[derive(Debug, Clone)]
pub struct Cell {
    pub id: usize,
    pub vertex_ids: Vec<usize>,
    /// Skeleton edge ids, side-aligned: `edge_ids[i]` joins `vertex_ids[i]`
    /// to `vertex_ids[(i+1) % m]`.
    pub edge_ids: Vec<usize>,
    /// Star point `M_T` (vertex centroid), apex of the sub-triangulation.
    pub star_point: [f64; 2],
    /// Cell diameter `h_T`: the maximum pairwise vertex distance.
    pub diameter: f64,
    pub area: f64,
    /// One triangle per polygon side, `[star_point, v_i, v_{i+1}]`.
    pub sub_triangles: Vec<[[f64; 2]; 3]>,
}

#[derive(Debug, Clone)]
pub struct SkeletonEdge {
    pub id: usize,
    pub endpoint_ids: [usize; 2],
    pub left_cell: usize,
    /// Absent for boundary edges.
    pub right_cell: Option<usize>,
    pub length: f64,
    /// Unit normal pointing out of `left_cell`.
    pub unit_normal: [f64; 2],
}

impl SkeletonEdge {
    pub fn is_boundary(&self) -> bool {
        self.right_cell.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vertex>,
    pub cells: Vec<Cell>,
    pub edges: Vec<SkeletonEdge>,
    /// Largest cell diameter.
    pub h: f64,
    /// Regularity parameter `max_T h_T² / |T|`.
    pub regularity: f64,
    boundary_vertex: Vec<bool>,
}

/// Per-cell outcome of the shape-regularity checks.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    /// Cell is star-shaped w.r.t. the ball of radius `θ*·h_T` around `M_T`
    /// (every edge half-plane keeps at least that distance from the star point).
    pub star_shaped: Vec<bool>,
    /// Minimum pairwise vertex distance is at least `l*·h_T`.
    pub vertex_separation: Vec<bool>,
}

impl RegularityReport {
    pub fn all_pass(&self) -> bool {
        self.star_shaped.iter().all(|&b| b) && self.vertex_separation.iter().all(|&b| b)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn polygon_area(pts: &[[f64; 2]]) -> f64 {
    let m = pts.len();
    let mut twice = 0.0;
    for i in 0..m {
        let j = (i + 1) % m;
        twice += pts[i][0] * pts[j][1] - pts[j][0] * pts[i][1];
    }
    0.5 * twice
}

fn triangle_area(t: &[[f64; 2]; 3]) -> f64 {
    0.5 * cross(t[0], t[1], t[2])
}

/// Split a convex polygon into one triangle per side with apex at `star`.
///
/// Rejects degenerate polygons and verifies that the signed areas are
/// positive and sum to the polygon area (relative tolerance 1e-12).
pub fn sub_triangulate(polygon: &[[f64; 2]], star: [f64; 2]) -> Result<Vec<[[f64; 2]; 3]>, MeshError> {
    let area = polygon_area(polygon);
    if !(area > 0.0) || !area.is_finite() {
        return Err(MeshError::DegenerateCell(usize::MAX));
    }
    let m = polygon.len();
    let mut tris = Vec::with_capacity(m);
    let mut sum = 0.0;
    for i in 0..m {
        let tri = [star, polygon[i], polygon[(i + 1) % m]];
        let a = triangle_area(&tri);
        if !(a > 0.0) {
            return Err(MeshError::SubTriangulationMismatch(usize::MAX));
        }
        sum += a;
        tris.push(tri);
    }
    if (sum - area).abs() > 1e-12 * area {
        return Err(MeshError::SubTriangulationMismatch(usize::MAX));
    }
    Ok(tris)
}

impl Mesh {
    /// Build a mesh from vertex coordinates and per-cell counter-clockwise
    /// vertex lists. Edges, normals and the sub-triangulations are derived.
    pub fn from_cells(
        positions: Vec<[f64; 2]>,
        cell_vertices: Vec<Vec<usize>>,
    ) -> Result<Mesh, MeshError> {
        for (i, p) in positions.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(MeshError::NonFiniteVertex(i));
            }
        }
        let vertices: Vec<Vertex> = positions
            .iter()
            .enumerate()
            .map(|(id, &position)| Vertex { id, position })
            .collect();

        let mut cells = Vec::with_capacity(cell_vertices.len());
        let mut edges: Vec<SkeletonEdge> = Vec::new();
        let mut edge_lookup: HashMap<(usize, usize), usize> = HashMap::new();

        for (cid, vids) in cell_vertices.iter().enumerate() {
            if vids.len() < 3 {
                return Err(MeshError::TooFewVertices(cid));
            }
            for &v in vids {
                if v >= positions.len() {
                    return Err(MeshError::VertexOutOfRange { cell: cid, vertex: v });
                }
            }
            let pts: Vec<[f64; 2]> = vids.iter().map(|&v| positions[v]).collect();
            let area = polygon_area(&pts);
            if !(area > 0.0) {
                return Err(MeshError::DegenerateCell(cid));
            }
            let m = pts.len();
            for i in 0..m {
                if cross(pts[i], pts[(i + 1) % m], pts[(i + 2) % m]) <= 0.0 {
                    return Err(MeshError::NonConvexCell(cid));
                }
            }
            let star_point = [
                pts.iter().map(|p| p[0]).sum::<f64>() / m as f64,
                pts.iter().map(|p| p[1]).sum::<f64>() / m as f64,
            ];
            let mut diameter: f64 = 0.0;
            for i in 0..m {
                for j in (i + 1)..m {
                    diameter = diameter.max(dist(pts[i], pts[j]));
                }
            }
            let sub_triangles = sub_triangulate(&pts, star_point).map_err(|e| match e {
                MeshError::SubTriangulationMismatch(_) => MeshError::SubTriangulationMismatch(cid),
                MeshError::DegenerateCell(_) => MeshError::DegenerateCell(cid),
                other => other,
            })?;

            // register the cell's sides with the skeleton, first traversal
            // fixes the edge orientation and outward normal
            let mut edge_ids = Vec::with_capacity(m);
            for i in 0..m {
                let (a, b) = (vids[i], vids[(i + 1) % m]);
                let key = (a.min(b), a.max(b));
                match edge_lookup.get(&key) {
                    None => {
                        let id = edges.len();
                        let pa = positions[a];
                        let pb = positions[b];
                        let length = dist(pa, pb);
                        // CCW traversal => outward normal is the clockwise perpendicular
                        let unit_normal = [(pb[1] - pa[1]) / length, -(pb[0] - pa[0]) / length];
                        edges.push(SkeletonEdge {
                            id,
                            endpoint_ids: [a, b],
                            left_cell: cid,
                            right_cell: None,
                            length,
                            unit_normal,
                        });
                        edge_lookup.insert(key, id);
                        edge_ids.push(id);
                    }
                    Some(&id) => {
                        let edge = &mut edges[id];
                        if edge.right_cell.is_some() {
                            return Err(MeshError::OverSharedEdge(key.0, key.1));
                        }
                        // a conforming neighbour traverses the edge reversed
                        if edge.endpoint_ids != [b, a] {
                            return Err(MeshError::InconsistentOrientation(key.0, key.1));
                        }
                        edge.right_cell = Some(cid);
                        edge_ids.push(id);
                    }
                }
            }

            cells.push(Cell {
                id: cid,
                vertex_ids: vids.clone(),
                edge_ids,
                star_point,
                diameter,
                area,
                sub_triangles,
            });
        }

        let euler = vertices.len() as i64 - edges.len() as i64 + cells.len() as i64;
        if euler != 1 {
            return Err(MeshError::EulerViolation(euler));
        }

        let mut boundary_vertex = vec![false; vertices.len()];
        for e in &edges {
            if e.is_boundary() {
                boundary_vertex[e.endpoint_ids[0]] = true;
                boundary_vertex[e.endpoint_ids[1]] = true;
            }
        }

        let h = cells.iter().map(|c| c.diameter).fold(0.0, f64::max);
        let regularity = cells
            .iter()
            .map(|c| c.diameter * c.diameter / c.area)
            .fold(0.0, f64::max);

        Ok(Mesh {
            vertices,
            cells,
            edges,
            h,
            regularity,
            boundary_vertex,
        })
    }

    /// Uniform triangular mesh of the unit square: `n×n` squares, each split
    /// into two triangles by the diagonal from lower-left to upper-right.
    pub fn uniform_triangular(n: usize) -> Mesh {
        assert!(n >= 1, "grid size must be at least 1");
        let (positions, idx) = unit_square_grid(n);
        let mut cells = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let a = idx(i, j);
                let b = idx(i + 1, j);
                let c = idx(i + 1, j + 1);
                let d = idx(i, j + 1);
                cells.push(vec![a, b, c]);
                cells.push(vec![a, c, d]);
            }
        }
        Mesh::from_cells(positions, cells).expect("uniform triangular mesh is valid")
    }

    /// Uniform quadrilateral mesh of the unit square: `n×n` square cells.
    pub fn uniform_quadrilateral(n: usize) -> Mesh {
        assert!(n >= 1, "grid size must be at least 1");
        let (positions, idx) = unit_square_grid(n);
        let mut cells = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                cells.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Mesh::from_cells(positions, cells).expect("uniform quadrilateral mesh is valid")
    }

    /// Parse the text mesh format: first line `nv nc`, then `nv` lines `x y`,
    /// then `nc` lines `m v0 v1 ... v(m-1)` with counter-clockwise indices.
    pub fn parse(text: &str) -> Result<Mesh, MeshError> {
        let mut lines = text.lines().enumerate();
        let mut next_tokens = |expect: &str| -> Result<(usize, Vec<&str>), MeshError> {
            for (lineno, line) in lines.by_ref() {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if !tokens.is_empty() {
                    return Ok((lineno + 1, tokens));
                }
            }
            Err(MeshError::Parse {
                line: 0,
                message: format!("unexpected end of file, expected {expect}"),
            })
        };

        let (lineno, header) = next_tokens("header `nv nc`")?;
        if header.len() != 2 {
            return Err(MeshError::Parse {
                line: lineno,
                message: "expected `nv nc`".into(),
            });
        }
        let parse_usize = |s: &str, line: usize| -> Result<usize, MeshError> {
            s.parse().map_err(|_| MeshError::Parse {
                line,
                message: format!("invalid integer `{s}`"),
            })
        };
        let parse_f64 = |s: &str, line: usize| -> Result<f64, MeshError> {
            s.parse().map_err(|_| MeshError::Parse {
                line,
                message: format!("invalid number `{s}`"),
            })
        };
        let nv = parse_usize(header[0], lineno)?;
        let nc = parse_usize(header[1], lineno)?;

        let mut positions = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (lineno, tokens) = next_tokens("vertex line `x y`")?;
            if tokens.len() != 2 {
                return Err(MeshError::Parse {
                    line: lineno,
                    message: "expected `x y`".into(),
                });
            }
            positions.push([parse_f64(tokens[0], lineno)?, parse_f64(tokens[1], lineno)?]);
        }

        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (lineno, tokens) = next_tokens("cell line `m v0 ... v(m-1)`")?;
            let m = parse_usize(tokens[0], lineno)?;
            if tokens.len() != m + 1 {
                return Err(MeshError::Parse {
                    line: lineno,
                    message: format!("expected {m} vertex indices, got {}", tokens.len() - 1),
                });
            }
            let mut vids = Vec::with_capacity(m);
            for t in &tokens[1..] {
                vids.push(parse_usize(t, lineno)?);
            }
            cells.push(vids);
        }

        Mesh::from_cells(positions, cells)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
        let text = std::fs::read_to_string(path)?;
        Mesh::parse(&text)
    }

    pub fn position(&self, vertex: usize) -> [f64; 2] {
        self.vertices[vertex].position
    }

    /// Endpoint coordinates of an edge in its stored orientation.
    pub fn edge_endpoints(&self, edge: usize) -> ([f64; 2], [f64; 2]) {
        let e = &self.edges[edge];
        (self.position(e.endpoint_ids[0]), self.position(e.endpoint_ids[1]))
    }

    /// Point on an edge at parameter `t ∈ [0,1]` of its stored orientation.
    pub fn edge_point(&self, edge: usize, t: f64) -> [f64; 2] {
        let (a, b) = self.edge_endpoints(edge);
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    /// Unit normal of `edge` pointing out of `cell`.
    pub fn outward_normal(&self, cell: usize, edge: usize) -> [f64; 2] {
        let e = &self.edges[edge];
        if e.left_cell == cell {
            e.unit_normal
        } else {
            debug_assert_eq!(e.right_cell, Some(cell));
            [-e.unit_normal[0], -e.unit_normal[1]]
        }
    }

    pub fn is_boundary_vertex(&self, vertex: usize) -> bool {
        self.boundary_vertex[vertex]
    }

    pub fn interior_vertex_count(&self) -> usize {
        self.boundary_vertex.iter().filter(|&&b| !b).count()
    }

    pub fn interior_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_boundary()).count()
    }

    /// Check assumptions M1 (star-shapedness w.r.t. a ball of radius
    /// `theta_star·h_T` around the star point) and M2 (minimum vertex
    /// separation `l_star·h_T`). Failures are reported, not raised.
    pub fn validate_regularity(&self, theta_star: f64, l_star: f64) -> RegularityReport {
        debug_assert!(theta_star > 0.0 && theta_star < 1.0);
        debug_assert!(l_star > 0.0 && l_star < 1.0);
        let mut star_shaped = Vec::with_capacity(self.cells.len());
        let mut vertex_separation = Vec::with_capacity(self.cells.len());
        for cell in &self.cells {
            let pts: Vec<[f64; 2]> = cell.vertex_ids.iter().map(|&v| self.position(v)).collect();
            let m = pts.len();
            let mut min_edge_dist = f64::INFINITY;
            for i in 0..m {
                let a = pts[i];
                let b = pts[(i + 1) % m];
                // distance from the star point to the edge line; positive on
                // the interior side for CCW polygons
                let len = dist(a, b);
                let d = cross(a, b, cell.star_point) / len;
                min_edge_dist = min_edge_dist.min(d);
            }
            star_shaped.push(min_edge_dist >= theta_star * cell.diameter);

            let mut min_pair = f64::INFINITY;
            for i in 0..m {
                for j in (i + 1)..m {
                    min_pair = min_pair.min(dist(pts[i], pts[j]));
                }
            }
            vertex_separation.push(min_pair >= l_star * cell.diameter);
        }
        RegularityReport {
            star_shaped,
            vertex_separation,
        }
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }
}

fn unit_square_grid(n: usize) -> (Vec<[f64; 2]>, impl Fn(usize, usize) -> usize) {
    let mut positions = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            positions.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    let stride = n + 1;
    (positions, move |i, j| j * stride + i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn triangular_counts_n4() {
        let mesh = Mesh::uniform_triangular(4);
        assert_eq!(mesh.cells.len(), 32);
        assert_eq!(mesh.vertices.len(), 25);
        assert_eq!(mesh.interior_vertex_count(), 9);
    }

    #[test]
    fn triangular_counts_n1() {
        let mesh = Mesh::uniform_triangular(1);
        assert_eq!(mesh.cells.len(), 2);
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.interior_vertex_count(), 0);
        assert_eq!(mesh.interior_edge_count(), 1);
    }

    #[test]
    fn triangular_interior_edges() {
        // interior edges: 2n(n-1) grid edges plus n² diagonals
        for n in [2usize, 4, 8] {
            let mesh = Mesh::uniform_triangular(n);
            assert_eq!(mesh.interior_edge_count(), 2 * n * (n - 1) + n * n, "n={n}");
        }
        // spelled out for n=8: 112 interior grid edges + 64 diagonals
        let mesh = Mesh::uniform_triangular(8);
        assert_eq!(mesh.cells.len(), 128);
        assert_eq!(mesh.interior_edge_count(), 176);
    }

    #[test]
    fn quadrilateral_counts_n4() {
        let mesh = Mesh::uniform_quadrilateral(4);
        assert_eq!(mesh.cells.len(), 16);
        assert_eq!(mesh.edges.len(), 40);
        assert_eq!(mesh.interior_edge_count(), 24);
        assert_eq!(mesh.interior_vertex_count(), 9);
    }

    #[test]
    fn quadrilateral_counts_n1() {
        let mesh = Mesh::uniform_quadrilateral(1);
        assert_eq!(mesh.cells.len(), 1);
        assert_eq!(mesh.edges.len(), 4);
        assert_eq!(mesh.interior_edge_count(), 0);
    }

    #[test]
    fn areas_sum_to_one() {
        for n in [1usize, 3, 4, 7] {
            assert_relative_eq!(Mesh::uniform_triangular(n).total_area(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(Mesh::uniform_quadrilateral(n).total_area(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sub_triangles_partition_cells() {
        let mesh = Mesh::uniform_triangular(3);
        for cell in &mesh.cells {
            let sum: f64 = cell.sub_triangles.iter().map(triangle_area).sum();
            assert_relative_eq!(sum, cell.area, epsilon = 1e-12 * cell.area);
            assert_eq!(cell.sub_triangles.len(), cell.vertex_ids.len());
        }
    }

    #[test]
    fn sub_triangulate_unit_square() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let tris = sub_triangulate(&square, [0.5, 0.5]).unwrap();
        assert_eq!(tris.len(), 4);
        for t in &tris {
            assert_relative_eq!(triangle_area(t), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn sub_triangulate_right_triangle() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let centroid = [1.0 / 3.0, 1.0 / 3.0];
        let tris = sub_triangulate(&tri, centroid).unwrap();
        assert_eq!(tris.len(), 3);
        let sum: f64 = tris.iter().map(triangle_area).sum();
        assert_relative_eq!(sum, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn sub_triangulate_regular_hexagon() {
        let mut hex = Vec::new();
        for i in 0..6 {
            let a = std::f64::consts::PI / 3.0 * i as f64;
            hex.push([a.cos(), a.sin()]);
        }
        let tris = sub_triangulate(&hex, [0.0, 0.0]).unwrap();
        assert_eq!(tris.len(), 6);
        let sum: f64 = tris.iter().map(triangle_area).sum();
        // shoelace area of the hexagon is the independent reference
        let shoelace = polygon_area(&hex);
        assert_relative_eq!(sum, shoelace, epsilon = 1e-14);
        assert_relative_eq!(sum, 1.5 * 3.0f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn sub_triangulate_rejects_degenerate() {
        let line = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert!(sub_triangulate(&line, [1.0, 0.0]).is_err());
    }

    #[test]
    fn conformity_opposite_orientation() {
        let mesh = Mesh::uniform_quadrilateral(3);
        for edge in &mesh.edges {
            let Some(right) = edge.right_cell else { continue };
            let left = &mesh.cells[edge.left_cell];
            let rcell = &mesh.cells[right];
            let [a, b] = edge.endpoint_ids;
            let traverses = |cell: &Cell, from: usize, to: usize| {
                let m = cell.vertex_ids.len();
                (0..m).any(|i| cell.vertex_ids[i] == from && cell.vertex_ids[(i + 1) % m] == to)
            };
            assert!(traverses(left, a, b));
            assert!(traverses(rcell, b, a));
        }
    }

    #[test]
    fn euler_relation_holds() {
        for n in [1usize, 2, 5] {
            let mesh = Mesh::uniform_triangular(n);
            assert_eq!(
                mesh.vertices.len() as i64 - mesh.edges.len() as i64 + mesh.cells.len() as i64,
                1
            );
        }
    }

    #[test]
    fn normals_are_unit_and_outward() {
        let mesh = Mesh::uniform_triangular(2);
        for edge in &mesh.edges {
            let n = edge.unit_normal;
            assert!((n[0] * n[0] + n[1] * n[1] - 1.0).abs() < 1e-14);
            // outward: points away from the left cell's star point
            let mid = mesh.edge_point(edge.id, 0.5);
            let star = mesh.cells[edge.left_cell].star_point;
            let d = (mid[0] - star[0]) * n[0] + (mid[1] - star[1]) * n[1];
            assert!(d > 0.0);
        }
    }

    #[test]
    fn cell_edge_incidence_consistent() {
        let mesh = Mesh::uniform_quadrilateral(2);
        for cell in &mesh.cells {
            let m = cell.vertex_ids.len();
            for (i, &eid) in cell.edge_ids.iter().enumerate() {
                let e = &mesh.edges[eid];
                assert!(e.left_cell == cell.id || e.right_cell == Some(cell.id));
                let (a, b) = (cell.vertex_ids[i], cell.vertex_ids[(i + 1) % m]);
                let mut ends = e.endpoint_ids;
                ends.sort_unstable();
                let mut side = [a, b];
                side.sort_unstable();
                assert_eq!(ends, side);
            }
        }
    }

    #[test]
    fn regularity_square_cell_passes() {
        // centroid-to-edge distance of a square is h_T/(2√2) ≈ 0.354·h_T
        let mesh = Mesh::uniform_quadrilateral(1);
        let report = mesh.validate_regularity(0.3, 0.5);
        assert!(report.all_pass());
        let tight = mesh.validate_regularity(0.36, 0.5);
        assert!(!tight.star_shaped[0]);
    }

    #[test]
    fn regularity_sliver_fails_star_shape() {
        // height ~1e-6, so the ball condition fails for any practical θ*;
        // the pairwise vertex distances (min 0.5) still satisfy M2 at l*=0.1
        let mesh = Mesh::from_cells(
            vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1e-6]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let report = mesh.validate_regularity(0.01, 0.1);
        assert!(!report.star_shaped[0]);
        assert!(report.vertex_separation[0]);
    }

    #[test]
    fn regularity_close_vertices_fail_separation() {
        // square with one corner cut off: the two new vertices are ε apart
        let eps = 1e-6;
        let mesh = Mesh::from_cells(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0 - eps], [1.0 - eps, 1.0], [0.0, 1.0]],
            vec![vec![0, 1, 2, 3, 4]],
        )
        .unwrap();
        let report = mesh.validate_regularity(0.1, 0.1);
        assert!(!report.vertex_separation[0]);
    }

    #[test]
    fn regularity_uniform_triangular() {
        // for the right isoceles cells the centroid-to-hypotenuse distance is
        // h_T/6, so M1 holds up to θ* = 1/6 and fails beyond
        let mesh = Mesh::uniform_triangular(4);
        assert!(mesh.validate_regularity(0.16, 0.5).all_pass());
        let report = mesh.validate_regularity(0.2, 0.5);
        assert!(report.star_shaped.iter().all(|&b| !b));
        assert!(report.vertex_separation.iter().all(|&b| b));
    }

    #[test]
    fn regularity_parameter_values() {
        // h_T² / |T| is 4 for the split triangles and 2 for squares
        assert_relative_eq!(Mesh::uniform_triangular(4).regularity, 4.0, epsilon = 1e-12);
        assert_relative_eq!(Mesh::uniform_quadrilateral(4).regularity, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn parse_round_trip() {
        let text = "4 1\n0 0\n1 0\n1 1\n0 1\n4 0 1 2 3\n";
        let mesh = Mesh::parse(text).unwrap();
        assert_eq!(mesh.cells.len(), 1);
        assert_eq!(mesh.edges.len(), 4);
        assert_relative_eq!(mesh.total_area(), 1.0);
    }

    #[test]
    fn parse_rejects_clockwise_cell() {
        let text = "4 1\n0 0\n1 0\n1 1\n0 1\n4 0 3 2 1\n";
        assert!(matches!(Mesh::parse(text), Err(MeshError::DegenerateCell(0))));
    }

    #[test]
    fn parse_rejects_nonconvex_cell() {
        let text = "5 1\n0 0\n2 0\n2 2\n1 0.5\n0 2\n5 0 1 2 3 4\n";
        assert!(matches!(Mesh::parse(text), Err(MeshError::NonConvexCell(0))));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Mesh::parse("not a mesh").is_err());
        assert!(Mesh::parse("").is_err());
    }

    #[test]
    fn mesh_h_is_max_diameter() {
        let mesh = Mesh::uniform_triangular(4);
        assert_relative_eq!(mesh.h, 2.0_f64.sqrt() / 4.0, epsilon = 1e-15);
        let mesh = Mesh::uniform_quadrilateral(8);
        assert_relative_eq!(mesh.h, 2.0_f64.sqrt() / 8.0, epsilon = 1e-15);
    }
}
