//! Quadrature rules for skeleton edges and polygonal cells.
//!
//! Edge integrals use Gauss–Legendre rules on the parameter interval `[0,1]`.
//! Cell integrals are built by collapsing a tensor Gauss rule onto the
//! reference triangle (Duffy transform) and pushing that rule through the
//! affine map onto every triangle of the cell's star-point sub-triangulation.
//! Gauss–Lobatto nodes, used for the nodal edge bases, live here as well.

use crate::mesh::Cell;
use thiserror::Error;

/// Largest supported number of 1D Gauss points.
pub const MAX_GAUSS_POINTS: usize = 32;
/// Largest polynomial exactness degree supported by [`triangle_rule`].
pub const MAX_TRIANGLE_EXACTNESS: usize = 50;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("requested {requested} Gauss points, supported range is 1..={max}")]
    PointCountOutOfRange { requested: usize, max: usize },
    #[error("requested exactness degree {requested}, supported maximum is {max}")]
    ExactnessUnsupported { requested: usize, max: usize },
    #[error("Gauss-Lobatto rule needs at least 2 nodes, got {0}")]
    TooFewLobattoNodes(usize),
}

/// Quadrature rule over a 2D region (reference triangle or a physical cell).
#[derive(Debug, Clone)]
pub struct CellRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub exactness: usize,
}

/// Gauss rule on the parameter interval `[0,1]`.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly (`2·npoints − 1`).
    pub exactness: usize,
}

impl CellRule {
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p[0], p[1]))
            .sum()
    }
}

impl EdgeRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(*t))
            .sum()
    }
}

/// Gauss–Legendre nodes and weights on `[0,1]`.
///
/// Nodes are computed by Newton iteration on the Legendre recurrence and are
/// accurate to machine precision for all supported point counts.
pub fn gauss_legendre(npoints: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    if npoints == 0 || npoints > MAX_GAUSS_POINTS {
        return Err(QuadratureError::PointCountOutOfRange {
            requested: npoints,
            max: MAX_GAUSS_POINTS,
        });
    }
    let n = npoints;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        // map [-1,1] -> [0,1]; cos() enumerates nodes in descending order
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    Ok((nodes, weights))
}

/// Value and derivative of the Legendre polynomial `P_n` at `x`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = x;
    for j in 2..=n {
        let jf = j as f64;
        let p_next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = p_next;
    }
    let dp = if (x * x - 1.0).abs() < 1e-30 {
        // endpoint values: P'_n(±1) = ±^{n+1} n(n+1)/2
        let s = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        s * (n * (n + 1)) as f64 / 2.0
    } else {
        n as f64 * (x * p - p_prev) / (x * x - 1.0)
    };
    (p, dp)
}

/// Gauss–Lobatto nodes on `[0,1]`, endpoints included, in ascending order.
pub fn gauss_lobatto_nodes(nnodes: usize) -> Result<Vec<f64>, QuadratureError> {
    if nnodes < 2 {
        return Err(QuadratureError::TooFewLobattoNodes(nnodes));
    }
    if nnodes > MAX_GAUSS_POINTS {
        return Err(QuadratureError::PointCountOutOfRange {
            requested: nnodes,
            max: MAX_GAUSS_POINTS,
        });
    }
    let m = nnodes - 1; // interior nodes are the roots of P'_m
    let mut xs = Vec::with_capacity(nnodes);
    xs.push(-1.0);
    for i in 1..m {
        // Chebyshev extrema are good starting guesses for Lobatto nodes
        let mut x = (std::f64::consts::PI * (m - i) as f64 / m as f64).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, x);
            // f = P'_m, f' = P''_m from the Legendre differential equation
            let ddp = (2.0 * x * dp - (m * (m + 1)) as f64 * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs.push(x);
    }
    xs.push(1.0);
    Ok(xs.iter().map(|x| 0.5 * (x + 1.0)).collect())
}

/// Gauss rule on `[0,1]` exact for polynomials of degree `2·npoints − 1`.
pub fn edge_rule(npoints: usize) -> Result<EdgeRule, QuadratureError> {
    let (points, weights) = gauss_legendre(npoints)?;
    Ok(EdgeRule {
        points,
        weights,
        exactness: 2 * npoints - 1,
    })
}

/// Rule on the reference triangle `{x,y ≥ 0, x+y ≤ 1}` exact for all
/// bivariate polynomials of total degree ≤ `exactness`.
///
/// Built from a tensor Gauss rule on `[0,1]²` under the collapse map
/// `(ξ, η) ↦ (ξ, η(1−ξ))` with Jacobian `1−ξ`; the extra factor raises the
/// ξ-degree by one, hence the asymmetric point counts.
pub fn triangle_rule(exactness: usize) -> Result<CellRule, QuadratureError> {
    if exactness > MAX_TRIANGLE_EXACTNESS {
        return Err(QuadratureError::ExactnessUnsupported {
            requested: exactness,
            max: MAX_TRIANGLE_EXACTNESS,
        });
    }
    // the Jacobian factor 1−ξ raises the ξ-degree of the integrand by one
    let n_xi = (exactness + 3) / 2;
    let n_eta = (exactness + 2) / 2;
    let (xi, wxi) = gauss_legendre(n_xi)?;
    let (eta, weta) = gauss_legendre(n_eta)?;
    let mut points = Vec::with_capacity(n_xi * n_eta);
    let mut weights = Vec::with_capacity(n_xi * n_eta);
    for (x, wx) in xi.iter().zip(&wxi) {
        for (e, we) in eta.iter().zip(&weta) {
            points.push([*x, e * (1.0 - x)]);
            weights.push(wx * we * (1.0 - x));
        }
    }
    Ok(CellRule {
        points,
        weights,
        exactness,
    })
}

/// Push a reference-triangle rule onto the physical triangle `(a, b, c)`.
fn map_to_triangle<'a>(
    rule: &'a CellRule,
    tri: &[[f64; 2]; 3],
) -> impl Iterator<Item = ([f64; 2], f64)> + 'a {
    let [a, b, c] = *tri;
    let jac = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    rule.points.iter().zip(rule.weights.iter()).map(move |(p, w)| {
        let x = a[0] + p[0] * (b[0] - a[0]) + p[1] * (c[0] - a[0]);
        let y = a[1] + p[0] * (b[1] - a[1]) + p[1] * (c[1] - a[1]);
        ([x, y], w * jac)
    })
}

/// Quadrature over a polygonal cell: the reference-triangle rule pushed
/// forward onto each sub-triangle of the star-point triangulation.
pub fn cell_quadrature(cell: &Cell, exactness: usize) -> Result<CellRule, QuadratureError> {
    cell_quadrature_from_triangles(&cell.sub_triangles, exactness)
}

/// Same as [`cell_quadrature`] but from an explicit triangle list.
pub fn cell_quadrature_from_triangles(
    triangles: &[[[f64; 2]; 3]],
    exactness: usize,
) -> Result<CellRule, QuadratureError> {
    let base = triangle_rule(exactness)?;
    let mut points = Vec::with_capacity(base.points.len() * triangles.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for tri in triangles {
        for (p, w) in map_to_triangle(&base, tri) {
            points.push(p);
            weights.push(w);
        }
    }
    Ok(CellRule {
        points,
        weights,
        exactness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Exact monomial integral over the reference triangle:
    /// ∫ x^a y^b = a! b! / (a+b+2)!.
    fn tri_monomial(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(|i| i as f64).product::<f64>().max(1.0);
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn gauss_midpoint_is_one_point_rule() {
        let rule = edge_rule(1).unwrap();
        assert_eq!(rule.points.len(), 1);
        assert_relative_eq!(rule.points[0], 0.5);
        assert_relative_eq!(rule.integrate(|x| x), 0.5);
    }

    #[test]
    fn gauss_two_points_integrates_cubics() {
        let rule = edge_rule(2).unwrap();
        assert_relative_eq!(rule.integrate(|x| x * x * x), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn gauss_five_points_integrates_degree_nine() {
        let rule = edge_rule(5).unwrap();
        assert_relative_eq!(rule.integrate(|x| x.powi(9)), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn gauss_exactness_sweep() {
        for n in 1..=MAX_GAUSS_POINTS {
            let rule = edge_rule(n).unwrap();
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
            for d in 0..=rule.exactness {
                let exact = 1.0 / (d as f64 + 1.0);
                let got = rule.integrate(|x| x.powi(d as i32));
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "n={n} degree={d}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn gauss_point_count_bounds() {
        assert!(edge_rule(0).is_err());
        assert!(edge_rule(MAX_GAUSS_POINTS + 1).is_err());
        assert!(edge_rule(20).is_ok());
    }

    #[test]
    fn triangle_rule_degree_one() {
        let rule = triangle_rule(1).unwrap();
        assert_relative_eq!(rule.integrate(|_, _| 1.0), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn triangle_rule_xy() {
        let rule = triangle_rule(2).unwrap();
        assert_relative_eq!(rule.integrate(|x, y| x * y), 1.0 / 24.0, epsilon = 1e-14);
    }

    #[test]
    fn triangle_rule_degree_ten_monomial() {
        let rule = triangle_rule(10).unwrap();
        let exact = tri_monomial(4, 6);
        assert_relative_eq!(rule.integrate(|x, y| x.powi(4) * y.powi(6)), exact, epsilon = 1e-13);
    }

    #[test]
    fn triangle_exactness_sweep() {
        for exactness in [0usize, 1, 2, 3, 5, 8, 13, 20, 27] {
            let rule = triangle_rule(exactness).unwrap();
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 0.5, epsilon = 1e-13);
            for a in 0..=exactness as u32 {
                for b in 0..=(exactness as u32 - a) {
                    let exact = tri_monomial(a, b);
                    let got = rule.integrate(|x, y| x.powi(a as i32) * y.powi(b as i32));
                    assert!(
                        (got - exact).abs() <= 1e-12 * exact.max(1.0),
                        "exactness={exactness} a={a} b={b}: {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn triangle_rule_rejects_unsupported_exactness() {
        assert!(triangle_rule(MAX_TRIANGLE_EXACTNESS + 1).is_err());
        assert!(triangle_rule(20).is_ok());
    }

    #[test]
    fn lobatto_nodes_small_counts() {
        assert_eq!(gauss_lobatto_nodes(2).unwrap(), vec![0.0, 1.0]);
        let three = gauss_lobatto_nodes(3).unwrap();
        assert_relative_eq!(three[1], 0.5, epsilon = 1e-15);
        // interior nodes of the 4-point rule sit at (1 ± 1/√5)/2
        let four = gauss_lobatto_nodes(4).unwrap();
        let lo = 0.5 * (1.0 - 1.0 / 5.0f64.sqrt());
        let hi = 0.5 * (1.0 + 1.0 / 5.0f64.sqrt());
        assert_relative_eq!(four[1], lo, epsilon = 1e-14);
        assert_relative_eq!(four[2], hi, epsilon = 1e-14);
    }

    #[test]
    fn lobatto_nodes_sorted_and_symmetric() {
        for n in 2..=12 {
            let nodes = gauss_lobatto_nodes(n).unwrap();
            assert_eq!(nodes.len(), n);
            assert_eq!(nodes[0], 0.0);
            assert_eq!(nodes[n - 1], 1.0);
            for w in nodes.windows(2) {
                assert!(w[0] < w[1]);
            }
            for i in 0..n {
                assert_relative_eq!(nodes[i], 1.0 - nodes[n - 1 - i], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn cell_rule_on_unit_square() {
        // unit square split into two triangles by the main diagonal
        let tris = [
            [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]],
            [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        ];
        let rule = cell_quadrature_from_triangles(&tris, 4).unwrap();
        assert_relative_eq!(rule.integrate(|_, _| 1.0), 1.0, epsilon = 1e-13);
        assert_relative_eq!(rule.integrate(|x, y| x * x * y * y), 1.0 / 9.0, epsilon = 1e-13);

        let fine = cell_quadrature_from_triangles(&tris, 16).unwrap();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(
            fine.integrate(|x, y| (pi * x).sin() * (pi * y).sin()),
            4.0 / (pi * pi),
            epsilon = 1e-11
        );
    }
}
