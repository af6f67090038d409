use edg::error_analysis::{error_exactness, l2_error_u, l2_error_sigma};
use edg::local_solver::QuadratureSettings;
use edg::mesh::Mesh;
use edg::problem::ProblemDefinition;
use edg::quadrature::cell_quadrature;
use edg::system::{solve_problem, SolverKind};
use edg::trace_space::{Method, TraceSpace};

fn main() {
    let problem = ProblemDefinition::manufactured_sine();
    let exact_u = problem.exact_u.as_ref().unwrap();
    let exact_s = problem.exact_sigma.as_ref().unwrap();
    // reference norms of the exact fields on a fine mesh
    let mesh = Mesh::uniform_triangular(32);
    let mut nu = 0.0;
    let mut ns = 0.0;
    for cell in &mesh.cells {
        let rule = cell_quadrature(cell, 12).unwrap();
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            nu += w * exact_u(p[0], p[1]).powi(2);
            let s = exact_s(p[0], p[1]);
            ns += w * (s[0] * s[0] + s[1] * s[1]);
        }
    }
    let (nu, ns) = (nu.sqrt(), ns.sqrt());
    println!("|u| = {nu:.6}, |sigma| = {ns:.6}");
    println!("reference rel errors tri: edg k0: n4 (8.076e-2, 3.820e-1) n8 (2.084e-2, 1.966e-1)");
    println!("                          hdg k0: n4 (1.940e-1, 2.775e-1) n8 (4.917e-2, 1.412e-1)");
    println!("reference rel errors quad: edg k0 n4 (2.623e-1, 3.324e-1) hdg k0 n4 (2.722e-1, 3.362e-1)");
    for method in [Method::Edg, Method::Hdg] {
        for n in [4usize, 8] {
            let mesh = Mesh::uniform_triangular(n);
            let ts = TraceSpace::build(&mesh, 0, method);
            let quad = QuadratureSettings::for_degree(0);
            let sol = solve_problem(&mesh, &ts, &problem, &quad, SolverKind::Direct, 1e-12).unwrap();
            let eu = l2_error_u(&mesh, &sol, &|x, y| exact_u(x, y), error_exactness(0));
            let es = l2_error_sigma(&mesh, &sol, &|x, y| exact_s(x, y), error_exactness(0));
            println!("tri  {method} k=0 n={n:2}  rel_u = {:.4e}  rel_sigma = {:.4e}", eu / nu, es / ns);
        }
    }
    for method in [Method::Edg, Method::Hdg] {
        let mesh = Mesh::uniform_quadrilateral(4);
        let ts = TraceSpace::build(&mesh, 0, method);
        let quad = QuadratureSettings::for_degree(0);
        let sol = solve_problem(&mesh, &ts, &problem, &quad, SolverKind::Direct, 1e-12).unwrap();
        let eu = l2_error_u(&mesh, &sol, &|x, y| exact_u(x, y), error_exactness(0));
        let es = l2_error_sigma(&mesh, &sol, &|x, y| exact_s(x, y), error_exactness(0));
        println!("quad {method} k=0 n= 4  rel_u = {:.4e}  rel_sigma = {:.4e}", eu / nu, es / ns);
    }
}
