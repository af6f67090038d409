//! Problem definitions: diffusion tensor, load, Dirichlet datum, and
//! optional exact fields for error studies.

use thiserror::Error;

pub type ScalarField = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type VectorField = Box<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;
pub type TensorField = Box<dyn Fn(f64, f64) -> [[f64; 2]; 2] + Send + Sync>;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("exact data inconsistent at ({x}, {y}): {message}")]
    InconsistentData { x: f64, y: f64, message: String },
}

/// The elliptic model problem `c σ = ∇u`, `−div σ = f` in Ω, `u = g` on ∂Ω.
pub struct ProblemDefinition {
    pub name: String,
    /// Symmetric positive-definite diffusion tensor.
    pub c: TensorField,
    pub f: ScalarField,
    pub g: ScalarField,
    pub exact_u: Option<ScalarField>,
    /// Exact flux `σ = c⁻¹ ∇u`.
    pub exact_sigma: Option<VectorField>,
}

impl ProblemDefinition {
    /// The built-in manufactured problem on the unit square:
    /// `u = sin(πx) sin(πy)` with `c = (1 + x²y²)·I`, homogeneous Dirichlet
    /// data, and the load derived in closed form.
    pub fn manufactured_sine() -> Self {
        use std::f64::consts::PI;
        let s = |x: f64, y: f64| 1.0 + x * x * y * y;
        ProblemDefinition {
            name: "manufactured-sine".into(),
            c: Box::new(move |x, y| {
                let v = s(x, y);
                [[v, 0.0], [0.0, v]]
            }),
            // f = −div(∇u/s) = −Δu/s + (∇u·∇s)/s²  with Δu = −2π²u
            f: Box::new(move |x, y| {
                let sv = s(x, y);
                let u = (PI * x).sin() * (PI * y).sin();
                let ux = PI * (PI * x).cos() * (PI * y).sin();
                let uy = PI * (PI * x).sin() * (PI * y).cos();
                let sx = 2.0 * x * y * y;
                let sy = 2.0 * x * x * y;
                2.0 * PI * PI * u / sv + (ux * sx + uy * sy) / (sv * sv)
            }),
            g: Box::new(|_, _| 0.0),
            exact_u: Some(Box::new(|x, y| (PI * x).sin() * (PI * y).sin())),
            exact_sigma: Some(Box::new(move |x, y| {
                let sv = s(x, y);
                [
                    PI * (PI * x).cos() * (PI * y).sin() / sv,
                    PI * (PI * x).sin() * (PI * y).cos() / sv,
                ]
            })),
        }
    }

    /// Constant-coefficient problem with a global polynomial solution of the
    /// given degree (≤ 3); solutions of degree ≤ k+1 must be reproduced
    /// exactly by the schemes.
    pub fn polynomial(degree: usize) -> Self {
        assert!(degree <= 3, "polynomial problems defined up to degree 3");
        let u: ScalarField = match degree {
            0 => Box::new(|_, _| 1.0),
            1 => Box::new(|x, y| 0.75 + 2.0 * x - 3.0 * y),
            2 => Box::new(|x, y| x * x + 3.0 * x * y + 2.0 * y * y - x + 0.5 * y),
            _ => Box::new(|x, y| x.powi(3) + x * x * y - y.powi(3) + 2.0 * x * y),
        };
        let grad: VectorField = match degree {
            0 => Box::new(|_, _| [0.0, 0.0]),
            1 => Box::new(|_, _| [2.0, -3.0]),
            2 => Box::new(|x, y| [2.0 * x + 3.0 * y - 1.0, 3.0 * x + 4.0 * y + 0.5]),
            _ => Box::new(|x, y| {
                [
                    3.0 * x * x + 2.0 * x * y + 2.0 * y,
                    x * x - 3.0 * y * y + 2.0 * x,
                ]
            }),
        };
        let f: ScalarField = match degree {
            0 | 1 => Box::new(|_, _| 0.0),
            2 => Box::new(|_, _| -6.0),
            _ => Box::new(|x, y| -6.0 * x + 4.0 * y),
        };
        let g: ScalarField = match degree {
            0 => Box::new(|_, _| 1.0),
            1 => Box::new(|x, y| 0.75 + 2.0 * x - 3.0 * y),
            2 => Box::new(|x, y| x * x + 3.0 * x * y + 2.0 * y * y - x + 0.5 * y),
            _ => Box::new(|x, y| x.powi(3) + x * x * y - y.powi(3) + 2.0 * x * y),
        };
        ProblemDefinition {
            name: format!("polynomial-{degree}"),
            c: Box::new(|_, _| [[1.0, 0.0], [0.0, 1.0]]),
            f,
            g,
            exact_u: Some(u),
            exact_sigma: Some(grad),
        }
    }

    /// Homogeneous problem: `f = 0`, `g = 0`, identity coefficient.
    pub fn homogeneous() -> Self {
        ProblemDefinition {
            name: "homogeneous".into(),
            c: Box::new(|_, _| [[1.0, 0.0], [0.0, 1.0]]),
            f: Box::new(|_, _| 0.0),
            g: Box::new(|_, _| 0.0),
            exact_u: Some(Box::new(|_, _| 0.0)),
            exact_sigma: Some(Box::new(|_, _| [0.0, 0.0])),
        }
    }

    /// Spot-check the closed-form data against finite differences at
    /// `npoints` quasi-random interior points: `c σ` must match `∇u` and
    /// `f` must match `−div σ` (central differences, step `1e-4`).
    pub fn validate_consistency(&self, npoints: usize) -> Result<(), ProblemError> {
        let (Some(exact_u), Some(exact_sigma)) = (&self.exact_u, &self.exact_sigma) else {
            return Ok(());
        };
        let step = 1e-4;
        // additive lattice sequence, keeps points strictly interior
        let a1 = 0.754_877_666_246_692_7_f64;
        let a2 = 0.569_840_290_998_053_2_f64;
        for i in 0..npoints {
            let x = 0.05 + 0.9 * (0.5 + a1 * (i as f64 + 1.0)).fract();
            let y = 0.05 + 0.9 * (0.5 + a2 * (i as f64 + 1.0)).fract();

            let du = [
                (exact_u(x + step, y) - exact_u(x - step, y)) / (2.0 * step),
                (exact_u(x, y + step) - exact_u(x, y - step)) / (2.0 * step),
            ];
            let c = (self.c)(x, y);
            let sigma = exact_sigma(x, y);
            let c_sigma = [
                c[0][0] * sigma[0] + c[0][1] * sigma[1],
                c[1][0] * sigma[0] + c[1][1] * sigma[1],
            ];
            for d in 0..2 {
                if (c_sigma[d] - du[d]).abs() > 1e-5 * (1.0 + du[d].abs()) {
                    return Err(ProblemError::InconsistentData {
                        x,
                        y,
                        message: format!(
                            "component {d}: (c σ) = {} but ∇u = {}",
                            c_sigma[d], du[d]
                        ),
                    });
                }
            }

            let div = (exact_sigma(x + step, y)[0] - exact_sigma(x - step, y)[0]) / (2.0 * step)
                + (exact_sigma(x, y + step)[1] - exact_sigma(x, y - step)[1]) / (2.0 * step);
            let fv = (self.f)(x, y);
            if (fv + div).abs() > 1e-5 * (1.0 + fv.abs()) {
                return Err(ProblemError::InconsistentData {
                    x,
                    y,
                    message: format!("f = {fv} but −div σ = {}", -div),
                });
            }
        }
        Ok(())
    }
}
