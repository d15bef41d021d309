//! Graph surfaces `z = f(x, y)` and their induced Riemannian geometry.
//!
//! The metric of a graph surface is `g_ij = δ_ij + f_i f_j`, and its
//! Christoffel symbols of the second kind reduce to
//! `Γ^k_ij = f_k f_ij / (1 + |∇f|²)`. Both are evaluated from the gradient and
//! Hessian of `f`, which the built-in surfaces supply in closed form.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Step for central finite-difference gradients of custom surfaces.
pub const FD_STEP: f64 = 1e-5;

/// Step for second differences of custom surfaces that only provide `f`.
///
/// A second difference loses roughly `eps / h²` to round-off, so it needs a
/// larger step than the gradient does.
pub const FD_STEP_SECOND: f64 = 1e-4;

pub type HeightFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;
pub type HessianFn = Arc<dyn Fn(f64, f64) -> [[f64; 2]; 2] + Send + Sync>;

/// A point of the chart `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChartPoint {
    pub x: f64,
    pub y: f64,
}

impl ChartPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        ChartPoint { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Euclidean distance in the chart plane.
    pub fn distance(&self, other: &ChartPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A user-supplied surface. Missing derivative handles fall back to central
/// finite differences.
#[derive(Clone)]
pub struct CustomSurface {
    pub name: String,
    pub height: HeightFn,
    pub gradient: Option<GradientFn>,
    pub hessian: Option<HessianFn>,
}

impl fmt::Debug for CustomSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSurface")
            .field("name", &self.name)
            .field("gradient", &self.gradient.is_some())
            .field("hessian", &self.hessian.is_some())
            .finish()
    }
}

/// The height function defining the surface.
#[derive(Debug, Clone)]
pub enum SurfaceSpec {
    /// Elliptic paraboloid `(x² + y²) / 30`.
    TypeI,
    /// Hyperbolic paraboloid `(x² − y²) / 30`.
    TypeII,
    /// `sin(x/3) + cos(y/3)`, mixed curvature.
    TypeIII,
    Custom(CustomSurface),
}

impl SurfaceSpec {
    /// The plane `f ≡ 0` with exact (zero) derivatives.
    pub fn flat() -> Self {
        SurfaceSpec::Custom(CustomSurface {
            name: "flat".into(),
            height: Arc::new(|_, _| 0.0),
            gradient: Some(Arc::new(|_, _| [0.0, 0.0])),
            hessian: Some(Arc::new(|_, _| [[0.0, 0.0], [0.0, 0.0]])),
        })
    }

    /// A custom surface known only through its height function.
    pub fn custom<F>(name: impl Into<String>, height: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        SurfaceSpec::Custom(CustomSurface {
            name: name.into(),
            height: Arc::new(height),
            gradient: None,
            hessian: None,
        })
    }

    /// Short identifier used in configs and reports.
    pub fn name(&self) -> &str {
        match self {
            SurfaceSpec::TypeI => "type1",
            SurfaceSpec::TypeII => "type2",
            SurfaceSpec::TypeIII => "type3",
            SurfaceSpec::Custom(c) => &c.name,
        }
    }

    fn raw_height(&self, x: f64, y: f64) -> f64 {
        match self {
            SurfaceSpec::TypeI => (x * x + y * y) / 30.0,
            SurfaceSpec::TypeII => (x * x - y * y) / 30.0,
            SurfaceSpec::TypeIII => (x / 3.0).sin() + (y / 3.0).cos(),
            SurfaceSpec::Custom(c) => (c.height)(x, y),
        }
    }

    fn raw_gradient(&self, x: f64, y: f64) -> [f64; 2] {
        match self {
            SurfaceSpec::TypeI => [x / 15.0, y / 15.0],
            SurfaceSpec::TypeII => [x / 15.0, -y / 15.0],
            SurfaceSpec::TypeIII => [(x / 3.0).cos() / 3.0, -(y / 3.0).sin() / 3.0],
            SurfaceSpec::Custom(c) => match &c.gradient {
                Some(grad) => grad(x, y),
                None => {
                    let h = FD_STEP;
                    let f = &c.height;
                    [
                        (f(x + h, y) - f(x - h, y)) / (2.0 * h),
                        (f(x, y + h) - f(x, y - h)) / (2.0 * h),
                    ]
                }
            },
        }
    }

    fn raw_hessian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        match self {
            SurfaceSpec::TypeI => [[1.0 / 15.0, 0.0], [0.0, 1.0 / 15.0]],
            SurfaceSpec::TypeII => [[1.0 / 15.0, 0.0], [0.0, -1.0 / 15.0]],
            SurfaceSpec::TypeIII => [
                [-(x / 3.0).sin() / 9.0, 0.0],
                [0.0, -(y / 3.0).cos() / 9.0],
            ],
            SurfaceSpec::Custom(c) => match (&c.hessian, &c.gradient) {
                (Some(hess), _) => hess(x, y),
                (None, Some(grad)) => {
                    let h = FD_STEP;
                    let (gxp, gxm) = (grad(x + h, y), grad(x - h, y));
                    let (gyp, gym) = (grad(x, y + h), grad(x, y - h));
                    let fxx = (gxp[0] - gxm[0]) / (2.0 * h);
                    let fyy = (gyp[1] - gym[1]) / (2.0 * h);
                    // average the two mixed estimates so the result stays symmetric
                    let fxy = 0.5 * ((gxp[1] - gxm[1]) + (gyp[0] - gym[0])) / (2.0 * h);
                    [[fxx, fxy], [fxy, fyy]]
                }
                (None, None) => {
                    let h = FD_STEP_SECOND;
                    let f = &c.height;
                    let f0 = f(x, y);
                    let fxx = (f(x + h, y) - 2.0 * f0 + f(x - h, y)) / (h * h);
                    let fyy = (f(x, y + h) - 2.0 * f0 + f(x, y - h)) / (h * h);
                    let fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h)
                        + f(x - h, y - h))
                        / (4.0 * h * h);
                    [[fxx, fxy], [fxy, fyy]]
                }
            },
        }
    }

    /// Gradient `(f_x, f_y)` at `p`.
    pub fn gradient(&self, p: ChartPoint) -> Result<[f64; 2]> {
        let g = self.raw_gradient(p.x, p.y);
        check_finite(p, &g)?;
        Ok(g)
    }

    /// Hessian `[[f_xx, f_xy], [f_xy, f_yy]]` at `p`.
    pub fn hessian(&self, p: ChartPoint) -> Result<[[f64; 2]; 2]> {
        let h = self.raw_hessian(p.x, p.y);
        check_finite(p, &[h[0][0], h[0][1], h[1][0], h[1][1]])?;
        Ok(h)
    }
}

fn check_finite(p: ChartPoint, values: &[f64]) -> Result<()> {
    if p.is_finite() && values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Evaluation { x: p.x, y: p.y })
    }
}

/// Induced metric at one chart point. `g21 = g12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl MetricTensor {
    pub const IDENTITY: MetricTensor = MetricTensor {
        g11: 1.0,
        g12: 0.0,
        g22: 1.0,
    };

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.g11, self.g12], [self.g12, self.g22]]
    }

    pub fn inverse(&self) -> [[f64; 2]; 2] {
        let det = self.det();
        [
            [self.g22 / det, -self.g12 / det],
            [-self.g12 / det, self.g11 / det],
        ]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.g11 > 0.0 && self.det() > 0.0
    }
}

/// `gamma[k][i][j]` = Γ^k_ij, coordinates indexed `0 = x`, `1 = y`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChristoffelSymbols {
    pub gamma: [[[f64; 2]; 2]; 2],
}

impl ChristoffelSymbols {
    /// `Γ^k_ij u^i u^j` for each `k`.
    pub fn contract(&self, u: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (k, slot) in out.iter_mut().enumerate() {
            let g = &self.gamma[k];
            *slot = g[0][0] * u[0] * u[0] + 2.0 * g[0][1] * u[0] * u[1] + g[1][1] * u[1] * u[1];
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma
            .iter()
            .flatten()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

pub fn height(spec: &SurfaceSpec, p: ChartPoint) -> Result<f64> {
    let z = spec.raw_height(p.x, p.y);
    check_finite(p, &[z])?;
    Ok(z)
}

pub fn metric_at(spec: &SurfaceSpec, p: ChartPoint) -> Result<MetricTensor> {
    let [fx, fy] = spec.gradient(p)?;
    Ok(MetricTensor {
        g11: 1.0 + fx * fx,
        g12: fx * fy,
        g22: 1.0 + fy * fy,
    })
}

pub fn christoffel_at(spec: &SurfaceSpec, p: ChartPoint) -> Result<ChristoffelSymbols> {
    let grad = spec.gradient(p)?;
    let hess = spec.hessian(p)?;
    let denom = 1.0 + grad[0] * grad[0] + grad[1] * grad[1];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for (k, plane) in gamma.iter_mut().enumerate() {
        for (i, row) in plane.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = grad[k] * hess[i][j] / denom;
            }
        }
    }
    Ok(ChristoffelSymbols { gamma })
}

/// `uᵀ g v`.
pub fn inner(g: &MetricTensor, u: [f64; 2], v: [f64; 2]) -> f64 {
    g.g11 * u[0] * v[0] + g.g12 * (u[0] * v[1] + u[1] * v[0]) + g.g22 * u[1] * v[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUILTINS: [SurfaceSpec; 3] = [SurfaceSpec::TypeI, SurfaceSpec::TypeII, SurfaceSpec::TypeIII];

    #[test]
    fn heights() {
        let o = ChartPoint::new(0.0, 0.0);
        assert_eq!(height(&SurfaceSpec::TypeI, o).unwrap(), 0.0);
        assert!((height(&SurfaceSpec::TypeI, ChartPoint::new(30.0, 0.0)).unwrap() - 30.0).abs() < 1e-12);
        let z3 = height(&SurfaceSpec::TypeIII, o).unwrap();
        assert!((z3 - (0.0_f64.sin() + 0.0_f64.cos())).abs() < 1e-15);
        assert_eq!(z3, 1.0);
    }

    #[test]
    fn non_finite_height_is_an_error() {
        let s = SurfaceSpec::custom("log", |x: f64, _| x.ln());
        let err = height(&s, ChartPoint::new(-1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Evaluation { .. }));
    }

    // g_ij from embedded tangent vectors (1, 0, f_x) and (0, 1, f_y)
    fn embedded_metric(spec: &SurfaceSpec, p: ChartPoint) -> [f64; 3] {
        let h = 1e-6;
        let f = |x, y| height(spec, ChartPoint::new(x, y)).unwrap();
        let ex = [1.0, 0.0, (f(p.x + h, p.y) - f(p.x - h, p.y)) / (2.0 * h)];
        let ey = [0.0, 1.0, (f(p.x, p.y + h) - f(p.x, p.y - h)) / (2.0 * h)];
        let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        [dot(ex, ex), dot(ex, ey), dot(ey, ey)]
    }

    #[test]
    fn metric_examples() {
        let g = metric_at(&SurfaceSpec::flat(), ChartPoint::new(3.0, -7.0)).unwrap();
        assert_eq!(g, MetricTensor::IDENTITY);

        let p = ChartPoint::new(15.0, 0.0);
        let g = metric_at(&SurfaceSpec::TypeI, p).unwrap();
        let [o11, o12, o22] = embedded_metric(&SurfaceSpec::TypeI, p);
        assert!((g.g11 - 2.0).abs() < 1e-12 && (o11 - 2.0).abs() < 1e-8);
        assert!(g.g12.abs() < 1e-12 && o12.abs() < 1e-8);
        assert!((g.g22 - 1.0).abs() < 1e-12 && (o22 - 1.0).abs() < 1e-8);

        let p = ChartPoint::new(0.0, 15.0);
        let g = metric_at(&SurfaceSpec::TypeII, p).unwrap();
        let [o11, o12, o22] = embedded_metric(&SurfaceSpec::TypeII, p);
        assert!((g.g11 - 1.0).abs() < 1e-12 && (o11 - 1.0).abs() < 1e-8);
        assert!(g.g12.abs() < 1e-12 && o12.abs() < 1e-8);
        assert!((g.g22 - 2.0).abs() < 1e-12 && (o22 - 2.0).abs() < 1e-8);
    }

    #[test]
    fn christoffel_examples() {
        let flat = christoffel_at(&SurfaceSpec::flat(), ChartPoint::new(4.0, 2.0)).unwrap();
        assert_eq!(flat.max_abs(), 0.0);
        let origin = christoffel_at(&SurfaceSpec::TypeI, ChartPoint::new(0.0, 0.0)).unwrap();
        assert_eq!(origin.max_abs(), 0.0);
        let c = christoffel_at(&SurfaceSpec::TypeI, ChartPoint::new(15.0, 0.0)).unwrap();
        assert!((c.gamma[0][0][0] - 1.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn christoffel_lower_symmetry() {
        for spec in &BUILTINS {
            let c = christoffel_at(spec, ChartPoint::new(7.3, -11.1)).unwrap();
            for k in 0..2 {
                assert_eq!(c.gamma[k][0][1], c.gamma[k][1][0]);
            }
        }
    }

    #[test]
    fn custom_fallbacks_track_analytic_derivatives() {
        let custom = SurfaceSpec::custom("bowl", |x, y| (x * x + y * y) / 30.0);
        for &(x, y) in &[(0.0, 0.0), (15.0, 0.0), (-40.0, 22.0)] {
            let p = ChartPoint::new(x, y);
            let a = christoffel_at(&SurfaceSpec::TypeI, p).unwrap();
            let b = christoffel_at(&custom, p).unwrap();
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((a.gamma[k][i][j] - b.gamma[k][i][j]).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn inner_examples() {
        let id = MetricTensor::IDENTITY;
        assert_eq!(inner(&id, [1.0, 0.0], [0.0, 1.0]), 0.0);
        assert_eq!(inner(&id, [3.0, 4.0], [3.0, 4.0]), 25.0);
        let g = MetricTensor { g11: 2.0, g12: 0.0, g22: 1.0 };
        assert_eq!(inner(&g, [1.0, 0.0], [1.0, 0.0]), 2.0);
    }
}
