//! Reference computations shared by the integration tests and the
//! acceptance runner. Everything here is written against definitions, not
//! against the crate's own shortcuts.
#![allow(dead_code)]

use formation_koopman::geodesic::{GeodesicState, Trajectory};
use formation_koopman::manifold::{metric_at, ChartPoint, SurfaceSpec};
use formation_koopman::observables::MeasurementVector;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BUILTINS: [SurfaceSpec; 3] = [SurfaceSpec::TypeI, SurfaceSpec::TypeII, SurfaceSpec::TypeIII];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(seed: u64, n: usize, half_width: f64) -> Vec<ChartPoint> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            ChartPoint::new(
                r.gen_range(-half_width..=half_width),
                r.gen_range(-half_width..=half_width),
            )
        })
        .collect()
}

fn metric_matrix(spec: &SurfaceSpec, x: f64, y: f64) -> [[f64; 2]; 2] {
    metric_at(spec, ChartPoint::new(x, y)).unwrap().as_matrix()
}

/// Γ^k_ij from ½ g^{kd} (∂_i g_dj + ∂_j g_di − ∂_d g_ij), with the metric
/// derivatives taken by central differences of step `h`.
pub fn fd_christoffel(spec: &SurfaceSpec, p: ChartPoint, h: f64) -> [[[f64; 2]; 2]; 2] {
    // dg[c][a][b] = ∂_c g_ab
    let mut dg = [[[0.0; 2]; 2]; 2];
    for (c, plane) in dg.iter_mut().enumerate() {
        let (ex, ey) = if c == 0 { (h, 0.0) } else { (0.0, h) };
        let plus = metric_matrix(spec, p.x + ex, p.y + ey);
        let minus = metric_matrix(spec, p.x - ex, p.y - ey);
        for a in 0..2 {
            for b in 0..2 {
                plane[a][b] = (plus[a][b] - minus[a][b]) / (2.0 * h);
            }
        }
    }
    let g = metric_matrix(spec, p.x, p.y);
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let ginv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut s = 0.0;
                for d in 0..2 {
                    s += ginv[k][d] * (dg[i][d][j] + dg[j][d][i] - dg[d][i][j]);
                }
                gamma[k][i][j] = 0.5 * s;
            }
        }
    }
    gamma
}

/// Riemannian speed √g(γ̇, γ̇) at a state.
pub fn speed(spec: &SurfaceSpec, s: &GeodesicState) -> f64 {
    let g = metric_matrix(spec, s.x, s.y);
    let (u, v) = (s.vx, s.vy);
    (g[0][0] * u * u + 2.0 * g[0][1] * u * v + g[1][1] * v * v).sqrt()
}

/// Trapezoidal sum of √g(γ̇, γ̇)·h along the samples.
pub fn riemannian_length(spec: &SurfaceSpec, traj: &Trajectory) -> f64 {
    traj.samples()
        .windows(2)
        .map(|w| {
            let dt = w[1].0 - w[0].0;
            0.5 * dt * (speed(spec, &w[0].1) + speed(spec, &w[1].1))
        })
        .sum()
}

/// Least-squares K from the normal equations, K = Y Xᵀ (X Xᵀ)⁻¹.
pub fn normal_equation_fit(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = x * x.transpose();
    let inv = gram.try_inverse().expect("well-conditioned instance");
    y * x.transpose() * inv
}

/// Largest residual over the four Moore–Penrose identities.
pub fn moore_penrose_residual(a: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    let r1 = (a * p * a - a).abs().max();
    let r2 = (p * a * p - p).abs().max();
    let ap = a * p;
    let pa = p * a;
    let r3 = (&ap - ap.transpose()).abs().max();
    let r4 = (&pa - pa.transpose()).abs().max();
    r1.max(r2).max(r3).max(r4)
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| r.gen_range(-1.0..1.0))
}

/// Rank-deficient matrix built as a product of thin factors.
pub fn random_low_rank(r: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> DMatrix<f64> {
    random_matrix(r, rows, rank) * random_matrix(r, rank, cols)
}

/// `x_0, A x_0, A² x_0, …` as measurement vectors.
pub fn linear_series(a: &DMatrix<f64>, x0: &[f64], len: usize) -> Vec<MeasurementVector> {
    let mut cur = nalgebra::DVector::from_column_slice(x0);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(MeasurementVector::new(cur.iter().copied().collect()));
        cur = a * cur;
    }
    out
}

pub fn rotation(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}
