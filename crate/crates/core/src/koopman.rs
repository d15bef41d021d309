//! Least-squares Koopman approximation over lifted snapshot pairs and the
//! data-streaming prediction loop.
//!
//! `K = Y X†` minimizes `‖Y − K X‖_F`. Each streaming iteration refits `K`
//! from every pair seen so far, predicts the next measurement from the most
//! recent one, then appends the actual measurement as a new pair.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::observables::MeasurementVector;

/// Relative singular-value cutoff used when none is given:
/// `1e-10 · max(k, m)` times the largest singular value.
pub fn default_rtol(k: usize, m: usize) -> f64 {
    1e-10 * k.max(m).max(1) as f64
}

const MAX_SWEEPS: usize = 100;

/// Thin singular value decomposition `A = U diag(σ) Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Columns are rotated pairwise until every pair is orthogonal to working
/// precision; the column norms are then the singular values. Rank-deficient
/// inputs leave columns of round-off size, which the pseudoinverse cutoff
/// discards.
pub fn svd(a: &DMatrix<f64>) -> Result<Svd> {
    let (rows, cols) = a.shape();
    if rows < cols {
        let t = svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let mut u = a.clone();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    // columns below this squared norm are numerically zero
    let negligible = (f64::EPSILON * a.norm()).powi(2);
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let alpha = u.column(i).norm_squared();
                let beta = u.column(j).norm_squared();
                let gamma = u.column(i).dot(&u.column(j));
                if alpha <= negligible || beta <= negligible || gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut u, &mut v] {
                    for r in 0..m.nrows() {
                        let (xi, xj) = (m[(r, i)], m[(r, j)]);
                        m[(r, i)] = c * xi - s * xj;
                        m[(r, j)] = s * xi + c * xj;
                    }
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::SvdFailure);
    }
    let mut singular_values = Vec::with_capacity(cols);
    for j in 0..cols {
        let norm = u.column(j).norm();
        if norm > 0.0 {
            u.column_mut(j).scale_mut(1.0 / norm);
        }
        singular_values.push(norm);
    }
    Ok(Svd {
        u,
        singular_values,
        v,
    })
}

/// Moore–Penrose pseudoinverse through a truncated SVD. Singular values at
/// or below `rtol · σ_max` are treated as zero.
pub fn pseudoinverse(m: &DMatrix<f64>, rtol: f64) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("pseudoinverse of a non-finite matrix".into()));
    }
    if rows == 0 || cols == 0 {
        return Ok(DMatrix::zeros(cols, rows));
    }
    let Svd {
        u,
        singular_values,
        v,
    } = svd(m)?;
    let s_max = singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let cutoff = rtol * s_max;

    let mut out = DMatrix::zeros(cols, rows);
    for (i, &s) in singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            // out += v_i (1/σ_i) u_iᵀ
            out += (v.column(i) * u.column(i).transpose()) / s;
        }
    }
    Ok(out)
}

/// Paired lifted snapshots `X = [x_1 … x_m]`, `Y = [y_1 … y_m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotBuffer {
    k: usize,
    x: Vec<DVector<f64>>,
    y: Vec<DVector<f64>>,
}

impl SnapshotBuffer {
    pub fn new(k: usize) -> Self {
        SnapshotBuffer {
            k,
            x: Vec::new(),
            y: Vec::new(),
        }
    }

    /// Pairs `(z_t, z_{t+1})` from a measurement sequence.
    pub fn from_series(series: &[MeasurementVector]) -> Result<Self> {
        let first = series
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty measurement series".into()))?;
        let mut buf = SnapshotBuffer::new(first.len());
        for w in series.windows(2) {
            buf.push_pair(&w[0], &w[1])?;
        }
        Ok(buf)
    }

    pub fn push_pair(&mut self, x: &MeasurementVector, y: &MeasurementVector) -> Result<()> {
        let x = self.column(x)?;
        let y = self.column(y)?;
        self.x.push(x);
        self.y.push(y);
        Ok(())
    }

    fn column(&self, v: &MeasurementVector) -> Result<DVector<f64>> {
        if v.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                actual: v.len(),
            });
        }
        Ok(DVector::from_column_slice(v.values()))
    }

    /// Lifted dimension.
    pub fn dim(&self) -> usize {
        self.k
    }

    /// Pair count `m`.
    pub fn pairs(&self) -> usize {
        self.x.len()
    }

    pub fn x_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.x)
    }

    pub fn y_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_columns(&self.y)
    }

    /// The most recent successor `y_m`.
    pub fn latest(&self) -> Option<MeasurementVector> {
        self.y
            .last()
            .map(|c| MeasurementVector::new(c.iter().copied().collect()))
    }

    /// Append `(y_m, y_new)`: the new X column is the previous last Y column.
    pub fn stream_step(&mut self, y_new: &MeasurementVector) -> Result<()> {
        let col = self.column(y_new)?;
        let last = self
            .y
            .last()
            .cloned()
            .ok_or_else(|| Error::InvalidArgument("cannot stream into an empty buffer".into()))?;
        self.x.push(last);
        self.y.push(col);
        Ok(())
    }
}

/// Finite `k × k` approximation of the Koopman operator.
#[derive(Debug, Clone, PartialEq)]
pub struct KoopmanMatrix(pub DMatrix<f64>);

impl KoopmanMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

pub fn fit(buffer: &SnapshotBuffer, rtol: f64) -> Result<KoopmanMatrix> {
    if buffer.pairs() == 0 {
        return Err(Error::InvalidArgument("fit needs at least one snapshot pair".into()));
    }
    let x = buffer.x_matrix();
    let y = buffer.y_matrix();
    let k = &y * pseudoinverse(&x, rtol)?;
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::SvdFailure);
    }
    Ok(KoopmanMatrix(k))
}

/// `fit` with [`default_rtol`].
pub fn fit_default(buffer: &SnapshotBuffer) -> Result<KoopmanMatrix> {
    fit(buffer, default_rtol(buffer.dim(), buffer.pairs()))
}

pub fn predict(k: &KoopmanMatrix, y: &MeasurementVector) -> Result<MeasurementVector> {
    if y.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            actual: y.len(),
        });
    }
    let out = k.matrix() * DVector::from_column_slice(y.values());
    Ok(MeasurementVector::new(out.iter().copied().collect()))
}

/// One iteration of the streaming loop.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamStep {
    /// Pair count the prediction was fitted on.
    pub pairs: usize,
    pub prediction: MeasurementVector,
    pub actual: MeasurementVector,
}

/// Run the streaming loop until the buffer holds `total_pairs` pairs.
///
/// `oracle` receives each prediction and returns the actual next
/// measurement, so callers can let the prediction influence what is
/// measured next.
pub fn run_streaming<F>(
    mut buffer: SnapshotBuffer,
    total_pairs: usize,
    mut oracle: F,
) -> Result<(Vec<StreamStep>, SnapshotBuffer)>
where
    F: FnMut(&MeasurementVector) -> Result<MeasurementVector>,
{
    if buffer.pairs() == 0 {
        return Err(Error::InvalidArgument("streaming needs at least one warmup pair".into()));
    }
    let mut steps = Vec::with_capacity(total_pairs.saturating_sub(buffer.pairs()));
    while buffer.pairs() < total_pairs {
        let k = fit_default(&buffer)?;
        let latest = buffer.latest().expect("buffer is non-empty");
        let prediction = predict(&k, &latest)?;
        let actual = oracle(&prediction)?;
        steps.push(StreamStep {
            pairs: buffer.pairs(),
            prediction,
            actual: actual.clone(),
        });
        buffer.stream_step(&actual)?;
    }
    Ok((steps, buffer))
}
