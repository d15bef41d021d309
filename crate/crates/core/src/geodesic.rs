//! Geodesics as a first-order system in `(x, y, ẋ, ẏ)`, integrated with
//! classical fixed-step RK4.

use crate::error::{Error, Result};
use crate::manifold::{christoffel_at, inner, metric_at, ChartPoint, SurfaceSpec};

/// Default integrator step.
pub const DEFAULT_STEP: f64 = 0.01;

/// `[x, y, ẋ, ẏ]` in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeodesicState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl GeodesicState {
    pub const fn new(x: f64, y: f64, vx: f64, vy: f64) -> Self {
        GeodesicState { x, y, vx, vy }
    }

    pub fn position(&self) -> ChartPoint {
        ChartPoint::new(self.x, self.y)
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.vx, self.vy]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.vx.is_finite() && self.vy.is_finite()
    }

    /// Same point, velocity reversed.
    pub fn reversed(&self) -> Self {
        GeodesicState::new(self.x, self.y, -self.vx, -self.vy)
    }

    fn axpy(&self, a: f64, d: &GeodesicState) -> GeodesicState {
        GeodesicState::new(
            self.x + a * d.x,
            self.y + a * d.y,
            self.vx + a * d.vx,
            self.vy + a * d.vy,
        )
    }
}

/// Uniformly sampled solution of the geodesic system.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<(f64, GeodesicState)>,
    step: f64,
}

impl Trajectory {
    pub fn samples(&self) -> &[(f64, GeodesicState)] {
        &self.samples
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn first(&self) -> &GeodesicState {
        &self.samples[0].1
    }

    pub fn last(&self) -> &GeodesicState {
        &self.samples[self.samples.len() - 1].1
    }

    pub fn final_time(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// States at every `stride`-th sample, starting with the first.
    pub fn subsample(&self, stride: usize) -> Vec<(f64, GeodesicState)> {
        self.samples.iter().step_by(stride.max(1)).copied().collect()
    }
}

/// A leader trajectory together with its communication schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderTrajectory {
    pub trajectory: Trajectory,
    pub period: f64,
    /// Integrator steps per communication period.
    pub stride: usize,
}

impl LeaderTrajectory {
    /// States at `k · period` for `k = 0 ..= n_periods`.
    pub fn communication_states(&self) -> Vec<(f64, GeodesicState)> {
        self.trajectory.subsample(self.stride)
    }
}

/// Time derivative `(ẋ, ẏ, ẍ, ÿ)` of the geodesic system.
pub fn geodesic_rhs(spec: &SurfaceSpec, s: &GeodesicState) -> Result<GeodesicState> {
    let gamma = christoffel_at(spec, s.position())?;
    let [qx, qy] = gamma.contract(s.velocity());
    Ok(GeodesicState::new(s.vx, s.vy, -qx, -qy))
}

fn rk4_step(spec: &SurfaceSpec, s: &GeodesicState, h: f64, t: f64) -> Result<GeodesicState> {
    let stage = |state: GeodesicState| -> Result<GeodesicState> {
        if !state.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        let d = geodesic_rhs(spec, &state).map_err(|_| Error::NonFiniteState { t })?;
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::NonFiniteState { t })
        }
    };
    let k1 = stage(*s)?;
    let k2 = stage(s.axpy(0.5 * h, &k1))?;
    let k3 = stage(s.axpy(0.5 * h, &k2))?;
    let k4 = stage(s.axpy(h, &k3))?;
    let next = GeodesicState::new(
        s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        s.vx + h / 6.0 * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx),
        s.vy + h / 6.0 * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy),
    );
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFiniteState { t: t + h })
    }
}

/// Take exactly `n_steps` RK4 steps of size `h`.
pub fn integrate_steps(
    spec: &SurfaceSpec,
    s0: GeodesicState,
    n_steps: usize,
    h: f64,
) -> Result<Trajectory> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if !s0.is_finite() {
        return Err(Error::NonFiniteState { t: 0.0 });
    }
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push((0.0, s0));
    let mut state = s0;
    for i in 0..n_steps {
        let t = i as f64 * h;
        state = rk4_step(spec, &state, h, t)?;
        samples.push(((i + 1) as f64 * h, state));
    }
    Ok(Trajectory { samples, step: h })
}

/// Integrate over `duration`, sampling at `0, h, 2h, …`.
pub fn integrate(
    spec: &SurfaceSpec,
    s0: GeodesicState,
    duration: f64,
    h: f64,
) -> Result<Trajectory> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if !(h > 0.0 && h <= duration) {
        return Err(Error::InvalidArgument(format!(
            "step must lie in (0, duration], got {h}"
        )));
    }
    let n_steps = (duration / h).round() as usize;
    integrate_steps(spec, s0, n_steps, h)
}

/// Number of `h` steps in one `period`, if `h` divides it.
pub fn steps_per_period(period: f64, h: f64) -> Option<usize> {
    if !(period > 0.0 && h > 0.0) {
        return None;
    }
    let n = (period / h).round();
    if n >= 1.0 && (period - n * h).abs() <= 1e-12 {
        Some(n as usize)
    } else {
        None
    }
}

pub fn leader_trajectory(
    spec: &SurfaceSpec,
    s0: GeodesicState,
    n_periods: usize,
    period: f64,
    h: f64,
) -> Result<LeaderTrajectory> {
    let stride = steps_per_period(period, h).ok_or_else(|| {
        Error::InvalidArgument(format!("step {h} does not divide period {period}"))
    })?;
    let trajectory = integrate_steps(spec, s0, stride * n_periods, h)?;
    Ok(LeaderTrajectory {
        trajectory,
        period,
        stride,
    })
}

/// `g(γ̇, γ̇)` at a state.
pub fn speed_squared(spec: &SurfaceSpec, s: &GeodesicState) -> Result<f64> {
    let g = metric_at(spec, s.position())?;
    Ok(inner(&g, s.velocity(), s.velocity()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rhs_examples() {
        let d = geodesic_rhs(&SurfaceSpec::flat(), &GeodesicState::new(0.0, 0.0, 1.0, 2.0)).unwrap();
        assert_eq!(d, GeodesicState::new(1.0, 2.0, 0.0, 0.0));

        let d = geodesic_rhs(&SurfaceSpec::TypeI, &GeodesicState::new(0.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(d, GeodesicState::new(1.0, 0.0, 0.0, 0.0));

        let d = geodesic_rhs(&SurfaceSpec::TypeI, &GeodesicState::new(15.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(close(d.vx, -1.0 / 30.0, 1e-15));
        assert_eq!(d.vy, 0.0);
    }

    #[test]
    fn flat_line() {
        let traj = integrate(&SurfaceSpec::flat(), GeodesicState::new(0.0, 0.0, 1.0, 0.0), 5.0, 0.01).unwrap();
        let end = traj.last();
        assert!(close(end.x, 5.0, 1e-9) && close(end.y, 0.0, 1e-9));
        assert!(close(end.vx, 1.0, 1e-9) && close(end.vy, 0.0, 1e-9));
        assert!(traj.final_time() >= 5.0 - 0.005);
    }

    #[test]
    fn paraboloid_symmetry_axis() {
        let traj = integrate(&SurfaceSpec::TypeI, GeodesicState::new(0.0, 0.0, 1.0, 0.0), 5.0, 0.01).unwrap();
        for (_, s) in traj.samples() {
            assert!(s.y.abs() <= 1e-9 && s.vy.abs() <= 1e-9);
        }
    }

    #[test]
    fn uniform_time_grid() {
        let traj = integrate(&SurfaceSpec::TypeIII, GeodesicState::new(30.0, 5.0, 1.0, 0.0), 2.0, 0.1).unwrap();
        assert_eq!(traj.len(), 21);
        for w in traj.samples().windows(2) {
            assert!(close(w[1].0 - w[0].0, 0.1, 1e-12));
        }
    }

    #[test]
    fn bad_arguments() {
        let s = GeodesicState::new(0.0, 0.0, 1.0, 0.0);
        assert!(integrate(&SurfaceSpec::TypeI, s, 0.0, 0.01).is_err());
        assert!(integrate(&SurfaceSpec::TypeI, s, 1.0, 2.0).is_err());
        assert!(integrate(&SurfaceSpec::TypeI, s, 1.0, -0.1).is_err());
        assert!(leader_trajectory(&SurfaceSpec::TypeI, s, 3, 1.28, 0.03).is_err());
    }

    #[test]
    fn blow_up_is_reported() {
        // exp(x²) grows fast enough that the Christoffel terms overflow
        let spec = SurfaceSpec::custom("spike", |x: f64, _| (x * x * x * x).exp());
        let err = integrate(&spec, GeodesicState::new(20.0, 0.0, 1.0, 0.0), 1.0, 0.01).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { .. }));
    }

    #[test]
    fn period_divisibility() {
        assert_eq!(steps_per_period(1.28, 0.01), Some(128));
        assert_eq!(steps_per_period(1.0, 0.25), Some(4));
        assert_eq!(steps_per_period(1.28, 0.03), None);
    }

    #[test]
    fn leader_schedule_includes_both_ends() {
        let s0 = GeodesicState::new(50.0, -10.0, -(std::f64::consts::PI / 36.0).cos(), (std::f64::consts::PI / 36.0).sin());
        let lt = leader_trajectory(&SurfaceSpec::TypeI, s0, 36, 1.28, 0.01).unwrap();
        let comm = lt.communication_states();
        assert_eq!(comm.len(), 37);
        assert_eq!(comm[0].1, s0);
        assert!(close(comm[36].0, 36.0 * 1.28, 1e-9));
    }
}
