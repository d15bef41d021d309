//! Ideal column formations.
//!
//! A follower's ideal position at a communication instant is the endpoint of
//! a unit-speed geodesic shot from its leader's position, orthogonal (in the
//! induced metric) to the leader's heading, for parameter time `d`. Unit
//! speed makes the parameter time equal to Riemannian arclength.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::{integrate_steps, GeodesicState, LeaderTrajectory, Trajectory};
use crate::manifold::{inner, metric_at, ChartPoint, SurfaceSpec};

/// Extension length used in the reference scenarios.
pub const DEFAULT_EXTENSION_LENGTH: f64 = 3.57;
/// Communication period used in the reference scenarios.
pub const DEFAULT_PERIOD: f64 = 1.28;

/// Which side of the leader's heading the follower sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Counter-clockwise normal in the chart.
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionSpec {
    /// Riemannian length of the extension.
    pub length: f64,
    pub side: Side,
    /// Time between communications.
    pub period: f64,
}

impl Default for ExtensionSpec {
    fn default() -> Self {
        ExtensionSpec {
            length: DEFAULT_EXTENSION_LENGTH,
            side: Side::Left,
            period: DEFAULT_PERIOD,
        }
    }
}

/// One communication instant of an ideal trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealInstant {
    pub t: f64,
    pub position: ChartPoint,
    /// State of the agent the extension was shot from.
    pub leader_state: GeodesicState,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdealTrajectory {
    pub instants: Vec<IdealInstant>,
}

impl IdealTrajectory {
    pub fn positions(&self) -> Vec<ChartPoint> {
        self.instants.iter().map(|i| i.position).collect()
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }
}

/// Ideal trajectories of a column: `agents[0]` follows the primary leader,
/// `agents[i + 1]` follows `agents[i]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainFormation {
    pub agents: Vec<IdealTrajectory>,
}

/// Unit vector (in `g`) orthogonal to `heading` at `p`, on the requested side.
pub fn orthogonal_direction(
    spec: &SurfaceSpec,
    p: ChartPoint,
    heading: [f64; 2],
    side: Side,
) -> Result<[f64; 2]> {
    let g = metric_at(spec, p)?;
    let hh = inner(&g, heading, heading);
    if !(hh > 1e-12) {
        return Err(Error::DegenerateHeading { norm_sq: hh });
    }
    // Chart rotation by +90°, then remove the g-component along the heading.
    // The removed part is parallel to the heading, so the chart cross product
    // heading × v keeps its positive sign.
    let rot = [-heading[1], heading[0]];
    let c = inner(&g, rot, heading) / hh;
    let mut v = [rot[0] - c * heading[0], rot[1] - c * heading[1]];
    // one re-orthogonalization pass keeps the residual at round-off level
    let c2 = inner(&g, v, heading) / hh;
    v = [v[0] - c2 * heading[0], v[1] - c2 * heading[1]];
    let norm = inner(&g, v, v).sqrt();
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    Ok([sign * v[0] / norm, sign * v[1] / norm])
}

/// Number of integrator steps used for an extension of parameter length `d`
/// with nominal step `h`; the actual step is `d / n ≤ h`.
pub fn extension_steps(length: f64, h: f64) -> usize {
    ((length / h) - 1e-9).ceil().max(1.0) as usize
}

/// The full extension geodesic, parameterized on `[0, ext.length]`.
pub fn extension_geodesic(
    spec: &SurfaceSpec,
    leader: &GeodesicState,
    ext: &ExtensionSpec,
    h: f64,
) -> Result<Trajectory> {
    if !(ext.length > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "extension length must be positive, got {}",
            ext.length
        )));
    }
    let dir = orthogonal_direction(spec, leader.position(), leader.velocity(), ext.side)?;
    let n = extension_steps(ext.length, h);
    let s0 = GeodesicState::new(leader.x, leader.y, dir[0], dir[1]);
    integrate_steps(spec, s0, n, ext.length / n as f64)
}

/// The follower's ideal position for one leader state.
pub fn extension_endpoint(
    spec: &SurfaceSpec,
    leader: &GeodesicState,
    ext: &ExtensionSpec,
    h: f64,
) -> Result<ChartPoint> {
    Ok(extension_geodesic(spec, leader, ext, h)?.last().position())
}

fn ideal_from_states(
    spec: &SurfaceSpec,
    states: &[(f64, GeodesicState)],
    ext: &ExtensionSpec,
    h: f64,
) -> Result<IdealTrajectory> {
    let instants = states
        .iter()
        .map(|&(t, leader_state)| {
            Ok(IdealInstant {
                t,
                position: extension_endpoint(spec, &leader_state, ext, h)?,
                leader_state,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdealTrajectory { instants })
}

/// Ideal follower positions at every communication instant of the leader.
pub fn ideal_follower_trajectory(
    spec: &SurfaceSpec,
    leader: &LeaderTrajectory,
    ext: &ExtensionSpec,
) -> Result<IdealTrajectory> {
    let states = leader.communication_states();
    ideal_from_states(spec, &states, ext, leader.trajectory.step())
}

/// Synthesized states for an agent known only at communication instants:
/// the heading is the forward difference of consecutive positions over the
/// period (backward at the final instant).
pub fn finite_difference_states(
    ideal: &IdealTrajectory,
    period: f64,
) -> Result<Vec<(f64, GeodesicState)>> {
    let n = ideal.instants.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "at least two instants are needed to difference headings".into(),
        ));
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = if k + 1 < n { (k, k + 1) } else { (k - 1, k) };
        let pa = ideal.instants[a].position;
        let pb = ideal.instants[b].position;
        let v = [(pb.x - pa.x) / period, (pb.y - pa.y) / period];
        if v[0].hypot(v[1]) <= 1e-12 {
            return Err(Error::DegenerateHeading {
                norm_sq: v[0] * v[0] + v[1] * v[1],
            });
        }
        let p = ideal.instants[k].position;
        out.push((ideal.instants[k].t, GeodesicState::new(p.x, p.y, v[0], v[1])));
    }
    Ok(out)
}

pub fn chain_formation(
    spec: &SurfaceSpec,
    leader: &LeaderTrajectory,
    n_followers: usize,
    ext: &ExtensionSpec,
) -> Result<ChainFormation> {
    if n_followers == 0 {
        return Err(Error::InvalidArgument("a chain needs at least one follower".into()));
    }
    let h = leader.trajectory.step();
    let mut agents = Vec::with_capacity(n_followers);
    agents.push(ideal_follower_trajectory(spec, leader, ext)?);
    while agents.len() < n_followers {
        let states = finite_difference_states(&agents[agents.len() - 1], ext.period)?;
        agents.push(ideal_from_states(spec, &states, ext, h)?);
    }
    Ok(ChainFormation { agents })
}
