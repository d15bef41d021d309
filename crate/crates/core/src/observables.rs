//! Follower frames, measurement dictionaries and their inverse maps.
//!
//! Dictionary layouts (`k` = lifted dimension):
//!
//! | choice | components                                   | k |
//! |--------|----------------------------------------------|---|
//! | a      | follower velocity `vx, vy`                   | 2 |
//! | b      | relative position `dist, angle`              | 2 |
//! | c      | `vx, vy, dist, angle`                        | 4 |
//! | d      | follower 2-D position `x, y`                 | 2 |
//! | e      | follower 3-D position `x, y, z`              | 3 |
//! | f      | follower then leader 2-D positions           | 4 |
//! | g      | follower then leader 3-D positions           | 6 |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{height, ChartPoint, SurfaceSpec};

/// Map an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

fn atan2_wrapped(y: f64, x: f64) -> f64 {
    let a = y.atan2(x);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Follower-local frame: origin at the follower, x-axis along its heading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FollowerFrame {
    pub origin: ChartPoint,
    pub heading_angle: f64,
}

impl FollowerFrame {
    pub fn new(origin: ChartPoint, heading_angle: f64) -> Self {
        FollowerFrame {
            origin,
            heading_angle: wrap_angle(heading_angle),
        }
    }

    /// The chart point at `(distance, angle)` in this frame.
    pub fn point_at(&self, distance: f64, angle: f64) -> ChartPoint {
        let a = self.heading_angle + angle;
        ChartPoint::new(
            self.origin.x + distance * a.cos(),
            self.origin.y + distance * a.sin(),
        )
    }
}

pub fn follower_frame(prev: ChartPoint, cur: ChartPoint, fallback_angle: f64) -> FollowerFrame {
    let (dx, dy) = (cur.x - prev.x, cur.y - prev.y);
    let heading = if dx.hypot(dy) > 1e-12 {
        atan2_wrapped(dy, dx)
    } else {
        fallback_angle
    };
    FollowerFrame::new(cur, heading)
}

/// Chart distance and frame-relative bearing of `target`.
pub fn relative_measurement(frame: &FollowerFrame, target: ChartPoint) -> (f64, f64) {
    let (dx, dy) = (target.x - frame.origin.x, target.y - frame.origin.y);
    let distance = dx.hypot(dy);
    if distance == 0.0 {
        return (0.0, 0.0);
    }
    let (s, c) = frame.heading_angle.sin_cos();
    // rotate by −heading
    let lx = c * dx + s * dy;
    let ly = -s * dx + c * dy;
    (distance, atan2_wrapped(ly, lx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DictionaryChoice {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl DictionaryChoice {
    pub const ALL: [DictionaryChoice; 7] = [
        DictionaryChoice::A,
        DictionaryChoice::B,
        DictionaryChoice::C,
        DictionaryChoice::D,
        DictionaryChoice::E,
        DictionaryChoice::F,
        DictionaryChoice::G,
    ];

    /// Lifted dimension.
    pub fn dim(self) -> usize {
        match self {
            DictionaryChoice::A | DictionaryChoice::B | DictionaryChoice::D => 2,
            DictionaryChoice::E => 3,
            DictionaryChoice::C | DictionaryChoice::F => 4,
            DictionaryChoice::G => 6,
        }
    }

    pub fn letter(self) -> char {
        match self {
            DictionaryChoice::A => 'a',
            DictionaryChoice::B => 'b',
            DictionaryChoice::C => 'c',
            DictionaryChoice::D => 'd',
            DictionaryChoice::E => 'e',
            DictionaryChoice::F => 'f',
            DictionaryChoice::G => 'g',
        }
    }

    /// Offset of the `(dist, angle)` block, if the dictionary has one.
    pub fn relative_offset(self) -> Option<usize> {
        match self {
            DictionaryChoice::B => Some(0),
            DictionaryChoice::C => Some(2),
            _ => None,
        }
    }

    /// Offset of the follower velocity block, if any.
    pub fn velocity_offset(self) -> Option<usize> {
        match self {
            DictionaryChoice::A | DictionaryChoice::C => Some(0),
            _ => None,
        }
    }

    /// True for the absolute-position dictionaries d–g, which predict the
    /// follower position directly instead of a move.
    pub fn is_absolute(self) -> bool {
        matches!(
            self,
            DictionaryChoice::D | DictionaryChoice::E | DictionaryChoice::F | DictionaryChoice::G
        )
    }
}

impl fmt::Display for DictionaryChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for DictionaryChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(DictionaryChoice::A),
            "b" => Ok(DictionaryChoice::B),
            "c" => Ok(DictionaryChoice::C),
            "d" => Ok(DictionaryChoice::D),
            "e" => Ok(DictionaryChoice::E),
            "f" => Ok(DictionaryChoice::F),
            "g" => Ok(DictionaryChoice::G),
            other => Err(Error::Config(format!("unknown dictionary choice `{other}`"))),
        }
    }
}

impl TryFrom<String> for DictionaryChoice {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DictionaryChoice> for String {
    fn from(c: DictionaryChoice) -> String {
        c.to_string()
    }
}

/// Lifted measurement `Ψ(x)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasurementVector(Vec<f64>);

impl MeasurementVector {
    pub fn new(values: Vec<f64>) -> Self {
        MeasurementVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `(dist, angle)` for dictionaries with a relative block.
    pub fn relative(&self, choice: DictionaryChoice) -> Option<(f64, f64)> {
        let o = choice.relative_offset()?;
        Some((*self.0.get(o)?, *self.0.get(o + 1)?))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for MeasurementVector {
    fn from(v: Vec<f64>) -> Self {
        MeasurementVector(v)
    }
}

/// Everything a dictionary might read at one timestep. Only the components
/// the chosen dictionary needs have to be set.
#[derive(Debug, Clone, Copy, Default)]
pub struct LiftContext<'a> {
    pub surface: Option<&'a SurfaceSpec>,
    pub frame: Option<FollowerFrame>,
    pub target: Option<ChartPoint>,
    pub follower_velocity: Option<[f64; 2]>,
    pub follower_position: Option<ChartPoint>,
    pub leader_position: Option<ChartPoint>,
}

fn need<T>(v: Option<T>, what: &'static str) -> Result<T> {
    v.ok_or(Error::MissingContext(what))
}

fn push_3d(out: &mut Vec<f64>, surface: Option<&SurfaceSpec>, p: ChartPoint) -> Result<()> {
    let z = height(need(surface, "surface")?, p)?;
    out.extend_from_slice(&[p.x, p.y, z]);
    Ok(())
}

pub fn lift(choice: DictionaryChoice, ctx: &LiftContext<'_>) -> Result<MeasurementVector> {
    let mut out = Vec::with_capacity(choice.dim());
    let relative = |out: &mut Vec<f64>| -> Result<()> {
        let frame = need(ctx.frame, "frame")?;
        let target = need(ctx.target, "target")?;
        let (d, a) = relative_measurement(&frame, target);
        out.extend_from_slice(&[d, a]);
        Ok(())
    };
    let velocity = |out: &mut Vec<f64>| -> Result<()> {
        out.extend_from_slice(&need(ctx.follower_velocity, "follower_velocity")?);
        Ok(())
    };
    match choice {
        DictionaryChoice::A => velocity(&mut out)?,
        DictionaryChoice::B => relative(&mut out)?,
        DictionaryChoice::C => {
            velocity(&mut out)?;
            relative(&mut out)?;
        }
        DictionaryChoice::D => {
            let p = need(ctx.follower_position, "follower_position")?;
            out.extend_from_slice(&[p.x, p.y]);
        }
        DictionaryChoice::E => {
            push_3d(&mut out, ctx.surface, need(ctx.follower_position, "follower_position")?)?;
        }
        DictionaryChoice::F => {
            let p = need(ctx.follower_position, "follower_position")?;
            let l = need(ctx.leader_position, "leader_position")?;
            out.extend_from_slice(&[p.x, p.y, l.x, l.y]);
        }
        DictionaryChoice::G => {
            push_3d(&mut out, ctx.surface, need(ctx.follower_position, "follower_position")?)?;
            push_3d(&mut out, ctx.surface, need(ctx.leader_position, "leader_position")?)?;
        }
    }
    debug_assert_eq!(out.len(), choice.dim());
    Ok(MeasurementVector(out))
}

fn check_dim(choice: DictionaryChoice, v: &MeasurementVector) -> Result<()> {
    if v.len() == choice.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: choice.dim(),
            actual: v.len(),
        })
    }
}

/// Where the follower moves for a predicted measurement (choices a–c).
pub fn apply_prediction(
    choice: DictionaryChoice,
    frame: &FollowerFrame,
    predicted: &MeasurementVector,
) -> Result<ChartPoint> {
    if choice.is_absolute() {
        return Err(Error::UnsupportedChoice(choice.letter()));
    }
    check_dim(choice, predicted)?;
    if let Some((d, a)) = predicted.relative(choice) {
        return Ok(frame.point_at(d, a));
    }
    // velocity held for one unit of time
    let v = predicted.values();
    Ok(ChartPoint::new(frame.origin.x + v[0], frame.origin.y + v[1]))
}

/// Predicted follower position read straight from an absolute-position
/// dictionary (choices d–g).
pub fn direct_position(choice: DictionaryChoice, predicted: &MeasurementVector) -> Result<ChartPoint> {
    if !choice.is_absolute() {
        return Err(Error::UnsupportedChoice(choice.letter()));
    }
    check_dim(choice, predicted)?;
    let v = predicted.values();
    Ok(ChartPoint::new(v[0], v[1]))
}
