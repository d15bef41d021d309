//! Scenario runs and the experiment tables built from them.
//!
//! Timeline of a run with `steps = N` and `warmup = w`:
//!
//! - the leader is integrated over `N + 1` communication periods, giving
//!   leader states `L_0 … L_{N+1}` and ideal follower positions `I_0 … I_{N+1}`;
//! - at step `k` the follower sits at `F_k` (with `F_0 = I_0`) and measures
//!   its next target `I_{k+1}` in its own frame, giving `z_k`;
//! - `z_0 … z_w` form the `w` warmup pairs, measured on formation;
//! - steps `k = w+1 … N` are predicted by the streaming loop, which ends
//!   with `N` pairs, so a report has `N` records of which `N − w` carry
//!   predictions.
//!
//! In the standard runs the follower is put back on formation after each
//! step (`F_{k+1} = I_{k+1}`). In the practical runs it executes the
//! displacement its estimate calls for, and its position is the running sum
//! of those displacements, so estimation errors accumulate.

pub mod config;
pub mod report;

pub use config::{Preset, ScenarioConfig, VelocityMode};

use crate::error::{Error, Result};
use crate::formation::ideal_follower_trajectory;
use crate::geodesic::{leader_trajectory, GeodesicState};
use crate::koopman::{fit_default, predict, run_streaming, SnapshotBuffer};
use crate::manifold::ChartPoint;
use crate::observables::{
    apply_prediction, direct_position, follower_frame, lift, DictionaryChoice, FollowerFrame,
    LiftContext, MeasurementVector,
};

/// One timestep of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    /// Ideal position the follower is aiming for.
    pub ideal: ChartPoint,
    /// Estimated ideal position; `None` during warmup.
    pub estimated: Option<ChartPoint>,
    /// Follower position when the measurement is taken.
    pub follower: ChartPoint,
    pub measurement: MeasurementVector,
    pub prediction: Option<MeasurementVector>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<StepRecord>,
    pub rmse: f64,
    pub avg_sensing_range: f64,
    pub config: ScenarioConfig,
}

impl RunReport {
    pub fn prediction_records(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter().filter(|r| r.estimated.is_some())
    }
}

/// Leader states and ideal positions at every communication instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub leader: Vec<GeodesicState>,
    pub ideal: Vec<ChartPoint>,
}

/// Leader and ideal follower curves at `k = 0 ..= steps + 1`.
pub fn build_scene(cfg: &ScenarioConfig) -> Result<Scene> {
    cfg.validate()?;
    let lt = leader_trajectory(
        &cfg.surface,
        cfg.leader_init,
        cfg.steps + 1,
        cfg.extension.period,
        cfg.step,
    )?;
    let ideal = ideal_follower_trajectory(&cfg.surface, &lt, &cfg.extension)?;
    Ok(Scene {
        leader: ideal.instants.iter().map(|i| i.leader_state).collect(),
        ideal: ideal.positions(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Movement {
    /// Back on formation after every step.
    Corrected,
    /// Sum of executed displacements.
    Accumulated,
}

/// Follower state threaded through the streaming loop.
///
/// Sensing always happens on formation: the frame at step `k` sits at
/// `I_k` with heading `I_{k-1} → I_k`. What differs between movements is
/// where the follower actually ends up. With `Accumulated` it executes the
/// displacement `Î_{k+1} − I_k` it believes is needed, and its world
/// position is the running sum of those displacements.
struct Run<'a> {
    cfg: &'a ScenarioConfig,
    scene: &'a Scene,
    choice: DictionaryChoice,
    velocity_mode: VelocityMode,
    movement: Movement,
    /// World position after each step, `F_0 = I_0`.
    positions: Vec<ChartPoint>,
    /// Executed displacement of each step.
    executed: Vec<[f64; 2]>,
    heading: f64,
    records: Vec<StepRecord>,
}

fn displacement(a: ChartPoint, b: ChartPoint) -> [f64; 2] {
    [b.x - a.x, b.y - a.y]
}

impl<'a> Run<'a> {
    fn new(
        cfg: &'a ScenarioConfig,
        scene: &'a Scene,
        choice: DictionaryChoice,
        velocity_mode: VelocityMode,
        movement: Movement,
    ) -> Self {
        let l0 = &scene.leader[0];
        Run {
            cfg,
            scene,
            choice,
            velocity_mode,
            movement,
            positions: vec![scene.ideal[0]],
            executed: Vec::with_capacity(cfg.steps + 1),
            heading: l0.vy.atan2(l0.vx),
            records: Vec::with_capacity(cfg.steps),
        }
    }

    fn step_index(&self) -> usize {
        self.executed.len()
    }

    fn frame(&self) -> FollowerFrame {
        let k = self.step_index();
        let cur = self.scene.ideal[k];
        match k {
            0 => FollowerFrame::new(cur, self.heading),
            _ => follower_frame(self.scene.ideal[k - 1], cur, self.heading),
        }
    }

    fn lagged_velocity(&self, k: usize) -> [f64; 2] {
        match k {
            0 => displacement(self.scene.ideal[0], self.scene.ideal[1]),
            _ => self.executed[k - 1],
        }
    }

    fn velocity_component(&self, k: usize) -> Result<[f64; 2]> {
        match self.velocity_mode {
            VelocityMode::None => Ok(displacement(self.scene.ideal[k], self.scene.ideal[k + 1])),
            VelocityMode::Lag => Ok(self.lagged_velocity(k)),
            VelocityMode::EdmdOnVelocity => {
                if k < 2 {
                    return Ok(self.lagged_velocity(k));
                }
                let history: Vec<MeasurementVector> =
                    self.executed[..k].iter().map(|u| u.to_vec().into()).collect();
                let buffer = SnapshotBuffer::from_series(&history)?;
                let kv = fit_default(&buffer)?;
                let next = predict(&kv, &history[k - 1])?;
                Ok([next.values()[0], next.values()[1]])
            }
        }
    }

    fn measure(&self, frame: &FollowerFrame) -> Result<MeasurementVector> {
        let k = self.step_index();
        let needs_velocity = self.choice.velocity_offset().is_some();
        let ctx = LiftContext {
            surface: Some(&self.cfg.surface),
            frame: Some(*frame),
            target: Some(self.scene.ideal[k + 1]),
            follower_velocity: if needs_velocity {
                Some(self.velocity_component(k)?)
            } else {
                None
            },
            follower_position: Some(self.scene.ideal[k + 1]),
            leader_position: Some(self.scene.leader[k + 1].position()),
        };
        lift(self.choice, &ctx)
    }

    fn estimate(&self, frame: &FollowerFrame, prediction: &MeasurementVector) -> Result<ChartPoint> {
        if self.choice.is_absolute() {
            direct_position(self.choice, prediction)
        } else {
            apply_prediction(self.choice, frame, prediction)
        }
    }

    /// Measure, record, and move.
    fn advance(&mut self, prediction: Option<&MeasurementVector>) -> Result<MeasurementVector> {
        let k = self.step_index();
        let frame = self.frame();
        self.heading = frame.heading_angle;
        let measurement = self.measure(&frame)?;
        let ideal = self.scene.ideal[k + 1];
        let believed = prediction.map(|p| self.estimate(&frame, p)).transpose()?;
        let step = displacement(frame.origin, believed.unwrap_or(ideal));
        let cur = self.positions[k];
        let moved = ChartPoint::new(cur.x + step[0], cur.y + step[1]);
        let estimated = match self.movement {
            Movement::Corrected => believed,
            Movement::Accumulated => believed.map(|_| moved),
        };
        if let Some(e) = estimated {
            if !e.is_finite() {
                return Err(Error::NonFiniteState { t: k as f64 });
            }
        }
        if k > 0 {
            self.records.push(StepRecord {
                t: k,
                ideal,
                estimated,
                follower: cur,
                measurement: measurement.clone(),
                prediction: prediction.cloned(),
            });
        }
        self.executed.push(step);
        self.positions.push(match self.movement {
            Movement::Corrected => ideal,
            Movement::Accumulated => moved,
        });
        Ok(measurement)
    }
}

fn execute(
    cfg: &ScenarioConfig,
    choice: DictionaryChoice,
    velocity_mode: VelocityMode,
    movement: Movement,
) -> Result<RunReport> {
    let scene = build_scene(cfg)?;
    let mut run = Run::new(cfg, &scene, choice, velocity_mode, movement);
    let warmup: Vec<MeasurementVector> = (0..=cfg.warmup)
        .map(|_| run.advance(None))
        .collect::<Result<_>>()?;
    let buffer = SnapshotBuffer::from_series(&warmup)?;
    run_streaming(buffer, cfg.steps, |prediction| run.advance(Some(prediction)))?;
    let records = run.records;
    let rmse = rmse(&records)?;
    let avg_sensing_range = mean_estimate_distance(&records)?;
    let mut config = cfg.clone();
    config.dictionary = choice;
    config.velocity_mode = velocity_mode;
    Ok(RunReport {
        records,
        rmse,
        avg_sensing_range,
        config,
    })
}

/// Run one scenario.
///
/// With `velocity_mode = none` the follower is corrected onto formation
/// after every step. Any other velocity mode selects the practical variant
/// (dictionary c, accumulated displacements).
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunReport> {
    cfg.validate()?;
    let movement = match cfg.velocity_mode {
        VelocityMode::None => Movement::Corrected,
        _ => Movement::Accumulated,
    };
    execute(cfg, cfg.dictionary, cfg.velocity_mode, movement)
}

/// Root mean square chart distance between estimates and ideals.
pub fn rmse(records: &[StepRecord]) -> Result<f64> {
    let sq: Vec<f64> = records
        .iter()
        .filter_map(|r| r.estimated.map(|e| e.distance(&r.ideal).powi(2)))
        .collect();
    if sq.is_empty() {
        return Err(Error::NoEstimates);
    }
    Ok((sq.iter().sum::<f64>() / sq.len() as f64).sqrt())
}

fn mean_estimate_distance(records: &[StepRecord]) -> Result<f64> {
    let d: Vec<f64> = records
        .iter()
        .filter_map(|r| r.estimated.map(|e| e.distance(&r.ideal)))
        .collect();
    if d.is_empty() {
        return Err(Error::NoEstimates);
    }
    Ok(d.iter().sum::<f64>() / d.len() as f64)
}

/// Timestep-averaged sensing range over the predicted steps.
///
/// With estimation this is the distance from the estimated position to the
/// ideal one; without, the distance from the follower's previous position.
pub fn sensing_range(cfg: &ScenarioConfig, with_estimation: bool) -> Result<f64> {
    if with_estimation {
        let mut c = cfg.clone();
        c.velocity_mode = VelocityMode::None;
        return Ok(run_scenario(&c)?.avg_sensing_range);
    }
    let scene = build_scene(cfg)?;
    // on formation the previous position is the previous ideal point
    let d: Vec<f64> = (cfg.warmup + 1..=cfg.steps)
        .map(|k| scene.ideal[k].distance(&scene.ideal[k + 1]))
        .collect();
    Ok(d.iter().sum::<f64>() / d.len() as f64)
}

/// RMSE per dictionary choice, on otherwise identical standard runs.
pub fn compare_dictionaries(
    base: &ScenarioConfig,
    choices: &[DictionaryChoice],
) -> Result<Vec<(DictionaryChoice, f64)>> {
    if choices.is_empty() {
        return Err(Error::InvalidArgument("no dictionary choices given".into()));
    }
    choices
        .iter()
        .map(|&choice| {
            let mut cfg = base.clone();
            cfg.dictionary = choice;
            cfg.velocity_mode = VelocityMode::None;
            Ok((choice, run_scenario(&cfg)?.rmse))
        })
        .collect()
}

/// One practical run with accumulated displacements.
///
/// `None` uses dictionary b; `Lag` and `EdmdOnVelocity` use dictionary c
/// with the velocity component obtained accordingly.
pub fn run_practical(base: &ScenarioConfig, mode: VelocityMode) -> Result<RunReport> {
    let mut cfg = base.clone();
    cfg.velocity_mode = VelocityMode::None;
    cfg.validate()?;
    let choice = match mode {
        VelocityMode::None => DictionaryChoice::B,
        _ => DictionaryChoice::C,
    };
    execute(&cfg, choice, mode, Movement::Accumulated)
}

/// RMSE of the three practical variants.
pub fn practical_modes(base: &ScenarioConfig) -> Result<Vec<(VelocityMode, f64)>> {
    VelocityMode::ALL
        .iter()
        .map(|&mode| Ok((mode, run_practical(base, mode)?.rmse)))
        .collect()
}
