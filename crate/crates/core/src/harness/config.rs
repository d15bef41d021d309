//! Scenario configuration: built-in presets and the TOML config file.
//!
//! ```toml
//! [surface]
//! kind = "type1"            # type1 | type2 | type3 | flat
//!
//! [leader]
//! init = [50.0, -10.0, -0.9961946980917455, 0.0871557427476582]
//!
//! [extension]
//! length = 3.57
//! period = 1.28
//! side = "left"             # left | right
//!
//! [edmd]
//! dictionary = "b"          # a … g
//! warmup = 4
//! steps = 36
//! velocity_mode = "none"    # none | lag | edmd
//!
//! [integrator]
//! step = 0.01
//! ```
//!
//! Every key is optional. Missing keys take the values of the preset that
//! matches `surface.kind`; `leader.init` is required for `flat`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formation::{ExtensionSpec, Side};
use crate::geodesic::{steps_per_period, GeodesicState, DEFAULT_STEP};
use crate::manifold::SurfaceSpec;
use crate::observables::DictionaryChoice;

pub const DEFAULT_WARMUP: usize = 4;
pub const DEFAULT_STEPS: usize = 36;

/// How the follower's velocity component is obtained for dictionary c in the
/// practical runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum VelocityMode {
    /// Relative position only; no velocity component is estimated.
    #[default]
    None,
    /// Velocity at `t` approximated by the executed velocity at `t − 1`.
    Lag,
    /// Velocity at `t` predicted by a separate streaming EDMD on executed
    /// velocities.
    EdmdOnVelocity,
}

impl VelocityMode {
    pub const ALL: [VelocityMode; 3] = [VelocityMode::None, VelocityMode::Lag, VelocityMode::EdmdOnVelocity];

    pub fn as_str(self) -> &'static str {
        match self {
            VelocityMode::None => "none",
            VelocityMode::Lag => "lag",
            VelocityMode::EdmdOnVelocity => "edmd",
        }
    }
}

impl fmt::Display for VelocityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VelocityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(VelocityMode::None),
            "lag" => Ok(VelocityMode::Lag),
            "edmd" | "edmd_on_velocity" | "edmd-on-velocity" => Ok(VelocityMode::EdmdOnVelocity),
            other => Err(Error::Config(format!("unknown velocity mode `{other}`"))),
        }
    }
}

fn parse_side(s: &str) -> Result<Side> {
    match s.trim().to_ascii_lowercase().as_str() {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(Error::Config(format!("unknown extension side `{other}`"))),
    }
}

fn side_str(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

/// Built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Type1,
    Type2,
    Type3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Type1, Preset::Type2, Preset::Type3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Type1 => "type1",
            Preset::Type2 => "type2",
            Preset::Type3 => "type3",
        }
    }

    pub fn surface(self) -> SurfaceSpec {
        match self {
            Preset::Type1 => SurfaceSpec::TypeI,
            Preset::Type2 => SurfaceSpec::TypeII,
            Preset::Type3 => SurfaceSpec::TypeIII,
        }
    }

    pub fn leader_init(self) -> GeodesicState {
        match self {
            Preset::Type1 => GeodesicState::new(50.0, -10.0, -(PI / 36.0).cos(), (PI / 36.0).sin()),
            Preset::Type2 => GeodesicState::new(50.0, -20.0, 1.0, 0.0),
            Preset::Type3 => GeodesicState::new(30.0, 5.0, 1.0, 0.0),
        }
    }

    pub fn config(self) -> ScenarioConfig {
        ScenarioConfig {
            surface: self.surface(),
            leader_init: self.leader_init(),
            extension: ExtensionSpec::default(),
            warmup: DEFAULT_WARMUP,
            steps: DEFAULT_STEPS,
            dictionary: DictionaryChoice::B,
            velocity_mode: VelocityMode::None,
            step: DEFAULT_STEP,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "type1" => Ok(Preset::Type1),
            "type2" => Ok(Preset::Type2),
            "type3" => Ok(Preset::Type3),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub surface: SurfaceSpec,
    pub leader_init: GeodesicState,
    pub extension: ExtensionSpec,
    /// Warmup snapshot pairs.
    pub warmup: usize,
    /// Total timesteps; also the final pair count of the streaming loop.
    pub steps: usize,
    pub dictionary: DictionaryChoice,
    pub velocity_mode: VelocityMode,
    /// Integrator step.
    pub step: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Preset::Type1.config()
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.warmup < 1 {
            return bad("edmd.warmup must be at least 1".into());
        }
        if self.steps <= self.warmup {
            return bad(format!(
                "edmd.steps ({}) must exceed edmd.warmup ({})",
                self.steps, self.warmup
            ));
        }
        if !(self.extension.length > 0.0 && self.extension.length.is_finite()) {
            return bad(format!("extension.length must be positive, got {}", self.extension.length));
        }
        if !(self.extension.period > 0.0 && self.extension.period.is_finite()) {
            return bad(format!("extension.period must be positive, got {}", self.extension.period));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad(format!("integrator.step must be positive, got {}", self.step));
        }
        if steps_per_period(self.extension.period, self.step).is_none() {
            return bad(format!(
                "integrator.step {} does not divide extension.period {}",
                self.step, self.extension.period
            ));
        }
        if !self.leader_init.is_finite() {
            return bad("leader.init must be finite".into());
        }
        if self.velocity_mode != VelocityMode::None && self.dictionary != DictionaryChoice::C {
            return bad(format!(
                "edmd.velocity_mode `{}` requires dictionary c, got {}",
                self.velocity_mode, self.dictionary
            ));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        file.into_config()
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// The config in file form, with every key filled in.
    pub fn to_file(&self) -> ConfigFile {
        let s = &self.leader_init;
        ConfigFile {
            surface: SurfaceSection {
                kind: Some(self.surface.name().to_string()),
            },
            leader: LeaderSection {
                init: Some([s.x, s.y, s.vx, s.vy]),
            },
            extension: ExtensionSection {
                length: Some(self.extension.length),
                period: Some(self.extension.period),
                side: Some(side_str(self.extension.side).to_string()),
            },
            edmd: EdmdSection {
                dictionary: Some(self.dictionary.to_string()),
                warmup: Some(self.warmup),
                steps: Some(self.steps),
                velocity_mode: Some(self.velocity_mode.to_string()),
            },
            integrator: IntegratorSection { step: Some(self.step) },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub kind: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeaderSection {
    pub init: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSection {
    pub length: Option<f64>,
    pub period: Option<f64>,
    pub side: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdmdSection {
    pub dictionary: Option<String>,
    pub warmup: Option<usize>,
    pub steps: Option<usize>,
    pub velocity_mode: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub step: Option<f64>,
}

/// On-disk layout of a scenario config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub surface: SurfaceSection,
    #[serde(default)]
    pub leader: LeaderSection,
    #[serde(default)]
    pub extension: ExtensionSection,
    #[serde(default)]
    pub edmd: EdmdSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
}

impl ConfigFile {
    pub fn into_config(self) -> Result<ScenarioConfig> {
        let kind = self.surface.kind.as_deref().unwrap_or("type1").trim().to_ascii_lowercase();
        let mut cfg = match kind.as_str() {
            "flat" => {
                let mut cfg = Preset::Type1.config();
                cfg.surface = SurfaceSpec::flat();
                if self.leader.init.is_none() {
                    return Err(Error::Config("surface.kind `flat` requires leader.init".into()));
                }
                cfg
            }
            other => other.parse::<Preset>()?.config(),
        };
        if let Some([x, y, vx, vy]) = self.leader.init {
            cfg.leader_init = GeodesicState::new(x, y, vx, vy);
        }
        if let Some(d) = self.extension.length {
            cfg.extension.length = d;
        }
        if let Some(p) = self.extension.period {
            cfg.extension.period = p;
        }
        if let Some(side) = &self.extension.side {
            cfg.extension.side = parse_side(side)?;
        }
        if let Some(choice) = &self.edmd.dictionary {
            cfg.dictionary = choice.parse()?;
        }
        if let Some(w) = self.edmd.warmup {
            cfg.warmup = w;
        }
        if let Some(s) = self.edmd.steps {
            cfg.steps = s;
        }
        if let Some(mode) = &self.edmd.velocity_mode {
            cfg.velocity_mode = mode.parse()?;
        }
        if let Some(h) = self.integrator.step {
            cfg.step = h;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
