//! Run configurations. A config file is a JSON object holding the command name,
//! the global options (`seed`, `format`, `out`) and the command's own fields:
//!
//! ```json
//! {"command": "fixation-heatmap", "format": "csv", "N": 20, "t": 1}
//! ```
//!
//! Command fields are strict: unknown keys are rejected.

use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use evoswitch::game::DEFAULT_TOL;
use evoswitch::incentive::DEFAULT_DT;
use evoswitch::moran::DEFAULT_STEP_LIMIT;
use evoswitch::{Bimatrix, Game2x2, GenerationScheme, IncentiveSpec, LyapunovSpec, MoranModel, PortraitTag};
use evoswitch::{RspGame, SimplexState};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// `points` values `min + (max − min)·k/(points − 1)`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub const fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn validate(&self, name: &str) -> Result<(), CliError> {
        if self.points < 2 {
            return Err(CliError::Config(format!("{name}: a grid needs at least 2 points")));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min >= self.max {
            return Err(CliError::Config(format!("{name}: need finite min < max, got [{}, {}]", self.min, self.max)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points).map(|k| self.min + (self.max - self.min) * k as f64 / last).collect()
    }
}

pub const UNIT_GRID: Grid = Grid::new(0.0, 1.0, 101);
pub const FITNESS_GRID: Grid = Grid::new(0.0, 4.0, 101);

fn unit_grid() -> Grid {
    UNIT_GRID
}
fn fitness_grid() -> Grid {
    FITNESS_GRID
}
fn tol() -> f64 {
    DEFAULT_TOL
}
fn dt() -> f64 {
    DEFAULT_DT
}
fn ten() -> f64 {
    10.0
}
fn one() -> usize {
    1
}
fn one_f() -> f64 {
    1.0
}
fn twenty() -> usize {
    20
}
fn radius() -> f64 {
    0.1
}
fn samples() -> usize {
    10_000
}
fn margin() -> f64 {
    1e-10
}
fn inner_fraction() -> f64 {
    0.01
}
fn runs() -> u64 {
    10_000
}
fn step_limit() -> u64 {
    DEFAULT_STEP_LIMIT
}

/// A single game, or a bimatrix pair mixed at `p` (`C = (1 − p)·A + p·B`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<Game2x2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bimatrix: Option<Bimatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default = "tol")]
    pub tol: f64,
}

/// Classes of `p·first + (1 − p)·second` along a grid of `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitSweepConfig {
    pub first: Game2x2,
    pub second: Game2x2,
    #[serde(default = "unit_grid")]
    pub p_grid: Grid,
    #[serde(default = "tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RspConfig {
    pub game: RspGame,
    /// With `p`, the regime of `p·game + (1 − p)·second`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second: Option<RspGame>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default = "tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymRegimeConfig {
    pub bimatrix: Bimatrix,
    /// A single `p`; otherwise `p_grid` (default 101 points over `[0, 1]`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Grid>,
    #[serde(default = "tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub incentive: IncentiveSpec,
    pub x0: SimplexState,
    #[serde(default = "ten")]
    pub t_end: f64,
    #[serde(default = "dt")]
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<LyapunovSpec>,
    /// Emit every `stride`-th step; the final state is always emitted.
    #[serde(default = "one")]
    pub stride: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IssCheckConfig {
    pub incentive: IncentiveSpec,
    pub x_hat: SimplexState,
    #[serde(default = "radius")]
    pub radius: f64,
    #[serde(default = "samples")]
    pub samples: usize,
    #[serde(default = "margin")]
    pub margin: f64,
    #[serde(default = "inner_fraction")]
    pub inner_fraction: f64,
}

/// Either a full `model`, or relative fitness `s`, `t` with `N`. `p` or `p_grid`
/// overrides the model's switching probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoranConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<MoranModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Grid>,
    #[serde(default = "one")]
    pub i0: usize,
    /// Monte Carlo runs per `p`; 0 reports the exact values only.
    #[serde(default = "runs")]
    pub runs: u64,
    #[serde(default = "step_limit")]
    pub step_limit: u64,
    /// Generational updating instead of one environment draw per step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<GenerationScheme>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatmapConfig {
    #[serde(rename = "N", default = "twenty")]
    pub n: usize,
    #[serde(default = "one_f")]
    pub t: f64,
    #[serde(default = "one")]
    pub i0: usize,
    #[serde(default = "unit_grid")]
    pub p_grid: Grid,
    #[serde(default = "fitness_grid")]
    pub s_grid: Grid,
}

impl Default for HeatmapConfig {
    fn default() -> Self {
        Self { n: 20, t: 1.0, i0: 1, p_grid: UNIT_GRID, s_grid: FITNESS_GRID }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Config {
    pub first: Game2x2,
    pub target: PortraitTag,
    pub p_star: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_param: Option<f64>,
    /// Sweep the constructed mixture over this many points of `[0, 1]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_points: Option<usize>,
    #[serde(default = "tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandConfig {
    Classify(ClassifyConfig),
    PortraitSweep(PortraitSweepConfig),
    Rsp(RspConfig),
    AsymRegime(AsymRegimeConfig),
    Trajectory(TrajectoryConfig),
    IssCheck(IssCheckConfig),
    Moran(MoranConfig),
    FixationHeatmap(HeatmapConfig),
    Theorem1(Theorem1Config),
}

pub const COMMANDS: [&str; 9] = [
    "classify",
    "portrait-sweep",
    "rsp",
    "asym-regime",
    "trajectory",
    "iss-check",
    "moran",
    "fixation-heatmap",
    "theorem1",
];

fn parse<T: DeserializeOwned>(fields: Map<String, Value>) -> Result<T, CliError> {
    serde_json::from_value(Value::Object(fields)).map_err(CliError::from)
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Classify(_) => "classify",
            CommandConfig::PortraitSweep(_) => "portrait-sweep",
            CommandConfig::Rsp(_) => "rsp",
            CommandConfig::AsymRegime(_) => "asym-regime",
            CommandConfig::Trajectory(_) => "trajectory",
            CommandConfig::IssCheck(_) => "iss-check",
            CommandConfig::Moran(_) => "moran",
            CommandConfig::FixationHeatmap(_) => "fixation-heatmap",
            CommandConfig::Theorem1(_) => "theorem1",
        }
    }

    pub fn from_fields(command: &str, fields: Map<String, Value>) -> Result<Self, CliError> {
        let cfg = match command {
            "classify" => CommandConfig::Classify(parse(fields)?),
            "portrait-sweep" => CommandConfig::PortraitSweep(parse(fields)?),
            "rsp" => CommandConfig::Rsp(parse(fields)?),
            "asym-regime" => CommandConfig::AsymRegime(parse(fields)?),
            "trajectory" => CommandConfig::Trajectory(parse(fields)?),
            "iss-check" => CommandConfig::IssCheck(parse(fields)?),
            "moran" => CommandConfig::Moran(parse(fields)?),
            "fixation-heatmap" => CommandConfig::FixationHeatmap(parse(fields)?),
            "theorem1" => CommandConfig::Theorem1(parse(fields)?),
            other => return Err(CliError::Config(format!("unknown command {other:?}; expected one of {COMMANDS:?}"))),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn fields(&self) -> Map<String, Value> {
        let v = match self {
            CommandConfig::Classify(c) => serde_json::to_value(c),
            CommandConfig::PortraitSweep(c) => serde_json::to_value(c),
            CommandConfig::Rsp(c) => serde_json::to_value(c),
            CommandConfig::AsymRegime(c) => serde_json::to_value(c),
            CommandConfig::Trajectory(c) => serde_json::to_value(c),
            CommandConfig::IssCheck(c) => serde_json::to_value(c),
            CommandConfig::Moran(c) => serde_json::to_value(c),
            CommandConfig::FixationHeatmap(c) => serde_json::to_value(c),
            CommandConfig::Theorem1(c) => serde_json::to_value(c),
        };
        match v.expect("configs serialize") {
            Value::Object(m) => m,
            _ => unreachable!("configs are structs"),
        }
    }

    /// Checks that serde cannot express: grid shapes, mutually exclusive inputs.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            CommandConfig::Classify(c) => match (&c.game, &c.bimatrix) {
                (Some(_), None) if c.p.is_none() => Ok(()),
                (Some(_), None) => Err(CliError::config("classify: p applies to a bimatrix only")),
                (None, Some(_)) if c.p.is_some() => Ok(()),
                (None, Some(_)) => Err(CliError::config("classify: a bimatrix needs p")),
                _ => Err(CliError::config("classify: give exactly one of game or bimatrix")),
            },
            CommandConfig::PortraitSweep(c) => c.p_grid.validate("p_grid"),
            CommandConfig::Rsp(c) => match (&c.second, c.p) {
                (Some(_), Some(_)) | (None, None) => Ok(()),
                _ => Err(CliError::config("rsp: second and p go together")),
            },
            CommandConfig::AsymRegime(c) => match (c.p, &c.p_grid) {
                (Some(_), Some(_)) => Err(CliError::config("asym-regime: give p or p_grid, not both")),
                (_, Some(g)) => g.validate("p_grid"),
                _ => Ok(()),
            },
            CommandConfig::Trajectory(c) => {
                if c.stride == 0 {
                    return Err(CliError::config("trajectory: stride must be at least 1"));
                }
                Ok(())
            }
            CommandConfig::IssCheck(_) => Ok(()),
            CommandConfig::Moran(c) => {
                if c.p.is_some() && c.p_grid.is_some() {
                    return Err(CliError::config("moran: give p or p_grid, not both"));
                }
                if let Some(g) = &c.p_grid {
                    g.validate("p_grid")?;
                }
                match (&c.model, c.s, c.t, c.n) {
                    (Some(_), None, None, None) => Ok(()),
                    (Some(_), ..) => Err(CliError::config("moran: model excludes s, t and N")),
                    (None, Some(_), Some(_), Some(_)) if c.p.is_some() || c.p_grid.is_some() => Ok(()),
                    (None, Some(_), Some(_), Some(_)) => Err(CliError::config("moran: need p or p_grid")),
                    (None, ..) => Err(CliError::config("moran: need a model, or s, t and N")),
                }
            }
            CommandConfig::FixationHeatmap(c) => {
                if c.n < 2 {
                    return Err(CliError::config("fixation-heatmap: N must be at least 2"));
                }
                if c.i0 > c.n {
                    return Err(CliError::config("fixation-heatmap: i0 exceeds N"));
                }
                c.p_grid.validate("p_grid")?;
                c.s_grid.validate("s_grid")
            }
            CommandConfig::Theorem1(c) => match c.sweep_points {
                Some(n) if n < 2 => Err(CliError::config("theorem1: sweep_points must be at least 2")),
                _ => Ok(()),
            },
        }
    }

    /// Commands that draw random numbers.
    pub fn needs_seed(&self) -> bool {
        match self {
            CommandConfig::IssCheck(_) => true,
            CommandConfig::Moran(c) => c.runs > 0,
            _ => false,
        }
    }
}

/// A fully resolved run: what executes, plus where and how it reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub seed: Option<u64>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(value: Value) -> Result<Self, CliError> {
        let Value::Object(mut fields) = value else {
            return Err(CliError::config("a config must be a JSON object"));
        };
        let command = match fields.remove("command") {
            Some(Value::String(s)) => s,
            Some(_) => return Err(CliError::config("\"command\" must be a string")),
            None => return Err(CliError::config("config has no \"command\"")),
        };
        let (seed, format, out) = take_globals(&mut fields)?;
        let cfg = Self { command: CommandConfig::from_fields(&command, fields)?, seed, format: format.unwrap_or_default(), out };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.name().into()));
        if let Some(seed) = self.seed {
            m.insert("seed".into(), seed.into());
        }
        m.insert("format".into(), serde_json::to_value(self.format).expect("format serializes"));
        if let Some(out) = &self.out {
            m.insert("out".into(), Value::String(out.to_string_lossy().into_owned()));
        }
        m.extend(self.command.fields());
        Value::Object(m)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.command.validate()?;
        if self.command.needs_seed() && self.seed.is_none() {
            return Err(CliError::Config(format!("{} is stochastic and needs a seed (--seed)", self.command.name())));
        }
        Ok(())
    }
}

type Globals = (Option<u64>, Option<Format>, Option<PathBuf>);

/// Removes `seed`, `format` and `out` from a config object.
pub fn take_globals(fields: &mut Map<String, Value>) -> Result<Globals, CliError> {
    let seed = fields.remove("seed").map(serde_json::from_value).transpose()?;
    let format = fields.remove("format").map(serde_json::from_value).transpose()?;
    let out = fields.remove("out").map(serde_json::from_value).transpose()?;
    Ok((seed, format, out))
}

/// Sets `value` at a dotted `key` such as `game.a`, creating parent objects.
/// A missing grid parent starts from the command's default grid, so a single
/// `--p-points` flag keeps the default range.
pub fn set_dotted(fields: &mut Map<String, Value>, command: &str, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts = key.split('.').peekable();
    let mut cur = fields;
    while let Some(part) = parts.next() {
        if parts.peek().is_none() {
            cur.insert(part.to_string(), value);
            return Ok(());
        }
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| default_parent(command, part).unwrap_or_else(|| Value::Object(Map::new())));
        cur = match entry {
            Value::Object(m) => m,
            _ => return Err(CliError::Config(format!("{part} is not an object, cannot set {key}"))),
        };
    }
    Ok(())
}

fn default_parent(command: &str, key: &str) -> Option<Value> {
    let grid = match (command, key) {
        ("fixation-heatmap", "s_grid") => FITNESS_GRID,
        (_, "p_grid") => UNIT_GRID,
        _ => return None,
    };
    Some(serde_json::to_value(grid).expect("grid serializes"))
}
