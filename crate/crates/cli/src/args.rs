//! Command-line flags. Every command flag maps to a (possibly dotted) config key
//! and overrides the value from `--config`.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{set_dotted, Format};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "evoswitch", version, about = "Evolutionary dynamics in switching environments")]
pub struct Cli {
    /// JSON run config; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Print the resolved config as JSON and exit without running.
    #[arg(long, global = true)]
    pub emit_config: bool,

    /// May be omitted when the config names its command.
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// A JSON value given inline on the command line.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Json(pub Value);

impl FromStr for Json {
    type Err = serde_json::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_str(s).map(Json)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase portrait, rest point and equilibria of a 2×2 game.
    Classify(ClassifyArgs),
    /// Classes of p·first + (1 − p)·second along a p grid.
    PortraitSweep(PortraitSweepArgs),
    /// Long-run regime of a rock-scissors-paper game.
    Rsp(RspArgs),
    /// Dominance regime of an asymmetrically switching bimatrix.
    AsymRegime(AsymRegimeArgs),
    /// Integrate incentive dynamics.
    Trajectory(TrajectoryArgs),
    /// Sampled incentive-stable-state check.
    IssCheck(IssCheckArgs),
    /// Fixation probabilities of the switching Moran process.
    Moran(MoranArgs),
    /// Fixation probability over a (p, s) grid.
    FixationHeatmap(HeatmapArgs),
    /// Construct a partner game whose mixture switches class at p_star.
    Theorem1(Theorem1Args),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::PortraitSweep(_) => "portrait-sweep",
            Command::Rsp(_) => "rsp",
            Command::AsymRegime(_) => "asym-regime",
            Command::Trajectory(_) => "trajectory",
            Command::IssCheck(_) => "iss-check",
            Command::Moran(_) => "moran",
            Command::FixationHeatmap(_) => "fixation-heatmap",
            Command::Theorem1(_) => "theorem1",
        }
    }

    /// Writes the given flags into `fields`.
    pub fn overlay(&self, fields: &mut Map<String, Value>) -> Result<(), CliError> {
        let flags = match self {
            Command::Classify(a) => serde_json::to_value(a),
            Command::PortraitSweep(a) => serde_json::to_value(a),
            Command::Rsp(a) => serde_json::to_value(a),
            Command::AsymRegime(a) => serde_json::to_value(a),
            Command::Trajectory(a) => serde_json::to_value(a),
            Command::IssCheck(a) => serde_json::to_value(a),
            Command::Moran(a) => serde_json::to_value(a),
            Command::FixationHeatmap(a) => serde_json::to_value(a),
            Command::Theorem1(a) => serde_json::to_value(a),
        }?;
        let Value::Object(flags) = flags else { unreachable!("flag structs serialize to objects") };
        for (key, value) in flags {
            set_dotted(fields, self.name(), &key, value)?;
        }
        Ok(())
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "game.a", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "game.b", skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "game.c", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "game.d", skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// {"a":..,"b":..,"c":..,"d":..}
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub game: Option<Json>,
    /// {"A":{..},"B":{..}}; needs --p
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bimatrix: Option<Json>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PGridArgs {
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "p_grid.min", skip_serializing_if = "Option::is_none")]
    pub p_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "p_grid.max", skip_serializing_if = "Option::is_none")]
    pub p_max: Option<f64>,
    #[arg(long)]
    #[serde(rename = "p_grid.points", skip_serializing_if = "Option::is_none")]
    pub p_points: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct PortraitSweepArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<Json>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<Json>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: PGridArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct RspArgs {
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "game.a", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "game.b", skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Second game {"a":..,"b":..}; needs --p
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second: Option<Json>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct AsymRegimeArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bimatrix: Option<Json>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: PGridArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct TrajectoryArgs {
    /// Incentive spec, e.g. {"kind":"constant","level":1}
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incentive: Option<Json>,
    /// Comma-separated start state.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// e.g. {"kind":"kl","reference":[0.5,0.5]}
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lyapunov: Option<Json>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct IssCheckArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incentive: Option<Json>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_hat: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_fraction: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct MoranArgs {
    /// {"N":..,"game_e1":{..},"game_e2":{..},"p":..}
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<Json>,
    /// Relative fitness of type 1 in E1.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    /// Relative fitness of type 1 in E2.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Population size.
    #[arg(short = 'N', long = "population")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: PGridArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i0: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_limit: Option<u64>,
    /// Generational updating: n_fold or full_replacement.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct HeatmapArgs {
    #[arg(short = 'N', long = "population")]
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i0: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: PGridArgs,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "s_grid.min", skip_serializing_if = "Option::is_none")]
    pub s_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(rename = "s_grid.max", skip_serializing_if = "Option::is_none")]
    pub s_max: Option<f64>,
    #[arg(long)]
    #[serde(rename = "s_grid.points", skip_serializing_if = "Option::is_none")]
    pub s_points: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct Theorem1Args {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first: Option<Json>,
    /// P1, P2, HD or Co.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_star: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_param: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}
