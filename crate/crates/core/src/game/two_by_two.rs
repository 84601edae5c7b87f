use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Default absolute tolerance for every sign test on payoff differences.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A symmetric 2×2 game. Row is the focal type, column the opponent:
///
/// ```text
///   | a  b |
///   | c  d |
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Game2x2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Game2x2 {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let game = Self { a, b, c, d };
        game.validate()?;
        Ok(game)
    }

    /// Constant relative fitness `r` of type 1: rows `(r, r)` and `(1, 1)`.
    pub fn relative_fitness(r: f64) -> Self {
        Self { a: r, b: r, c: 1.0, d: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries().iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// Adds `k` to every entry of column `col` (0 or 1).
    pub fn shift_column(&self, col: usize, k: f64) -> Self {
        let mut g = *self;
        match col {
            0 => {
                g.a += k;
                g.c += k;
            }
            _ => {
                g.b += k;
                g.d += k;
            }
        }
        g
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            a: f(self.a, other.a),
            b: f(self.b, other.b),
            c: f(self.c, other.c),
            d: f(self.d, other.d),
        }
    }

    /// Payoff difference `a - c` against an opponent of type 1.
    pub fn first_column_gap(&self) -> f64 {
        self.a - self.c
    }

    /// Payoff difference `d - b` against an opponent of type 2.
    pub fn second_column_gap(&self) -> f64 {
        self.d - self.b
    }

    /// Growth factor `g(x)` in `ẋ = x(1 - x) g(x)`, where `x` is the share of type 1.
    pub fn selection_gradient(&self, x: f64) -> f64 {
        (self.a - self.c) * x + (self.b - self.d) * (1.0 - x)
    }
}

/// Type 1 has constant fitness `r` relative to type 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeFitnessGame {
    pub r: f64,
}

impl From<RelativeFitnessGame> for Game2x2 {
    fn from(g: RelativeFitnessGame) -> Self {
        Game2x2::relative_fitness(g.r)
    }
}

/// Entrywise `p * first + (1 - p) * second`.
pub fn mix_games(first: &Game2x2, second: &Game2x2, p: f64) -> Result<Game2x2> {
    check_probability(p)?;
    Ok(first.zip_with(second, |x, y| p * x + (1.0 - p) * y))
}

/// Mean relative fitness `p s + (1 - p) t`.
pub fn mean_relative_fitness(s: f64, t: f64, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(p * s + (1.0 - p) * t)
}

/// The switching probability `(1 - t) / (s - t)` at which the mean game has `r = 1`.
///
/// For `s > t`, type 1 takes over under the mean replicator dynamic iff `p` exceeds
/// this value; for `s < t` the inequality reverses.
pub fn fixation_threshold_deterministic(s: f64, t: f64) -> Result<f64> {
    if s == t {
        return Err(Error::SingularThreshold(s));
    }
    Ok((1.0 - t) / (s - t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PortraitTag {
    P1,
    P2,
    HD,
    Co,
    Degenerate,
}

impl std::fmt::Display for PortraitTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PortraitTag::P1 => "P1",
            PortraitTag::P2 => "P2",
            PortraitTag::HD => "HD",
            PortraitTag::Co => "Co",
            PortraitTag::Degenerate => "Degenerate",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for PortraitTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P1" => Ok(PortraitTag::P1),
            "P2" => Ok(PortraitTag::P2),
            "HD" => Ok(PortraitTag::HD),
            "Co" => Ok(PortraitTag::Co),
            "Degenerate" => Ok(PortraitTag::Degenerate),
            other => Err(Error::Domain(format!("unknown portrait class {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Type1,
    Type2,
}

/// Phase portrait of the two-type replicator dynamic.
///
/// `P1` is "type 2 dominates" (`a <= c`, `d >= b`) and `P2` is "type 1 dominates"
/// (`a >= c`, `d <= b`). `weak` marks a dominance game where one of the two payoff
/// gaps is zero within tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum PortraitClass {
    P1 { weak: bool },
    P2 { weak: bool },
    #[serde(rename = "HD")]
    HawkDove { rest_point: f64 },
    #[serde(rename = "Co")]
    Coordination { rest_point: f64 },
    Degenerate,
}

impl PortraitClass {
    pub fn tag(&self) -> PortraitTag {
        match self {
            PortraitClass::P1 { .. } => PortraitTag::P1,
            PortraitClass::P2 { .. } => PortraitTag::P2,
            PortraitClass::HawkDove { .. } => PortraitTag::HD,
            PortraitClass::Coordination { .. } => PortraitTag::Co,
            PortraitClass::Degenerate => PortraitTag::Degenerate,
        }
    }

    pub fn dominant(&self) -> Option<Strategy> {
        match self {
            PortraitClass::P1 { .. } => Some(Strategy::Type2),
            PortraitClass::P2 { .. } => Some(Strategy::Type1),
            _ => None,
        }
    }

    pub fn rest_point(&self) -> Option<f64> {
        match *self {
            PortraitClass::HawkDove { rest_point } | PortraitClass::Coordination { rest_point } => {
                Some(rest_point)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    fn flipped(self) -> Self {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }
}

fn sign(v: f64, tol: f64) -> Sign {
    if v > tol {
        Sign::Pos
    } else if v < -tol {
        Sign::Neg
    } else {
        Sign::Zero
    }
}

pub fn classify_2x2(game: &Game2x2, tol: f64) -> PortraitClass {
    let first = game.first_column_gap();
    let second = game.second_column_gap();
    match (sign(first, tol), sign(second, tol)) {
        (Sign::Zero, Sign::Zero) => PortraitClass::Degenerate,
        (Sign::Neg, Sign::Neg) => PortraitClass::HawkDove {
            rest_point: second / (second + first),
        },
        (Sign::Pos, Sign::Pos) => PortraitClass::Coordination {
            rest_point: second / (second + first),
        },
        (s1, s2) => {
            let weak = s1 == Sign::Zero || s2 == Sign::Zero;
            if s1 == Sign::Neg || s2 == Sign::Pos {
                PortraitClass::P1 { weak }
            } else {
                PortraitClass::P2 { weak }
            }
        }
    }
}

/// `(d - b) / (d - b + a - c)` when it lies strictly inside `(0, 1)`.
pub fn interior_rest_point(game: &Game2x2) -> Option<f64> {
    let num = game.second_column_gap();
    let den = num + game.first_column_gap();
    if den == 0.0 {
        return None;
    }
    let x = num / den;
    (x > 0.0 && x < 1.0).then_some(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Neutral,
}

/// A rest point of the two-type replicator dynamic; `x` is the share of type 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub x: f64,
    pub stability: Stability,
}

impl Equilibrium {
    pub fn state(&self) -> [f64; 2] {
        [self.x, 1.0 - self.x]
    }
}

/// Rest points ordered by `x`, with stability read off the sign of `ẋ` on each
/// adjoining interval. For a degenerate game every state is a rest point; only
/// the two endpoints are listed, both marked neutral.
pub fn equilibria_2x2(game: &Game2x2) -> Vec<Equilibrium> {
    let class = classify_2x2(game, DEFAULT_TOL);
    if class == PortraitClass::Degenerate {
        return [0.0, 1.0]
            .into_iter()
            .map(|x| Equilibrium { x, stability: Stability::Neutral })
            .collect();
    }

    // Zero out gaps inside the tolerance so the field agrees with the classifier.
    let clamp = |v: f64| if v.abs() <= DEFAULT_TOL { 0.0 } else { v };
    let alpha = clamp(game.a - game.c);
    let beta = clamp(game.b - game.d);
    let field = |x: f64| alpha * x + beta * (1.0 - x);

    let mut points = vec![0.0];
    points.extend(class.rest_point());
    points.push(1.0);

    let interval_signs: Vec<Sign> = points
        .windows(2)
        .map(|w| sign(field(0.5 * (w[0] + w[1])), 0.0))
        .collect();

    points
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            // Flow enters the point from the left when ẋ > 0, from the right when ẋ < 0.
            let inflow_left = k.checked_sub(1).map(|j| interval_signs[j]);
            let inflow_right = interval_signs.get(k).map(|s| s.flipped());
            let sides: Vec<Sign> = inflow_left.into_iter().chain(inflow_right).collect();
            let stability = if sides.iter().all(|&s| s == Sign::Pos) {
                Stability::Stable
            } else if sides.contains(&Sign::Neg) {
                Stability::Unstable
            } else {
                Stability::Neutral
            };
            Equilibrium { x, stability }
        })
        .collect()
}
