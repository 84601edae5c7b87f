use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::game::Game2x2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Environment {
    E1,
    E2,
}

/// Self-excluded average payoffs `(f₁(i), f₂(i))` with `i` type-1 individuals.
pub fn fitness(game: &Game2x2, i: usize, n: usize) -> Result<(f64, f64)> {
    if n < 2 || i == 0 || i >= n {
        return Err(Error::Domain(format!("fitness needs 1 <= i <= N - 1 and N >= 2, got i = {i}, N = {n}")));
    }
    let (fi, fnn) = (i as f64, n as f64);
    let f1 = (game.a * (fi - 1.0) + game.b * (fnn - fi)) / (fnn - 1.0);
    let f2 = (game.c * fi + game.d * (fnn - fi - 1.0)) / (fnn - 1.0);
    Ok((f1, f2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    pub up: f64,
    pub down: f64,
    pub stay: f64,
}

impl TransitionRow {
    pub const ABSORBING: Self = Self { up: 0.0, down: 0.0, stay: 1.0 };

    pub fn mix(&self, other: &Self, p: f64) -> Self {
        let up = p * self.up + (1.0 - p) * other.up;
        let down = p * self.down + (1.0 - p) * other.down;
        Self { up, down, stay: 1.0 - up - down }
    }
}

/// One-step probabilities of the birth-death chain: a parent is drawn in
/// proportion to fitness, the individual it replaces uniformly.
///
/// Zero fitness is allowed as long as some individual can reproduce.
pub fn transition_row(game: &Game2x2, i: usize, n: usize) -> Result<TransitionRow> {
    if n < 2 || i > n {
        return Err(Error::Domain(format!("state i = {i} outside 0..={n}")));
    }
    if i == 0 || i == n {
        return Ok(TransitionRow::ABSORBING);
    }
    let (f1, f2) = fitness(game, i, n)?;
    if f1 < 0.0 || f2 < 0.0 {
        return Err(Error::Domain(format!("negative fitness ({f1}, {f2}) at i = {i}")));
    }
    let (fi, fnn) = (i as f64, n as f64);
    let total = fi * f1 + (fnn - fi) * f2;
    if !(total > 0.0) {
        return Err(Error::Domain(format!("no individual can reproduce at i = {i}")));
    }
    let up = fi * f1 / total * ((fnn - fi) / fnn);
    let down = (fnn - fi) * f2 / total * (fi / fnn);
    Ok(TransitionRow { up, down, stay: 1.0 - up - down })
}

/// Two-environment Moran process: before every step environment `E1` is drawn
/// with probability `p`, otherwise `E2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct MoranModel {
    n: usize,
    game_e1: Game2x2,
    game_e2: Game2x2,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    #[serde(rename = "N")]
    n: usize,
    game_e1: Game2x2,
    game_e2: Game2x2,
    p: f64,
}

impl MoranModel {
    pub fn new(n: usize, game_e1: Game2x2, game_e2: Game2x2, p: f64) -> Result<Self> {
        check_probability(p)?;
        if n < 2 {
            return Err(Error::Domain(format!("population size must be at least 2, got {n}")));
        }
        game_e1.validate()?;
        game_e2.validate()?;
        for i in 1..n {
            transition_row(&game_e1, i, n)?;
            transition_row(&game_e2, i, n)?;
        }
        Ok(Self { n, game_e1, game_e2, p })
    }

    /// Type 1 has relative fitness `s` in `E1` and `t` in `E2`.
    pub fn relative_fitness(n: usize, s: f64, t: f64, p: f64) -> Result<Self> {
        Self::new(n, Game2x2::relative_fitness(s), Game2x2::relative_fitness(t), p)
    }

    pub fn population(&self) -> usize {
        self.n
    }

    pub fn game(&self, env: Environment) -> &Game2x2 {
        match env {
            Environment::E1 => &self.game_e1,
            Environment::E2 => &self.game_e2,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rows(&self, env: Environment) -> Vec<TransitionRow> {
        let game = self.game(env);
        (0..=self.n)
            .map(|i| transition_row(game, i, self.n).expect("validated at construction"))
            .collect()
    }

    /// Rows of the marginal chain `p·T^{E1} + (1 − p)·T^{E2}`.
    pub fn mean_rows(&self) -> Vec<TransitionRow> {
        self.rows(Environment::E1)
            .iter()
            .zip(self.rows(Environment::E2))
            .map(|(a, b)| a.mix(&b, self.p))
            .collect()
    }
}

impl TryFrom<RawModel> for MoranModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        Self::new(raw.n, raw.game_e1, raw.game_e2, raw.p)
    }
}

impl From<MoranModel> for RawModel {
    fn from(m: MoranModel) -> Self {
        Self { n: m.n, game_e1: m.game_e1, game_e2: m.game_e2, p: m.p }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_and_neutral_fitness() {
        for i in 1..10 {
            let (f1, f2) = fitness(&Game2x2::relative_fitness(1.7), i, 10).unwrap();
            assert!((f1 - 1.7).abs() < 1e-15 && (f2 - 1.0).abs() < 1e-15);
            let k = Game2x2::new(0.4, 0.4, 0.4, 0.4).unwrap();
            let (f1, f2) = fitness(&k, i, 10).unwrap();
            assert!((f1 - 0.4).abs() < 1e-15 && (f2 - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_computed_fitness() {
        let g = Game2x2::new(2.0, 3.0, 1.0, 4.0).unwrap();
        let (f1, f2) = fitness(&g, 2, 4).unwrap();
        assert!((f1 - 8.0 / 3.0).abs() < 1e-15);
        assert!((f2 - 2.0).abs() < 1e-15);
        assert!(fitness(&g, 0, 4).is_err());
        assert!(fitness(&g, 4, 4).is_err());
    }

    #[test]
    fn rows() {
        let neutral = Game2x2::relative_fitness(1.0);
        for i in 0..=7 {
            let row = transition_row(&neutral, i, 7).unwrap();
            let expected = (i * (7 - i)) as f64 / 49.0;
            assert!((row.up - expected).abs() < 1e-15 && (row.down - expected).abs() < 1e-15);
            assert!((row.up + row.down + row.stay - 1.0).abs() < 1e-12);
        }
        assert_eq!(transition_row(&neutral, 0, 7).unwrap(), TransitionRow::ABSORBING);

        let row = transition_row(&Game2x2::relative_fitness(2.0), 1, 2).unwrap();
        assert!((row.up - 1.0 / 3.0).abs() < 1e-15);
        assert!((row.down - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zero_fitness_blocks_growth() {
        let row = transition_row(&Game2x2::relative_fitness(0.0), 3, 10).unwrap();
        assert_eq!(row.up, 0.0);
        assert!((row.down - 0.3).abs() < 1e-15);
        assert!(transition_row(&Game2x2::relative_fitness(-1.0), 3, 10).is_err());
        assert!(transition_row(&Game2x2::new(0.0, 0.0, 0.0, 0.0).unwrap(), 3, 10).is_err());
    }

    #[test]
    fn model_validation_and_json() {
        assert!(MoranModel::relative_fitness(1, 2.0, 1.0, 0.5).is_err());
        assert!(MoranModel::relative_fitness(10, 2.0, 1.0, 1.5).is_err());
        assert!(MoranModel::relative_fitness(10, -2.0, 1.0, 0.5).is_err());
        let m = MoranModel::relative_fitness(10, 0.0, 2.0, 0.5).unwrap();
        let json = serde_json::to_value(m).unwrap();
        assert_eq!(json["N"], 10);
        assert_eq!(serde_json::from_value::<MoranModel>(json).unwrap(), m);
        assert!(serde_json::from_str::<MoranModel>(
            r#"{"N":1,"game_e1":{"a":1,"b":1,"c":1,"d":1},"game_e2":{"a":1,"b":1,"c":1,"d":1},"p":0.5}"#
        )
        .is_err());
    }
}
