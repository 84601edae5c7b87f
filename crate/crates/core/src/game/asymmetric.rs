//! Two payoff tables, one per environment, mixed with weight `p` on the second.
//!
//! Note the weighting here is `C = (1 - p) A + p B`, the opposite of
//! [`mix_games`](super::mix_games), which puts `p` on its first argument.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::game::two_by_two::{interior_rest_point, mix_games, Game2x2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bimatrix {
    /// Payoffs in environment E₁ (`a_ij`; fields a, b, c, d are a11, a12, a21, a22).
    #[serde(rename = "A")]
    pub first: Game2x2,
    /// Payoffs in environment E₂ (`b_ij`).
    #[serde(rename = "B")]
    pub second: Game2x2,
}

impl Bimatrix {
    pub fn new(first: Game2x2, second: Game2x2) -> Result<Self> {
        first.validate()?;
        second.validate()?;
        Ok(Self { first, second })
    }
}

/// Expected game `c_ij = (1 - p) a_ij + p b_ij`.
pub fn mix_bimatrix(game: &Bimatrix, p: f64) -> Result<Game2x2> {
    mix_games(&game.second, &game.first, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum AsymmetricRegime {
    S1Dominates,
    S2Dominates,
    Coordination,
    /// Mixed population `(x, 1 - x)` at the interior rest point of the expected game.
    HawkDove { mixed: [f64; 2] },
    Boundary,
}

/// The two switching ratios `(a11 - a21) / (b21 - b11)` and `(a12 - a22) / (b22 - b12)`.
///
/// Both denominators must be positive: strategy 2 is the better reply in the second
/// environment. Otherwise the ratio inequalities do not describe dominance.
pub fn switching_ratios(game: &Bimatrix) -> Result<(f64, f64)> {
    let (a, b) = (&game.first, &game.second);
    let den_first = b.c - b.a;
    let den_second = b.d - b.b;
    if !(den_first > 0.0 && den_second > 0.0) {
        return Err(Error::Domain(format!(
            "expected b21 > b11 and b22 > b12, got b21 - b11 = {den_first}, b22 - b12 = {den_second}"
        )));
    }
    Ok(((a.a - a.c) / den_first, (a.b - a.d) / den_second))
}

pub fn asymmetric_regime(game: &Bimatrix, p: f64, tol: f64) -> Result<AsymmetricRegime> {
    check_probability(p)?;
    let (first, second) = switching_ratios(game)?;
    if p == 1.0 {
        return Ok(AsymmetricRegime::S2Dominates);
    }
    let odds = p / (1.0 - p);
    if (first - odds).abs() <= tol || (second - odds).abs() <= tol {
        return Ok(AsymmetricRegime::Boundary);
    }
    Ok(if first.min(second) > odds {
        AsymmetricRegime::S1Dominates
    } else if first.max(second) < odds {
        AsymmetricRegime::S2Dominates
    } else if first > odds {
        AsymmetricRegime::Coordination
    } else {
        let expected = mix_bimatrix(game, p)?;
        let x = interior_rest_point(&expected).ok_or_else(|| {
            Error::Domain("expected game has no interior rest point".into())
        })?;
        AsymmetricRegime::HawkDove { mixed: [x, 1.0 - x] }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::DEFAULT_TOL;

    fn worked_example() -> Bimatrix {
        Bimatrix::new(
            Game2x2::new(5.0, 4.0, 3.0, 0.0).unwrap(),
            Game2x2::new(-4.0, -12.0, -1.0, -6.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn expected_game() {
        let g = worked_example();
        assert_eq!(mix_bimatrix(&g, 0.0).unwrap(), g.first);
        assert_eq!(mix_bimatrix(&g, 1.0).unwrap(), g.second);
        assert_eq!(mix_bimatrix(&g, 0.5).unwrap(), Game2x2::new(0.5, -4.0, 1.0, -3.0).unwrap());
    }

    // The printed tables give equal ratios: b22 - b12 = 6, so a single switch at p = 2/5.
    #[test]
    fn worked_example_ratios() {
        let (r1, r2) = switching_ratios(&worked_example()).unwrap();
        assert!((r1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((r2 - 2.0 / 3.0).abs() < 1e-15);
        let g = worked_example();
        let regime = |p| asymmetric_regime(&g, p, DEFAULT_TOL).unwrap();
        assert_eq!(regime(0.1), AsymmetricRegime::S1Dominates);
        assert_eq!(regime(0.39), AsymmetricRegime::S1Dominates);
        assert_eq!(regime(0.4), AsymmetricRegime::Boundary);
        assert_eq!(regime(0.42), AsymmetricRegime::S2Dominates);
        assert_eq!(regime(0.5), AsymmetricRegime::S2Dominates);
        assert_eq!(regime(1.0), AsymmetricRegime::S2Dominates);
    }

    // With b12 = -11 the ratios are 2/3 and 4/5, giving the three-interval structure
    // with switch points 2/5 and 4/9.
    #[test]
    fn three_interval_structure() {
        let g = Bimatrix::new(
            Game2x2::new(5.0, 4.0, 3.0, 0.0).unwrap(),
            Game2x2::new(-4.0, -11.0, -1.0, -6.0).unwrap(),
        )
        .unwrap();
        let (r1, r2) = switching_ratios(&g).unwrap();
        assert!((r1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((r2 - 0.8).abs() < 1e-15);
        assert_eq!(asymmetric_regime(&g, 0.3, DEFAULT_TOL).unwrap(), AsymmetricRegime::S1Dominates);
        assert_eq!(asymmetric_regime(&g, 0.5, DEFAULT_TOL).unwrap(), AsymmetricRegime::S2Dominates);
        for &p in &[0.41, 0.42, 0.43, 0.44] {
            match asymmetric_regime(&g, p, DEFAULT_TOL).unwrap() {
                AsymmetricRegime::HawkDove { mixed } => {
                    // interior rest point of C: (9p - 4) / (4p - 2)
                    let x = (9.0 * p - 4.0) / (4.0 * p - 2.0);
                    assert!((mixed[0] - x).abs() < 1e-12);
                    assert!((mixed[0] + mixed[1] - 1.0).abs() < 1e-15);
                }
                other => panic!("p = {p}: {other:?}"),
            }
        }
    }

    #[test]
    fn coordination_when_ratios_reversed() {
        // first ratio 1, second ratio 1/4: odds between them → Co.
        let g = Bimatrix::new(
            Game2x2::new(2.0, 1.0, 1.0, 0.0).unwrap(),
            Game2x2::new(0.0, 0.0, 1.0, 4.0).unwrap(),
        )
        .unwrap();
        assert_eq!(asymmetric_regime(&g, 0.3, DEFAULT_TOL).unwrap(), AsymmetricRegime::Coordination);
    }

    #[test]
    fn rejects_wrong_setting() {
        let g = Bimatrix::new(Game2x2::new(5.0, 4.0, 3.0, 0.0).unwrap(), Game2x2::new(1.0, 1.0, 1.0, 2.0).unwrap())
            .unwrap();
        assert!(switching_ratios(&g).is_err());
        assert!(asymmetric_regime(&worked_example(), 1.2, DEFAULT_TOL).is_err());
    }
}
