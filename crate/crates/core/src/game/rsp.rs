use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Cyclic Rock-Scissors-Paper game with win payoff `a` and loss payoff `-b`:
///
/// ```text
///   |  0   a  -b |
///   | -b   0   a |
///   |  a  -b   0 |
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RspGame {
    pub a: f64,
    pub b: f64,
}

impl RspGame {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() {
            Ok(Self { a, b })
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        let (a, b) = (self.a, self.b);
        [[0.0, a, -b], [-b, 0.0, a], [a, -b, 0.0]]
    }
}

/// Mixture `p R1 + (1 - p) R2`, which is again an RSP game.
pub fn mix_rsp(first: &RspGame, second: &RspGame, p: f64) -> Result<RspGame> {
    check_probability(p)?;
    Ok(RspGame {
        a: second.a + p * (first.a - second.a),
        b: second.b + p * (first.b - second.b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RspRegime {
    ConcentricCycles,
    DivergeToBoundary,
    ConvergeToBarycenter,
}

/// Long-run behaviour of the replicator dynamic for `f(x) = A x`.
///
/// Along any interior orbit the divergence `D(x̂ || x)` from the barycenter obeys
/// `dD/dt = -(a - b)(1/3 - Σ_i x_i x_{i+1})` and the bracket is nonnegative,
/// vanishing only at the barycenter. So `a > b` (wins outweigh losses) converges,
/// `a < b` diverges toward the boundary, and `a = b` conserves `D`.
pub fn rsp_regime(game: &RspGame, tol: f64) -> Result<RspRegime> {
    if game.a.abs() <= tol && game.b.abs() <= tol {
        return Err(Error::DegenerateRsp);
    }
    let gap = game.a - game.b;
    Ok(if gap.abs() <= tol {
        RspRegime::ConcentricCycles
    } else if gap > 0.0 {
        RspRegime::ConvergeToBarycenter
    } else {
        RspRegime::DivergeToBoundary
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::DEFAULT_TOL;

    #[test]
    fn matrix_layout() {
        let m = RspGame::new(2.0, 3.0).unwrap().matrix();
        assert_eq!(m, [[0.0, 2.0, -3.0], [-3.0, 0.0, 2.0], [2.0, -3.0, 0.0]]);
    }

    #[test]
    fn mixing_breaks_balance() {
        let balanced = RspGame::new(1.0, 1.0).unwrap();
        let lossy = RspGame::new(1.0, 2.0).unwrap();
        let mixed = mix_rsp(&balanced, &lossy, 0.9).unwrap();
        assert!((mixed.a - 1.0).abs() < 1e-15);
        assert!((mixed.b - 1.1).abs() < 1e-15);
        assert_eq!(mix_rsp(&lossy, &lossy, 0.37).unwrap(), lossy);
        for k in 1..10 {
            let p = k as f64 / 10.0;
            let m = mix_rsp(&balanced, &lossy, p).unwrap();
            assert!(m.a < m.b);
            assert!(((m.a - m.b) - (1.0 - p) * (lossy.a - lossy.b)).abs() < 1e-14);
        }
    }

    #[test]
    fn mixing_matches_matrix_mixture() {
        let r1 = RspGame::new(0.3, 1.7).unwrap();
        let r2 = RspGame::new(2.0, -0.5).unwrap();
        let p = 0.35;
        let mixed = mix_rsp(&r1, &r2, p).unwrap().matrix();
        let (m1, m2) = (r1.matrix(), r2.matrix());
        for i in 0..3 {
            for j in 0..3 {
                assert!((mixed[i][j] - (p * m1[i][j] + (1.0 - p) * m2[i][j])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn regimes() {
        let r = |a, b| rsp_regime(&RspGame::new(a, b).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r(1.0, 1.0), RspRegime::ConcentricCycles);
        assert_eq!(r(2.0, 1.0), RspRegime::ConvergeToBarycenter);
        assert_eq!(r(1.0, 1.1), RspRegime::DivergeToBoundary);
        assert_eq!(
            rsp_regime(&RspGame::new(0.0, 0.0).unwrap(), DEFAULT_TOL),
            Err(Error::DegenerateRsp)
        );
    }
}
