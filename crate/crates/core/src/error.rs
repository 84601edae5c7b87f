use thiserror::Error;

use crate::game::PortraitTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),

    #[error("{0}")]
    Domain(String),

    #[error("payoff entries must be finite")]
    NonFinite,

    #[error("threshold is singular when s = t (= {0}); dominance does not depend on p")]
    SingularThreshold(f64),

    #[error("no perturbation construction exists for target class {0:?}")]
    UnsupportedTarget(PortraitTag),

    #[error("RSP game with both payoffs at zero has no cyclic structure")]
    DegenerateRsp,

    #[error("invalid simplex state: {0}")]
    InvalidState(String),

    #[error("invalid incentive: {0}")]
    InvalidIncentive(String),

    #[error("the projection incentive is only defined on the interior of the simplex")]
    BoundaryState,

    #[error("chain not absorbed after {steps} steps (state {state})")]
    NotAbsorbed { state: usize, steps: u64 },
}

pub(crate) fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::Probability(p))
    }
}
