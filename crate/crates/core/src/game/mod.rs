//! Game-matrix algebra for switching environments.

mod asymmetric;
mod construct;
mod rsp;
mod two_by_two;

pub use asymmetric::{asymmetric_regime, mix_bimatrix, switching_ratios, AsymmetricRegime, Bimatrix};
pub use construct::switching_partner;
pub use rsp::{mix_rsp, rsp_regime, RspGame, RspRegime};
pub use two_by_two::{
    classify_2x2, equilibria_2x2, fixation_threshold_deterministic, interior_rest_point,
    mean_relative_fitness, mix_games, Equilibrium, Game2x2, PortraitClass, PortraitTag,
    RelativeFitnessGame, Stability, Strategy, DEFAULT_TOL,
};
