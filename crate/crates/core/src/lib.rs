//! Evolutionary dynamics in stochastically switching environments.
//!
//! - [`game`]: 2×2 and rock-scissors-paper payoff matrices, mixing, and phase
//!   portrait classification.
//! - [`incentive`]: incentive dynamics on the simplex, integration, Lyapunov
//!   functions and incentive-stable-state checks.
//! - [`moran`]: finite-population fixation under per-step environment switching.

pub mod game;
pub mod incentive;
pub mod moran;

mod error;
mod format;
mod rng;

pub use error::{Error, Result};
pub use format::format_g17;
pub use rng::stream_rng;

pub use game::{
    asymmetric_regime, classify_2x2, equilibria_2x2, mix_bimatrix, mix_games, mix_rsp, rsp_regime,
    switching_partner, AsymmetricRegime, Bimatrix, Equilibrium, Game2x2, PortraitClass, PortraitTag,
    RspGame, RspRegime, Stability, Strategy,
};
pub use incentive::{
    integrate, iss_check, lyapunov_monotone, lyapunov_value, IncentiveSpec, IntegrationError,
    IssOptions, IssOutcome, Landscape, LyapunovKind, LyapunovSpec, Monotonicity, SimplexState,
    Trajectory,
};
pub use moran::{
    fixation_closed_form, fixation_linear_solve, fixation_monte_carlo, simulate, simulate_generational,
    Environment, FixationMethod, FixationResult, GenerationScheme, MoranModel,
};
