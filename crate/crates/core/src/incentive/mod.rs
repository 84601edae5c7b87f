//! Incentive dynamics `ẋ_i = φ_i(x) − x_i Σ_j φ_j(x)` on the probability simplex.

mod integrate;
mod iss;
mod landscape;
mod lyapunov;
mod simplex;
mod spec;

pub use integrate::{integrate, IntegrationError, Trajectory, DEFAULT_DT};
pub use iss::{iss_check, iss_margin, IssOptions, IssOutcome};
pub use landscape::Landscape;
pub use lyapunov::{
    half_squared_distance, kl_divergence, lyapunov_monotone, lyapunov_value, LyapunovKind,
    LyapunovSpec, Monotonicity,
};
pub use simplex::SimplexState;
pub use spec::{evaluate_incentive, incentive_vector_field, mix_incentives, IncentiveSpec, DEFAULT_ETA};
