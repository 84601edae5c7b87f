//! Two-type Moran process whose payoff matrix is redrawn before every step.

mod fixation;
mod model;
mod sim;

pub use fixation::{
    absorption_probabilities, fixation_closed_form, fixation_linear_solve, likely_fixation_threshold,
    FixationMethod, FixationResult, NEUTRAL_TOL,
};
pub use model::{fitness, transition_row, Environment, MoranModel, TransitionRow};
pub use sim::{
    fixation_monte_carlo, fixation_monte_carlo_with_limit, generational_monte_carlo, simulate,
    simulate_generational, simulate_generational_logged, simulate_logged, simulate_with_limit,
    Absorption, GenerationEvent, GenerationScheme, StepEvent, DEFAULT_STEP_LIMIT,
};
