use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::incentive::integrate::Trajectory;
use crate::incentive::simplex::SimplexState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LyapunovKind {
    /// `D(x̂ ‖ x) = Σ x̂_i ln(x̂_i / x_i)`.
    Kl,
    /// `½‖x̂ − x‖²`.
    HalfSquaredEuclidean,
    /// `p·KL + (1 − p)·½‖x̂ − x‖²`.
    Mixture { p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLyapunovSpec", into = "RawLyapunovSpec")]
pub struct LyapunovSpec {
    kind: LyapunovKind,
    reference: SimplexState,
}

#[derive(Serialize, Deserialize)]
struct RawLyapunovSpec {
    #[serde(flatten)]
    kind: LyapunovKind,
    reference: SimplexState,
}

impl LyapunovSpec {
    pub fn new(kind: LyapunovKind, reference: SimplexState) -> Result<Self> {
        let kl_weight = match kind {
            LyapunovKind::Kl => 1.0,
            LyapunovKind::HalfSquaredEuclidean => 0.0,
            LyapunovKind::Mixture { p } => check_probability(p)?,
        };
        if kl_weight > 0.0 && !reference.is_interior() {
            return Err(Error::Domain("KL reference must have strictly positive entries".into()));
        }
        Ok(Self { kind, reference })
    }

    pub fn kind(&self) -> LyapunovKind {
        self.kind
    }

    pub fn reference(&self) -> &SimplexState {
        &self.reference
    }
}

impl TryFrom<RawLyapunovSpec> for LyapunovSpec {
    type Error = Error;

    fn try_from(raw: RawLyapunovSpec) -> Result<Self> {
        Self::new(raw.kind, raw.reference)
    }
}

impl From<LyapunovSpec> for RawLyapunovSpec {
    fn from(l: LyapunovSpec) -> Self {
        Self { kind: l.kind, reference: l.reference }
    }
}

/// KL divergence of `x` from `x_hat`; `+inf` when `x` vanishes on the support of `x_hat`.
pub fn kl_divergence(x_hat: &[f64], x: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (&r, &v) in x_hat.iter().zip(x) {
        if r > 0.0 {
            if v <= 0.0 {
                return f64::INFINITY;
            }
            sum += r * (r / v).ln();
        }
    }
    sum.max(0.0)
}

pub fn half_squared_distance(x_hat: &[f64], x: &[f64]) -> f64 {
    0.5 * x_hat.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
}

pub fn lyapunov_value(l: &LyapunovSpec, x: &SimplexState) -> Result<f64> {
    let r = l.reference.as_slice();
    if r.len() != x.len() {
        return Err(Error::InvalidState(format!(
            "state has {} entries, reference has {}",
            x.len(),
            r.len()
        )));
    }
    let x = x.as_slice();
    Ok(match l.kind {
        LyapunovKind::Kl => kl_divergence(r, x),
        LyapunovKind::HalfSquaredEuclidean => half_squared_distance(r, x),
        LyapunovKind::Mixture { p } => {
            let d0 = (1.0 - p) * half_squared_distance(r, x);
            if p > 0.0 {
                p * kl_divergence(r, x) + d0
            } else {
                d0
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Monotonicity {
    MonotoneDecreasing,
    /// `V(x_{step+1}) > V(x_step) + tol`; the first such step.
    Violation { step: usize, increase: f64 },
}

pub fn lyapunov_monotone(traj: &Trajectory, l: &LyapunovSpec, tol: f64) -> Result<Monotonicity> {
    let mut prev: Option<f64> = None;
    for (k, x) in traj.states.iter().enumerate() {
        let v = lyapunov_value(l, x)?;
        if let Some(u) = prev {
            if v > u + tol {
                return Ok(Monotonicity::Violation { step: k - 1, increase: v - u });
            }
        }
        prev = Some(v);
    }
    Ok(Monotonicity::MonotoneDecreasing)
}
