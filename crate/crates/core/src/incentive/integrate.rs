//! Fixed-step RK4 integration of incentive dynamics on the simplex.
//!
//! After every step the state is clipped at zero and rescaled to unit sum.
//!
//! Best-reply incentives make the field discontinuous across surfaces where two
//! strategies earn the same payoff. For those specs each stage of a step is
//! evaluated with the best replies frozen at their values from the start of the
//! step. When a step ends with different best replies, the crossing of the
//! switching surface is located by bisection. If the fields on both sides point
//! into the surface, the state slides along it using the Filippov combination of
//! the two one-sided fields; otherwise the step continues on the far side.
//! Without this, the state chatters across the surface at amplitude `O(dt)`.

use thiserror::Error;

use crate::error::Error;
use crate::incentive::landscape::Landscape;
use crate::incentive::lyapunov::{lyapunov_value, LyapunovSpec};
use crate::incentive::simplex::SimplexState;
use crate::incentive::spec::{IncentiveSpec, ReplyMode};

pub const DEFAULT_DT: f64 = 1e-3;

const MAX_EVENTS_PER_STEP: usize = 8;
const BISECTION_ROUNDS: usize = 48;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SimplexState>,
    /// Lyapunov value at each recorded state, when requested.
    pub lyapunov: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&SimplexState> {
        self.states.last()
    }

    pub fn with_lyapunov(mut self, spec: &LyapunovSpec) -> Result<Self, Error> {
        let values = self
            .states
            .iter()
            .map(|x| lyapunov_value(spec, x))
            .collect::<Result<Vec<_>, _>>()?;
        self.lyapunov = Some(values);
        Ok(self)
    }

    fn push(&mut self, t: f64, x: SimplexState) {
        self.times.push(t);
        self.states.push(x);
    }
}

#[derive(Debug, Error)]
pub enum IntegrationError {
    #[error(transparent)]
    Invalid(#[from] Error),

    #[error("integration produced a non-finite state at t = {t}")]
    Diverged { t: f64, partial: Trajectory },

    #[error("trajectory reached the simplex boundary at t = {t}")]
    BoundaryContact { t: f64, partial: Trajectory },
}

impl IntegrationError {
    pub fn partial(&self) -> Option<&Trajectory> {
        match self {
            Self::Invalid(_) => None,
            Self::Diverged { partial, .. } | Self::BoundaryContact { partial, .. } => Some(partial),
        }
    }
}

pub fn integrate(
    spec: &IncentiveSpec,
    x0: &SimplexState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, IntegrationError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")).into());
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain(format!("t_end must be positive, got {t_end}")).into());
    }
    spec.validate()?;
    if let Some(n) = spec.dim() {
        if n != x0.len() {
            return Err(Error::InvalidState(format!(
                "initial state has {} entries, landscape has {n} types",
                x0.len()
            ))
            .into());
        }
    }
    if spec.has_projection() && !x0.is_interior() {
        return Err(Error::BoundaryState.into());
    }

    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut traj = Trajectory::default();
    traj.push(0.0, x0.clone());

    let mut stepper = Stepper::new(spec, x0.as_slice());
    let mut x = x0.as_slice().to_vec();
    let mut t_prev = 0.0;
    for k in 1..=steps {
        let t = if k == steps { t_end } else { k as f64 * dt };
        match stepper.advance(&mut x, t - t_prev) {
            Ok(()) => {}
            Err(Error::BoundaryState) => {
                return Err(IntegrationError::BoundaryContact { t, partial: traj });
            }
            Err(_) => return Err(IntegrationError::Diverged { t, partial: traj }),
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(IntegrationError::Diverged { t, partial: traj });
        }
        if spec.has_projection() && x.iter().any(|&v| v <= 0.0) {
            return Err(IntegrationError::BoundaryContact { t, partial: traj });
        }
        let Some(state) = SimplexState::project(x.clone()) else {
            return Err(IntegrationError::Diverged { t, partial: traj });
        };
        x.copy_from_slice(state.as_slice());
        traj.push(t, state);
        t_prev = t;
    }
    Ok(traj)
}

fn axpy(x: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    x.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn rk4<F>(x: &[f64], h: f64, field: F) -> Result<Vec<f64>, Error>
where
    F: Fn(&[f64], &mut [f64]) -> Result<(), Error>,
{
    let n = x.len();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    field(x, &mut k1)?;
    field(&axpy(x, 0.5 * h, &k1), &mut k2)?;
    field(&axpy(x, 0.5 * h, &k2), &mut k3)?;
    field(&axpy(x, h, &k3), &mut k4)?;
    Ok((0..n)
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Motion constrained to the surface `f_i = f_j` of one best-reply node.
#[derive(Debug, Clone)]
struct Sliding {
    node: usize,
    old: ReplyMode,
    new: ReplyMode,
    /// Gradient of `f_i - f_j`, positive on the `old` side.
    normal: Vec<f64>,
}

impl Sliding {
    fn between(landscapes: &[&Landscape], old: &ReplyMode, new: &ReplyMode) -> Option<Self> {
        let mut changed = (0..old.len()).filter(|&k| old[k] != new[k]);
        let node = changed.next()?;
        if changed.next().is_some() {
            return None;
        }
        let pick = |from: &[usize], other: &[usize]| {
            from.iter().copied().find(|i| !other.contains(i)).or(from.first().copied())
        };
        let i = pick(&old[node], &new[node])?;
        let j = pick(&new[node], &old[node])?;
        if i == j {
            return None;
        }
        let l = landscapes[node];
        let normal = l.row(i).iter().zip(l.row(j)).map(|(a, b)| a - b).collect();
        Some(Self { node, old: old.clone(), new: new.clone(), normal })
    }

    fn one_sided(&self, spec: &IncentiveSpec, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>), Error> {
        let mut f_old = vec![0.0; x.len()];
        let mut f_new = vec![0.0; x.len()];
        spec.field_into(x, Some(&self.old), &mut f_old)?;
        spec.field_into(x, Some(&self.new), &mut f_new)?;
        Ok((f_old, f_new))
    }

    fn slopes(&self, spec: &IncentiveSpec, x: &[f64]) -> Result<(f64, f64), Error> {
        let (f_old, f_new) = self.one_sided(spec, x)?;
        Ok((dot(&self.normal, &f_old), dot(&self.normal, &f_new)))
    }

    fn field(&self, spec: &IncentiveSpec, x: &[f64], out: &mut [f64]) -> Result<(), Error> {
        let (f_old, f_new) = self.one_sided(spec, x)?;
        let (s_old, s_new) = (dot(&self.normal, &f_old), dot(&self.normal, &f_new));
        let denom = s_new - s_old;
        let lambda = if denom > 0.0 { (s_new / denom).clamp(0.0, 1.0) } else { 0.5 };
        for (o, (a, b)) in out.iter_mut().zip(f_old.iter().zip(&f_new)) {
            *o = lambda * a + (1.0 - lambda) * b;
        }
        Ok(())
    }

    /// Still on this surface: only the sliding node may differ, and only within the pair.
    fn admits(&self, mode: &ReplyMode) -> bool {
        mode.iter().enumerate().all(|(k, set)| {
            if k == self.node {
                set.iter().all(|i| self.old[k].contains(i) || self.new[k].contains(i))
            } else {
                *set == self.old[k]
            }
        })
    }
}

struct Stepper<'a> {
    spec: &'a IncentiveSpec,
    landscapes: Vec<&'a Landscape>,
    mode: ReplyMode,
    sliding: Option<Sliding>,
}

impl<'a> Stepper<'a> {
    fn new(spec: &'a IncentiveSpec, x0: &[f64]) -> Self {
        Self {
            spec,
            landscapes: spec.reply_landscapes(),
            mode: spec.reply_mode(x0),
            sliding: None,
        }
    }

    fn frozen_step(&self, x: &[f64], h: f64, mode: &ReplyMode) -> Result<Vec<f64>, Error> {
        rk4(x, h, |y, out| self.spec.field_into(y, Some(mode), out))
    }

    fn advance(&mut self, x: &mut Vec<f64>, h: f64) -> Result<(), Error> {
        let spec = self.spec;
        if self.landscapes.is_empty() {
            *x = rk4(x, h, |y, out| spec.field_into(y, None, out))?;
            return Ok(());
        }

        let mut remaining = h;
        for _ in 0..MAX_EVENTS_PER_STEP {
            if remaining <= 0.0 {
                return Ok(());
            }
            if let Some(sliding) = self.sliding.take() {
                let (s_old, s_new) = sliding.slopes(spec, x)?;
                if s_old < 0.0 && s_new > 0.0 {
                    *x = rk4(x, remaining, |y, out| sliding.field(spec, y, out))?;
                    let now = spec.reply_mode(x);
                    if sliding.admits(&now) {
                        self.sliding = Some(sliding);
                    } else {
                        self.mode = now;
                    }
                    return Ok(());
                }
                // The surface stopped attracting: leave toward the side the flow points to.
                self.mode = if s_old >= 0.0 { sliding.old } else { sliding.new };
                continue;
            }

            let mode = self.mode.clone();
            let end = self.frozen_step(x, remaining, &mode)?;
            let end_mode = spec.reply_mode(&end);
            if end_mode == mode {
                *x = end;
                return Ok(());
            }

            let (mut lo, mut hi) = (0.0, 1.0);
            let mut far_mode = end_mode;
            for _ in 0..BISECTION_ROUNDS {
                let mid = 0.5 * (lo + hi);
                let probe = self.frozen_step(x, mid * remaining, &mode)?;
                let probe_mode = spec.reply_mode(&probe);
                if probe_mode == mode {
                    lo = mid;
                } else {
                    hi = mid;
                    far_mode = probe_mode;
                }
            }
            if lo > 0.0 {
                *x = self.frozen_step(x, lo * remaining, &mode)?;
            }
            remaining *= 1.0 - lo;

            self.mode = far_mode.clone();
            if let Some(sliding) = Sliding::between(&self.landscapes, &mode, &far_mode) {
                let (s_old, s_new) = sliding.slopes(spec, x)?;
                if s_old < 0.0 && s_new > 0.0 {
                    self.mode = mode;
                    self.sliding = Some(sliding);
                }
            }
        }
        let mode = self.mode.clone();
        *x = self.frozen_step(x, remaining, &mode)?;
        Ok(())
    }
}
