use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::incentive::landscape::Landscape;
use crate::incentive::simplex::SimplexState;

pub const DEFAULT_ETA: f64 = 0.1;

fn default_eta() -> f64 {
    DEFAULT_ETA
}

/// An incentive `φ`, driving `ẋ_i = φ_i(x) - x_i Σ_j φ_j(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IncentiveSpec {
    /// `φ_i = x_i (f_i - f̄)`.
    Replicator { landscape: Landscape },
    /// `φ_i = BR_i(x) - x_i`, ties split uniformly.
    BestReply { landscape: Landscape },
    /// `φ_i ∝ exp(f_i / η)`.
    Logit {
        landscape: Landscape,
        #[serde(default = "default_eta")]
        eta: f64,
    },
    /// `φ_i = f_i - mean(f)`, interior states only.
    Projection { landscape: Landscape },
    /// `φ_i = level` for every type.
    Constant { level: f64 },
    /// `p φ + (1 - p) ψ`.
    Mixture {
        p: f64,
        first: Box<IncentiveSpec>,
        second: Box<IncentiveSpec>,
    },
}

/// Frozen best-reply sets, one per best-reply node in pre-order.
pub(crate) type ReplyMode = Vec<Vec<usize>>;

impl IncentiveSpec {
    pub fn replicator(landscape: impl Into<Landscape>) -> Self {
        Self::Replicator { landscape: landscape.into() }
    }

    pub fn best_reply(landscape: impl Into<Landscape>) -> Self {
        Self::BestReply { landscape: landscape.into() }
    }

    pub fn logit(landscape: impl Into<Landscape>, eta: f64) -> Self {
        Self::Logit { landscape: landscape.into(), eta }
    }

    pub fn projection(landscape: impl Into<Landscape>) -> Self {
        Self::Projection { landscape: landscape.into() }
    }

    pub fn constant(level: f64) -> Self {
        Self::Constant { level }
    }

    /// Number of types fixed by the landscapes, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Replicator { landscape }
            | Self::BestReply { landscape }
            | Self::Logit { landscape, .. }
            | Self::Projection { landscape } => Some(landscape.dim()),
            Self::Constant { .. } => None,
            Self::Mixture { first, second, .. } => first.dim().or_else(|| second.dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_dim(self.dim())
    }

    fn validate_dim(&self, n: Option<usize>) -> Result<()> {
        let check_dim = |l: &Landscape| match n {
            Some(n) if n != l.dim() => Err(Error::InvalidIncentive(format!(
                "landscape of dimension {} mixed with dimension {n}",
                l.dim()
            ))),
            _ => Ok(()),
        };
        match self {
            Self::Replicator { landscape }
            | Self::BestReply { landscape }
            | Self::Projection { landscape } => check_dim(landscape),
            Self::Logit { landscape, eta } => {
                if !(*eta > 0.0 && eta.is_finite()) {
                    return Err(Error::InvalidIncentive(format!("logit eta must be > 0, got {eta}")));
                }
                check_dim(landscape)
            }
            Self::Constant { level } => {
                if level.is_finite() {
                    Ok(())
                } else {
                    Err(Error::NonFinite)
                }
            }
            Self::Mixture { p, first, second } => {
                check_probability(*p)?;
                first.validate_dim(n)?;
                second.validate_dim(n)
            }
        }
    }

    pub fn has_best_reply(&self) -> bool {
        match self {
            Self::BestReply { .. } => true,
            Self::Mixture { first, second, .. } => first.has_best_reply() || second.has_best_reply(),
            _ => false,
        }
    }

    pub fn has_projection(&self) -> bool {
        match self {
            Self::Projection { .. } => true,
            Self::Mixture { first, second, .. } => first.has_projection() || second.has_projection(),
            _ => false,
        }
    }

    /// Best-reply landscapes in the same pre-order as a [`ReplyMode`]. Branches
    /// with mixture weight zero are left out: their switches cannot move the state.
    pub(crate) fn reply_landscapes(&self) -> Vec<&Landscape> {
        let mut out = Vec::new();
        self.collect_reply_landscapes(&mut out);
        out
    }

    fn collect_reply_landscapes<'a>(&'a self, out: &mut Vec<&'a Landscape>) {
        match self {
            Self::BestReply { landscape } => out.push(landscape),
            Self::Mixture { p, first, second } => {
                if *p != 0.0 {
                    first.collect_reply_landscapes(out);
                }
                if *p != 1.0 {
                    second.collect_reply_landscapes(out);
                }
            }
            _ => {}
        }
    }

    pub(crate) fn reply_mode(&self, x: &[f64]) -> ReplyMode {
        self.reply_landscapes()
            .into_iter()
            .map(|l| best_replies(&l.fitness(x)))
            .collect()
    }

    /// Evaluates `φ(x)` into `out`. With `mode`, best replies are taken from it
    /// instead of being recomputed at `x`.
    pub(crate) fn eval_into(
        &self,
        x: &[f64],
        mode: Option<&ReplyMode>,
        cursor: &mut usize,
        out: &mut [f64],
    ) -> Result<()> {
        let n = x.len();
        match self {
            Self::Replicator { landscape } => {
                landscape.fitness_into(x, out);
                let mean: f64 = out.iter().zip(x).map(|(f, xi)| f * xi).sum();
                out.iter_mut().zip(x).for_each(|(f, xi)| *f = xi * (*f - mean));
            }
            Self::BestReply { landscape } => {
                let replies = match mode {
                    Some(m) => m[*cursor].clone(),
                    None => best_replies(&landscape.fitness(x)),
                };
                *cursor += 1;
                let share = 1.0 / replies.len() as f64;
                out.iter_mut().zip(x).for_each(|(o, xi)| *o = -xi);
                for i in replies {
                    out[i] += share;
                }
            }
            Self::Logit { landscape, eta } => {
                landscape.fitness_into(x, out);
                let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                out.iter_mut().for_each(|f| *f = ((*f - max) / eta).exp());
                let total: f64 = out.iter().sum();
                out.iter_mut().for_each(|f| *f /= total);
            }
            Self::Projection { landscape } => {
                if x.iter().any(|&v| v <= 0.0) {
                    return Err(Error::BoundaryState);
                }
                landscape.fitness_into(x, out);
                let mean = out.iter().sum::<f64>() / n as f64;
                out.iter_mut().for_each(|f| *f -= mean);
            }
            Self::Constant { level } => out.iter_mut().for_each(|o| *o = *level),
            Self::Mixture { p, first, second } => {
                let mut other = vec![0.0; n];
                // A zero-weight branch has no slot in `mode`.
                let mut unused = 0;
                let (m1, c1) = if *p == 0.0 { (None, &mut unused) } else { (mode, &mut *cursor) };
                first.eval_into(x, m1, c1, out)?;
                let (m2, c2) = if *p == 1.0 { (None, &mut unused) } else { (mode, &mut *cursor) };
                second.eval_into(x, m2, c2, &mut other)?;
                out.iter_mut()
                    .zip(&other)
                    .for_each(|(o, q)| *o = p * *o + (1.0 - p) * q);
            }
        }
        Ok(())
    }

    /// `ẋ_i = φ_i - x_i Σ φ_j` into `out`.
    pub(crate) fn field_into(&self, x: &[f64], mode: Option<&ReplyMode>, out: &mut [f64]) -> Result<()> {
        let mut cursor = 0;
        self.eval_into(x, mode, &mut cursor, out)?;
        let total: f64 = out.iter().sum();
        out.iter_mut().zip(x).for_each(|(o, xi)| *o -= xi * total);
        Ok(())
    }

    fn check_state(&self, x: &SimplexState) -> Result<()> {
        self.validate()?;
        match self.dim() {
            Some(n) if n != x.len() => Err(Error::InvalidState(format!(
                "state has {} entries, landscape has {n} types",
                x.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// Indices attaining the maximum payoff (within rounding).
pub(crate) fn best_replies(f: &[f64]) -> Vec<usize> {
    let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * (1.0 + max.abs());
    f.iter()
        .enumerate()
        .filter(|(_, &v)| v >= max - tol)
        .map(|(i, _)| i)
        .collect()
}

pub fn evaluate_incentive(spec: &IncentiveSpec, x: &SimplexState) -> Result<Vec<f64>> {
    spec.check_state(x)?;
    let mut out = vec![0.0; x.len()];
    spec.eval_into(x.as_slice(), None, &mut 0, &mut out)?;
    Ok(out)
}

pub fn incentive_vector_field(spec: &IncentiveSpec, x: &SimplexState) -> Result<Vec<f64>> {
    spec.check_state(x)?;
    let mut out = vec![0.0; x.len()];
    spec.field_into(x.as_slice(), None, &mut out)?;
    Ok(out)
}

pub fn mix_incentives(first: IncentiveSpec, second: IncentiveSpec, p: f64) -> Result<IncentiveSpec> {
    check_probability(p)?;
    let mixed = IncentiveSpec::Mixture { p, first: Box::new(first), second: Box::new(second) };
    mixed.validate()?;
    Ok(mixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Game2x2, RspGame};

    fn rsp(a: f64, b: f64) -> Landscape {
        Landscape::from(&RspGame::new(a, b).unwrap())
    }

    fn state(x: &[f64]) -> SimplexState {
        SimplexState::new(x.to_vec()).unwrap()
    }

    #[test]
    fn replicator_vanishes_at_rest_point() {
        let hd = Game2x2::new(0.0, 0.7, 0.3, 0.0).unwrap();
        let spec = IncentiveSpec::replicator(&hd);
        let phi = evaluate_incentive(&spec, &state(&[0.7, 0.3])).unwrap();
        assert!(phi.iter().all(|v| v.abs() < 1e-15));
        let phi = evaluate_incentive(&IncentiveSpec::replicator(rsp(1.0, 2.0)), &SimplexState::barycenter(3))
            .unwrap();
        assert!(phi.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn replicator_zero_off_support() {
        let spec = IncentiveSpec::replicator(rsp(1.0, 1.0));
        let phi = evaluate_incentive(&spec, &state(&[0.5, 0.5, 0.0])).unwrap();
        assert_eq!(phi[2], 0.0);
    }

    #[test]
    fn constant_incentive_field() {
        let spec = IncentiveSpec::constant(1.3);
        let x = state(&[0.8, 0.1, 0.1]);
        assert_eq!(evaluate_incentive(&spec, &x).unwrap(), vec![1.3; 3]);
        let v = incentive_vector_field(&spec, &x).unwrap();
        for i in 0..3 {
            assert!((v[i] - 1.3 * (1.0 - 3.0 * x[i])).abs() < 1e-15);
        }
        let v = incentive_vector_field(&IncentiveSpec::constant(1.0), &SimplexState::barycenter(3)).unwrap();
        assert!(v.iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn logit_sharpens_to_best_reply() {
        let l = Landscape::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.5, 0.0], vec![0.2, 0.2, 0.2]]).unwrap();
        let x = state(&[0.5, 0.3, 0.2]);
        // f = (0.5, 0.15, 0.2): type 0 is the unique best reply.
        let phi = evaluate_incentive(&IncentiveSpec::logit(l.clone(), 1e-3), &x).unwrap();
        assert!((phi[0] - 1.0).abs() < 1e-6);
        assert!(phi[1].abs() < 1e-6 && phi[2].abs() < 1e-6);
        // Large payoffs stay finite thanks to the max shift.
        let big = Landscape::new(vec![vec![1e6, 0.0], vec![0.0, 1e6]]).unwrap();
        let phi = evaluate_incentive(&IncentiveSpec::logit(big, 1e-3), &state(&[0.6, 0.4])).unwrap();
        assert!(phi.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn best_reply_ties_split_uniformly() {
        let l = Landscape::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let phi = evaluate_incentive(&IncentiveSpec::best_reply(l), &state(&[0.5, 0.5])).unwrap();
        assert_eq!(phi, vec![0.0, 0.0]);
    }

    #[test]
    fn projection_requires_interior() {
        let spec = IncentiveSpec::projection(rsp(1.0, 1.0));
        assert_eq!(
            evaluate_incentive(&spec, &state(&[0.5, 0.5, 0.0])),
            Err(Error::BoundaryState)
        );
        let phi = evaluate_incentive(&spec, &state(&[0.5, 0.3, 0.2])).unwrap();
        assert!(phi.iter().sum::<f64>().abs() < 1e-15);
    }

    #[test]
    fn mixture_boundaries_and_validation() {
        let phi = IncentiveSpec::replicator(rsp(1.0, 2.0));
        let psi = IncentiveSpec::constant(1.0);
        let x = state(&[0.6, 0.3, 0.1]);
        let whole = mix_incentives(phi.clone(), psi.clone(), 1.0).unwrap();
        assert_eq!(evaluate_incentive(&whole, &x).unwrap(), evaluate_incentive(&phi, &x).unwrap());
        assert!(mix_incentives(phi.clone(), psi, 1.1).is_err());

        let two = IncentiveSpec::replicator(&Game2x2::new(1.0, 0.0, 0.0, 1.0).unwrap());
        assert!(mix_incentives(phi, two, 0.5).is_err());
        assert!(IncentiveSpec::logit(rsp(1.0, 1.0), 0.0).validate().is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let spec = IncentiveSpec::replicator(rsp(1.0, 1.0));
        assert!(evaluate_incentive(&spec, &state(&[0.5, 0.5])).is_err());
    }

    #[test]
    fn json_tagged_union() {
        let json = r#"{"kind":"mixture","p":0.9,
            "first":{"kind":"replicator","landscape":[[0,1,-2],[-2,0,1],[1,-2,0]]},
            "second":{"kind":"constant","level":1.0}}"#;
        let spec: IncentiveSpec = serde_json::from_str(json).unwrap();
        assert!(matches!(spec, IncentiveSpec::Mixture { p, .. } if p == 0.9));
        let back: IncentiveSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let logit: IncentiveSpec =
            serde_json::from_str(r#"{"kind":"logit","landscape":[[1,0],[0,1]]}"#).unwrap();
        assert!(matches!(logit, IncentiveSpec::Logit { eta, .. } if eta == DEFAULT_ETA));
    }
}
