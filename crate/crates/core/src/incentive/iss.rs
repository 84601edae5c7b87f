//! Sampled check of the incentive-stable-state inequality
//! `Σ x̂_i φ_i(x) / x_i > Σ φ_i(x)` on a punctured neighborhood of `x̂`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incentive::simplex::SimplexState;
use crate::incentive::spec::{evaluate_incentive, IncentiveSpec};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IssOptions {
    pub radius: f64,
    pub samples: usize,
    /// Samples must clear this margin for the check to hold.
    pub margin: f64,
    pub seed: u64,
    /// States closer to `x̂` than `inner_fraction * radius` are not sampled.
    pub inner_fraction: f64,
}

impl Default for IssOptions {
    fn default() -> Self {
        Self { radius: 0.1, samples: 10_000, margin: 1e-10, seed: 0, inner_fraction: 0.01 }
    }
}

impl IssOptions {
    pub fn with_radius(radius: f64) -> Self {
        Self { radius, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum IssOutcome {
    Holds { min_margin: f64, samples: usize },
    Fails { witness: SimplexState, margin: f64 },
    Inconclusive { min_margin: f64, samples: usize },
}

impl IssOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Self::Fails { .. })
    }
}

/// `Σ x̂_i φ_i / x_i − Σ φ_i` at an interior state.
pub fn iss_margin(spec: &IncentiveSpec, x_hat: &SimplexState, x: &SimplexState) -> Result<f64> {
    let phi = evaluate_incentive(spec, x)?;
    let weighted: f64 = x_hat
        .as_slice()
        .iter()
        .zip(x.as_slice())
        .zip(&phi)
        .map(|((r, v), f)| r * f / v)
        .sum();
    Ok(weighted - phi.iter().sum::<f64>())
}

pub fn iss_check(spec: &IncentiveSpec, x_hat: &SimplexState, opts: &IssOptions) -> Result<IssOutcome> {
    if !(opts.radius > 0.0 && opts.radius.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {}", opts.radius)));
    }
    if !(0.0..1.0).contains(&opts.inner_fraction) {
        return Err(Error::Domain(format!("inner fraction must lie in [0, 1), got {}", opts.inner_fraction)));
    }
    if !x_hat.is_interior() {
        return Err(Error::Domain("the reference state must be interior".into()));
    }
    spec.validate()?;
    let n = x_hat.len();
    if spec.dim().is_some_and(|d| d != n) {
        return Err(Error::InvalidState(format!("reference has {n} entries, incentive expects {:?}", spec.dim())));
    }
    if n < 2 {
        return Err(Error::Domain("a one-type simplex has no neighborhood".into()));
    }

    let mut rng = stream_rng(opts.seed, 0);
    let d = (n - 1) as f64;
    let outer = opts.radius.powf(d);
    let inner = (opts.inner_fraction * opts.radius).powf(d);
    let mut accepted = 0;
    let mut attempts = 0;
    let mut min_margin = f64::INFINITY;
    let max_attempts = opts.samples.saturating_mul(100).max(1000);
    let mut dir = vec![0.0; n];
    while accepted < opts.samples && attempts < max_attempts {
        attempts += 1;
        dir.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        let mean = dir.iter().sum::<f64>() / n as f64;
        dir.iter_mut().for_each(|v| *v -= mean);
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let rho = (inner + rng.random::<f64>() * (outer - inner)).powf(1.0 / d);
        let x: Vec<f64> = x_hat.as_slice().iter().zip(&dir).map(|(r, u)| r + rho * u / norm).collect();
        if x.iter().any(|&v| v <= 0.0) {
            continue;
        }
        let Some(x) = SimplexState::project(x) else { continue };
        accepted += 1;
        let m = iss_margin(spec, x_hat, &x)?;
        if m <= 0.0 {
            return Ok(IssOutcome::Fails { witness: x, margin: m });
        }
        min_margin = min_margin.min(m);
    }
    if accepted == opts.samples && min_margin > opts.margin {
        Ok(IssOutcome::Holds { min_margin, samples: accepted })
    } else {
        Ok(IssOutcome::Inconclusive { min_margin, samples: accepted })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Game2x2;
    use crate::incentive::spec::mix_incentives;

    /// Hawk-dove game with stable rest point `x̂ = (q, 1 - q)`.
    fn hd(q: f64) -> Game2x2 {
        Game2x2::new(0.0, q, 1.0 - q, 0.0).unwrap()
    }

    #[test]
    fn replicator_on_hawk_dove_holds() {
        let x_hat = SimplexState::pair(0.3).unwrap();
        let out = iss_check(&IncentiveSpec::replicator(&hd(0.3)), &x_hat, &IssOptions::default()).unwrap();
        assert!(out.holds(), "{out:?}");
    }

    #[test]
    fn constant_holds_at_barycenter() {
        let out = iss_check(&IncentiveSpec::constant(1.0), &SimplexState::barycenter(3), &IssOptions::default()).unwrap();
        assert!(out.holds(), "{out:?}");
    }

    #[test]
    fn replicator_on_coordination_fails() {
        let co = Game2x2::new(1.0, 0.0, 0.0, 2.0).unwrap();
        let x_hat = SimplexState::pair(2.0 / 3.0).unwrap();
        let out = iss_check(&IncentiveSpec::replicator(&co), &x_hat, &IssOptions::default()).unwrap();
        match out {
            IssOutcome::Fails { witness, margin } => {
                assert!(margin <= 0.0);
                assert!(witness.distance(&x_hat) <= 0.1 * (1.0 + 1e-12));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shared_iss_survives_mixing() {
        let x_hat = SimplexState::pair(0.4).unwrap();
        let phi = IncentiveSpec::replicator(&hd(0.4));
        let psi = IncentiveSpec::best_reply(&hd(0.4));
        let opts = IssOptions::with_radius(0.2);
        assert!(iss_check(&phi, &x_hat, &opts).unwrap().holds());
        assert!(iss_check(&psi, &x_hat, &opts).unwrap().holds());
        for p in [0.1, 0.5, 0.9] {
            let mix = mix_incentives(phi.clone(), psi.clone(), p).unwrap();
            assert!(iss_check(&mix, &x_hat, &opts).unwrap().holds(), "p = {p}");
        }
    }

    #[test]
    fn boundary_reference_is_rejected() {
        let err = iss_check(&IncentiveSpec::constant(1.0), &SimplexState::vertex(3, 0), &IssOptions::default());
        assert!(matches!(err, Err(Error::Domain(_))));
        let bad = IssOptions { radius: 0.0, ..IssOptions::default() };
        assert!(iss_check(&IncentiveSpec::constant(1.0), &SimplexState::barycenter(3), &bad).is_err());
    }

    #[test]
    fn tiny_margin_is_inconclusive() {
        let opts = IssOptions { margin: 1e3, samples: 100, ..IssOptions::default() };
        let out = iss_check(&IncentiveSpec::constant(1.0), &SimplexState::barycenter(3), &opts).unwrap();
        assert!(matches!(out, IssOutcome::Inconclusive { samples: 100, .. }));
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let co = Game2x2::new(1.0, 0.0, 0.0, 2.0).unwrap();
        let x_hat = SimplexState::pair(2.0 / 3.0).unwrap();
        let spec = IncentiveSpec::replicator(&co);
        let opts = IssOptions { seed: 7, ..IssOptions::default() };
        assert_eq!(iss_check(&spec, &x_hat, &opts).unwrap(), iss_check(&spec, &x_hat, &opts).unwrap());
    }
}
