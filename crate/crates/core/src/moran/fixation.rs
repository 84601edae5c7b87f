use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moran::model::{MoranModel, TransitionRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixationMethod {
    ClosedForm,
    LinearSolve,
    MonteCarlo,
}

impl std::fmt::Display for FixationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ClosedForm => "closed_form",
            Self::LinearSolve => "linear_solve",
            Self::MonteCarlo => "monte_carlo",
        })
    }
}

/// Probability that type 1 takes over the population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixationResult {
    pub probability: f64,
    pub method: FixationMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    /// Absorbed runs the estimate is based on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    /// Runs that hit the step limit and are excluded from the estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub non_absorbed: Option<u64>,
}

impl FixationResult {
    fn exact(probability: f64, method: FixationMethod) -> Self {
        Self { probability, method, stderr: None, runs: None, non_absorbed: None }
    }
}

/// `|r − 1|` below which the neutral limit `i / N` is returned.
pub const NEUTRAL_TOL: f64 = 1e-12;

/// `(1 − r^{−i}) / (1 − r^{−N})` for constant relative fitness `r`.
pub fn fixation_closed_form(r: f64, i: usize, n: usize) -> Result<FixationResult> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("relative fitness must be positive, got {r}")));
    }
    if n == 0 || i > n {
        return Err(Error::Domain(format!("state i = {i} outside 0..={n}")));
    }
    let (fi, fnn) = (i as f64, n as f64);
    let phi = if i == 0 {
        0.0
    } else if i == n {
        1.0
    } else if (r - 1.0).abs() < NEUTRAL_TOL {
        fi / fnn
    } else {
        let l = (r - 1.0).ln_1p();
        if r > 1.0 {
            (-fi * l).exp_m1() / (-fnn * l).exp_m1()
        } else {
            ((fnn - fi) * l).exp() * (fi * l).exp_m1() / (fnn * l).exp_m1()
        }
    };
    Ok(FixationResult::exact(phi.clamp(0.0, 1.0), FixationMethod::ClosedForm))
}

/// Absorption-at-`N` probabilities of a birth-death chain, indexed by state.
///
/// States at or below the last interior state that cannot move up never reach `N`.
pub fn absorption_probabilities(rows: &[TransitionRow]) -> Vec<f64> {
    let n = rows.len() - 1;
    let mut phi = vec![0.0; n + 1];
    phi[n] = 1.0;
    let start = (1..n).rev().find(|&i| rows[i].up <= 0.0).unwrap_or(0);

    // log of prod_{l=start+1}^{j} down_l / up_l, for j = start..n-1
    let mut log_gamma = Vec::with_capacity(n - start);
    let mut acc = 0.0f64;
    log_gamma.push(acc);
    for row in &rows[start + 1..n] {
        acc += (row.down / row.up).ln();
        log_gamma.push(acc);
    }
    let max = log_gamma.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_gamma.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut partial = 0.0;
    for (k, w) in weights.iter().enumerate().take(n - start - 1) {
        partial += w;
        phi[start + k + 1] = (partial / total).min(1.0);
    }
    phi
}

/// Exact fixation probabilities of the marginal chain with rows
/// `p·T^{E1} + (1 − p)·T^{E2}`, for every starting state `0..=N`.
pub fn fixation_linear_solve(model: &MoranModel) -> Vec<FixationResult> {
    absorption_probabilities(&model.mean_rows())
        .into_iter()
        .map(|phi| FixationResult::exact(phi, FixationMethod::LinearSolve))
        .collect()
}

/// Large-population `p` above which a single type-1 mutant fixes with
/// probability above one half: `(2 − t) / (s − t)`.
pub fn likely_fixation_threshold(s: f64, t: f64) -> Result<f64> {
    if !(s > t) {
        return Err(Error::Domain(format!("threshold needs s > t, got s = {s}, t = {t}")));
    }
    Ok((2.0 - t) / (s - t))
}
