use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A population state: nonnegative frequencies summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexState(Vec<f64>);

impl SimplexState {
    /// Allowed deviation of the component sum from one.
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidState("empty state".into()));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidState(format!("entry {v} is not a nonnegative number")));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidState(format!("entries sum to {sum}")));
        }
        Ok(Self(x))
    }

    pub fn barycenter(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut x = vec![0.0; n];
        x[i] = 1.0;
        Self(x)
    }

    /// Two-type state `(x, 1 - x)`.
    pub fn pair(x: f64) -> Result<Self> {
        Self::new(vec![x, 1.0 - x])
    }

    /// Clips negative entries to zero and rescales to unit sum. `None` if nothing
    /// positive and finite remains.
    pub fn project(mut x: Vec<f64>) -> Option<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
        x.iter_mut().for_each(|v| *v = v.max(0.0));
        let sum: f64 = x.iter().sum();
        if sum <= 0.0 {
            return None;
        }
        x.iter_mut().for_each(|v| *v /= sum);
        Some(Self(x))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0)
    }

    pub fn distance(&self, other: &SimplexState) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl TryFrom<Vec<f64>> for SimplexState {
    type Error = Error;

    fn try_from(x: Vec<f64>) -> Result<Self> {
        Self::new(x)
    }
}

impl From<SimplexState> for Vec<f64> {
    fn from(x: SimplexState) -> Self {
        x.0
    }
}

impl std::ops::Index<usize> for SimplexState {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
