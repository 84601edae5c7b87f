use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game2x2, RspGame};

/// Linear fitness landscape `f(x) = A x` for a square payoff matrix `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Landscape {
    n: usize,
    entries: Vec<f64>,
}

impl Landscape {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidIncentive("empty landscape matrix".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidIncentive("landscape matrix must be square".into()));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn fitness_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn fitness(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.fitness_into(x, &mut out);
        out
    }
}

impl TryFrom<Vec<Vec<f64>>> for Landscape {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<Landscape> for Vec<Vec<f64>> {
    fn from(l: Landscape) -> Self {
        l.entries.chunks(l.n).map(<[f64]>::to_vec).collect()
    }
}

impl From<&Game2x2> for Landscape {
    fn from(g: &Game2x2) -> Self {
        Self { n: 2, entries: g.entries().to_vec() }
    }
}

impl From<&RspGame> for Landscape {
    fn from(g: &RspGame) -> Self {
        Self { n: 3, entries: g.matrix().into_iter().flatten().collect() }
    }
}
