use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Strategy;
use crate::moran::fixation::{FixationMethod, FixationResult};
use crate::moran::model::{fitness, Environment, MoranModel, TransitionRow};
use crate::rng::stream_rng;

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Absorption {
    pub fixated: Strategy,
    /// Replication events for `simulate`, generations for `simulate_generational`.
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepEvent {
    pub env: Environment,
    pub from: usize,
    pub to: usize,
}

/// Cumulative thresholds `(up, up + down)` per state for one environment.
struct Table {
    env: Environment,
    cut: Vec<(f64, f64)>,
}

impl Table {
    fn new(model: &MoranModel, env: Environment) -> Self {
        let cut = model.rows(env).iter().map(|r: &TransitionRow| (r.up, r.up + r.down)).collect();
        Self { env, cut }
    }

    fn step(&self, i: usize, rng: &mut ChaCha8Rng) -> usize {
        let (up, up_down) = self.cut[i];
        let u: f64 = rng.random();
        if u < up {
            i + 1
        } else if u < up_down {
            i - 1
        } else {
            i
        }
    }
}

struct Chain {
    n: usize,
    p: f64,
    e1: Table,
    e2: Table,
}

impl Chain {
    fn new(model: &MoranModel) -> Self {
        Self {
            n: model.population(),
            p: model.p(),
            e1: Table::new(model, Environment::E1),
            e2: Table::new(model, Environment::E2),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> &Table {
        if rng.random::<f64>() < self.p {
            &self.e1
        } else {
            &self.e2
        }
    }

    fn check_start(&self, i0: usize) -> Result<()> {
        if i0 > self.n {
            return Err(Error::Domain(format!("initial state {i0} outside 0..={}", self.n)));
        }
        Ok(())
    }

    fn winner(&self, i: usize) -> Option<Strategy> {
        if i == 0 {
            Some(Strategy::Type2)
        } else if i == self.n {
            Some(Strategy::Type1)
        } else {
            None
        }
    }

    fn run(
        &self,
        i0: usize,
        rng: &mut ChaCha8Rng,
        limit: u64,
        mut log: Option<&mut Vec<StepEvent>>,
    ) -> Result<Absorption> {
        let mut i = i0;
        let mut steps = 0;
        loop {
            if let Some(fixated) = self.winner(i) {
                return Ok(Absorption { fixated, steps });
            }
            if steps >= limit {
                return Err(Error::NotAbsorbed { state: i, steps });
            }
            let table = self.draw(rng);
            let next = table.step(i, rng);
            if let Some(log) = log.as_deref_mut() {
                log.push(StepEvent { env: table.env, from: i, to: next });
            }
            i = next;
            steps += 1;
        }
    }
}

/// Runs the switching chain from `i0` until one type fixes. Uses stream 0 of `seed`.
pub fn simulate(model: &MoranModel, i0: usize, seed: u64) -> Result<Absorption> {
    simulate_with_limit(model, i0, seed, DEFAULT_STEP_LIMIT)
}

pub fn simulate_with_limit(model: &MoranModel, i0: usize, seed: u64, limit: u64) -> Result<Absorption> {
    let chain = Chain::new(model);
    chain.check_start(i0)?;
    chain.run(i0, &mut stream_rng(seed, 0), limit, None)
}

/// Like [`simulate`], also returning every step's environment and transition.
pub fn simulate_logged(model: &MoranModel, i0: usize, seed: u64) -> Result<(Absorption, Vec<StepEvent>)> {
    let chain = Chain::new(model);
    chain.check_start(i0)?;
    let mut log = Vec::new();
    let out = chain.run(i0, &mut stream_rng(seed, 0), DEFAULT_STEP_LIMIT, Some(&mut log))?;
    Ok((out, log))
}

pub fn fixation_monte_carlo(model: &MoranModel, i0: usize, runs: u64, seed: u64) -> Result<FixationResult> {
    fixation_monte_carlo_with_limit(model, i0, runs, seed, DEFAULT_STEP_LIMIT)
}

/// Ensemble estimate over `runs` independent runs; run `k` uses stream `k` of `seed`.
///
/// Runs hitting `limit` are excluded and counted in `non_absorbed`.
pub fn fixation_monte_carlo_with_limit(
    model: &MoranModel,
    i0: usize,
    runs: u64,
    seed: u64,
    limit: u64,
) -> Result<FixationResult> {
    if runs == 0 {
        return Err(Error::Domain("at least one run is required".into()));
    }
    let chain = Chain::new(model);
    chain.check_start(i0)?;
    let (type1, absorbed) = (0..runs)
        .into_par_iter()
        .map(|k| match chain.run(i0, &mut stream_rng(seed, k), limit, None) {
            Ok(a) => (u64::from(a.fixated == Strategy::Type1), 1u64),
            Err(_) => (0, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if absorbed == 0 {
        return Err(Error::NotAbsorbed { state: i0, steps: limit });
    }
    let phi = type1 as f64 / absorbed as f64;
    Ok(FixationResult {
        probability: phi,
        method: FixationMethod::MonteCarlo,
        stderr: Some((phi * (1.0 - phi) / absorbed as f64).sqrt()),
        runs: Some(absorbed),
        non_absorbed: Some(runs - absorbed),
    })
}

/// How a generation of the generational process is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenerationScheme {
    /// `N` ordinary replication events under one environment draw.
    #[default]
    NFold,
    /// Every individual dies exactly once per generation: each event removes a
    /// uniformly chosen individual not yet replaced in this generation.
    FullReplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationEvent {
    pub env: Environment,
    pub start: usize,
    pub end: usize,
}

struct Generational<'a> {
    model: &'a MoranModel,
    chain: Chain,
    scheme: GenerationScheme,
}

impl Generational<'_> {
    fn full_replacement(&self, env: Environment, mut i: usize, rng: &mut ChaCha8Rng) -> usize {
        let n = self.chain.n;
        let game = self.model.game(env);
        // Individuals of each type not yet replaced this generation.
        let (mut old1, mut old2) = (i, n - i);
        for _ in 0..n {
            if i == 0 || i == n {
                break;
            }
            let (f1, f2) = fitness(game, i, n).expect("interior state");
            let w1 = i as f64 * f1;
            let birth_type1 = rng.random::<f64>() * (w1 + (n - i) as f64 * f2) < w1;
            let death_type1 = rng.random_range(0..old1 + old2) < old1;
            if death_type1 {
                old1 -= 1;
            } else {
                old2 -= 1;
            }
            match (birth_type1, death_type1) {
                (true, false) => i += 1,
                (false, true) => i -= 1,
                _ => {}
            }
        }
        i
    }

    fn generation(&self, env: Environment, i: usize, rng: &mut ChaCha8Rng) -> usize {
        match self.scheme {
            GenerationScheme::FullReplacement => self.full_replacement(env, i, rng),
            GenerationScheme::NFold => {
                let table = match env {
                    Environment::E1 => &self.chain.e1,
                    Environment::E2 => &self.chain.e2,
                };
                let mut i = i;
                for _ in 0..self.chain.n {
                    if self.chain.winner(i).is_some() {
                        break;
                    }
                    i = table.step(i, rng);
                }
                i
            }
        }
    }

    fn run(&self, i0: usize, rng: &mut ChaCha8Rng, mut log: Option<&mut Vec<GenerationEvent>>) -> Result<Absorption> {
        let limit = DEFAULT_STEP_LIMIT / self.chain.n as u64;
        let mut i = i0;
        let mut generations = 0;
        loop {
            if let Some(fixated) = self.chain.winner(i) {
                return Ok(Absorption { fixated, steps: generations });
            }
            if generations >= limit {
                return Err(Error::NotAbsorbed { state: i, steps: generations });
            }
            let env = if rng.random::<f64>() < self.chain.p { Environment::E1 } else { Environment::E2 };
            let end = self.generation(env, i, rng);
            if let Some(log) = log.as_deref_mut() {
                log.push(GenerationEvent { env, start: i, end });
            }
            i = end;
            generations += 1;
        }
    }
}

/// Generational process: one environment draw per generation. Uses stream 0 of `seed`.
pub fn simulate_generational(
    model: &MoranModel,
    i0: usize,
    seed: u64,
    scheme: GenerationScheme,
) -> Result<Absorption> {
    let g = Generational { model, chain: Chain::new(model), scheme };
    g.chain.check_start(i0)?;
    g.run(i0, &mut stream_rng(seed, 0), None)
}

pub fn simulate_generational_logged(
    model: &MoranModel,
    i0: usize,
    seed: u64,
    scheme: GenerationScheme,
) -> Result<(Absorption, Vec<GenerationEvent>)> {
    let g = Generational { model, chain: Chain::new(model), scheme };
    g.chain.check_start(i0)?;
    let mut log = Vec::new();
    let out = g.run(i0, &mut stream_rng(seed, 0), Some(&mut log))?;
    Ok((out, log))
}

/// Generational ensemble estimate; run `k` uses stream `k` of `seed`.
pub fn generational_monte_carlo(
    model: &MoranModel,
    i0: usize,
    runs: u64,
    seed: u64,
    scheme: GenerationScheme,
) -> Result<FixationResult> {
    if runs == 0 {
        return Err(Error::Domain("at least one run is required".into()));
    }
    let g = Generational { model, chain: Chain::new(model), scheme };
    g.chain.check_start(i0)?;
    let (type1, absorbed) = (0..runs)
        .into_par_iter()
        .map(|k| match g.run(i0, &mut stream_rng(seed, k), None) {
            Ok(a) => (u64::from(a.fixated == Strategy::Type1), 1u64),
            Err(_) => (0, 0),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if absorbed == 0 {
        return Err(Error::NotAbsorbed { state: i0, steps: DEFAULT_STEP_LIMIT });
    }
    let phi = type1 as f64 / absorbed as f64;
    Ok(FixationResult {
        probability: phi,
        method: FixationMethod::MonteCarlo,
        stderr: Some((phi * (1.0 - phi) / absorbed as f64).sqrt()),
        runs: Some(absorbed),
        non_absorbed: Some(runs - absorbed),
    })
}
