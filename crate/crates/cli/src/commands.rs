//! Command implementations. Each returns its report; numeric failures that still
//! leave something to report come back as `Run::failure` next to the output.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use evoswitch::game::{switching_ratios, Equilibrium};
use evoswitch::moran::fixation_monte_carlo_with_limit;
use evoswitch::moran::generational_monte_carlo;
use evoswitch::{
    asymmetric_regime, classify_2x2, equilibria_2x2, fixation_closed_form, fixation_linear_solve, format_g17,
    integrate, iss_check, mix_bimatrix, mix_games, mix_rsp, rsp_regime, switching_partner, AsymmetricRegime,
    Environment, Error, Game2x2, IntegrationError, IssOptions, IssOutcome, MoranModel, PortraitClass,
};

use crate::config::*;
use crate::error::CliError;
use crate::output::{Cell, Output, Table};

#[derive(Debug)]
pub struct Run {
    pub output: Output,
    pub failure: Option<CliError>,
}

impl From<Output> for Run {
    fn from(output: Output) -> Self {
        Self { output, failure: None }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Run, CliError> {
    cfg.validate()?;
    Ok(match &cfg.command {
        CommandConfig::Classify(c) => classify(c)?.into(),
        CommandConfig::PortraitSweep(c) => portrait_sweep(c)?.into(),
        CommandConfig::Rsp(c) => rsp(c)?.into(),
        CommandConfig::AsymRegime(c) => asym_regime(c)?.into(),
        CommandConfig::Trajectory(c) => trajectory(c)?,
        CommandConfig::IssCheck(c) => iss(c, cfg.seed.expect("validated"))?.into(),
        CommandConfig::Moran(c) => moran(c, cfg.seed)?,
        CommandConfig::FixationHeatmap(c) => fixation_heatmap(c)?.into(),
        CommandConfig::Theorem1(c) => theorem1(c)?.into(),
    })
}

/// The serde name of a unit variant, or of the tag of an internally tagged one.
fn name<T: Serialize>(v: &T, tag: &str) -> String {
    match serde_json::to_value(v).expect("enums serialize") {
        Value::String(s) => s,
        Value::Object(m) => m[tag].as_str().expect("string tag").to_string(),
        other => other.to_string(),
    }
}

fn equilibria_cell(eq: &[Equilibrium]) -> String {
    eq.iter()
        .map(|e| format!("{}:{}", format_g17(e.x), name(&e.stability, "")))
        .collect::<Vec<_>>()
        .join(";")
}

fn regime_cell(regime: &AsymmetricRegime) -> String {
    name(regime, "regime")
}

fn class_cells(class: &PortraitClass) -> (Cell, Cell, Cell) {
    let dominant = class.dominant().map_or(Cell::Empty, |s| name(&s, "").into());
    (class.tag().to_string().into(), dominant, class.rest_point().into())
}

pub fn classify(c: &ClassifyConfig) -> Result<Output, CliError> {
    let (game, regime) = match (&c.game, &c.bimatrix, c.p) {
        (Some(g), None, None) => {
            g.validate()?;
            (*g, None)
        }
        (None, Some(bm), Some(p)) => (mix_bimatrix(bm, p)?, Some(asymmetric_regime(bm, p, c.tol)?)),
        _ => unreachable!("validated"),
    };
    let class = classify_2x2(&game, c.tol);
    let eq = equilibria_2x2(&game);
    let mut table = Table::new(["p", "class", "dominant", "rest_point", "regime", "equilibria"]);
    let (tag, dominant, rest) = class_cells(&class);
    let regime_name = regime.as_ref().map_or(Cell::Empty, |r| regime_cell(r).into());
    table.push(vec![c.p.into(), tag, dominant, rest, regime_name, equilibria_cell(&eq).into()]);
    let json = json!({
        "game": game,
        "p": c.p,
        "class": class.tag().to_string(),
        "portrait": class,
        "dominant": class.dominant(),
        "rest_point": class.rest_point(),
        "equilibria": eq,
        "regime": regime,
    });
    Ok(Output { table, json, summary: None })
}

fn sweep_table(first: &Game2x2, second: &Game2x2, ps: &[f64], tol: f64) -> Result<Table, CliError> {
    let mut table = Table::new(["p", "class", "x_hat"]);
    for &p in ps {
        let class = classify_2x2(&mix_games(first, second, p)?, tol);
        table.push(vec![p.into(), class.tag().to_string().into(), class.rest_point().into()]);
    }
    Ok(table)
}

pub fn portrait_sweep(c: &PortraitSweepConfig) -> Result<Output, CliError> {
    c.first.validate()?;
    c.second.validate()?;
    Ok(Output::table(sweep_table(&c.first, &c.second, &c.p_grid.values(), c.tol)?))
}

pub fn rsp(c: &RspConfig) -> Result<Output, CliError> {
    let game = match (&c.second, c.p) {
        (Some(second), Some(p)) => mix_rsp(&c.game, second, p)?,
        _ => c.game,
    };
    let regime = rsp_regime(&game, c.tol)?;
    let mut table = Table::new(["a", "b", "regime"]);
    table.push(vec![game.a.into(), game.b.into(), name(&regime, "").into()]);
    let json = json!({ "game": game, "p": c.p, "regime": regime });
    Ok(Output { table, json, summary: None })
}

pub fn asym_regime(c: &AsymRegimeConfig) -> Result<Output, CliError> {
    let (ratio1, ratio2) = switching_ratios(&c.bimatrix)?;
    let ps = match (c.p, &c.p_grid) {
        (Some(p), _) => vec![p],
        (None, Some(g)) => g.values(),
        (None, None) => UNIT_GRID.values(),
    };
    let mut table = Table::new(["p", "odds", "ratio_1", "ratio_2", "regime", "x_hat"]);
    for p in ps {
        let regime = asymmetric_regime(&c.bimatrix, p, c.tol)?;
        let x_hat = match regime {
            AsymmetricRegime::HawkDove { mixed } => Some(mixed[0]),
            _ => None,
        };
        let odds = if p == 1.0 { f64::INFINITY } else { p / (1.0 - p) };
        table.push(vec![p.into(), odds.into(), ratio1.into(), ratio2.into(), regime_cell(&regime).into(), x_hat.into()]);
    }
    Ok(Output::table(table))
}

pub fn trajectory(c: &TrajectoryConfig) -> Result<Run, CliError> {
    let (traj, failure) = match integrate(&c.incentive, &c.x0, c.t_end, c.dt) {
        Ok(t) => (t, None),
        Err(IntegrationError::Invalid(e)) => return Err(e.into()),
        Err(e) => (e.partial().cloned().unwrap_or_default(), Some(CliError::Numeric(e.to_string()))),
    };
    let traj = match &c.lyapunov {
        Some(l) => traj.with_lyapunov(l)?,
        None => traj,
    };
    let n = c.x0.len();
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=n).map(|i| format!("x_{i}")));
    if traj.lyapunov.is_some() {
        header.push("V".into());
    }
    let mut table = Table::new(header);
    let last = traj.len().saturating_sub(1);
    for k in (0..traj.len()).filter(|&k| k % c.stride == 0 || k == last) {
        let mut row: Vec<Cell> = vec![traj.times[k].into()];
        row.extend(traj.states[k].as_slice().iter().map(|&v| Cell::from(v)));
        if let Some(v) = &traj.lyapunov {
            row.push(v[k].into());
        }
        table.push(row);
    }
    Ok(Run { output: Output::table(table), failure })
}

pub fn iss(c: &IssCheckConfig, seed: u64) -> Result<Output, CliError> {
    let opts = IssOptions {
        radius: c.radius,
        samples: c.samples,
        margin: c.margin,
        seed,
        inner_fraction: c.inner_fraction,
    };
    let outcome = iss_check(&c.incentive, &c.x_hat, &opts)?;
    let mut table = Table::new(["result", "margin", "samples", "witness"]);
    let result: Cell = name(&outcome, "result").into();
    table.push(match &outcome {
        IssOutcome::Holds { min_margin, samples } | IssOutcome::Inconclusive { min_margin, samples } => {
            vec![result, (*min_margin).into(), (*samples).into(), Cell::Empty]
        }
        IssOutcome::Fails { witness, margin } => {
            let w: Vec<String> = witness.as_slice().iter().map(|&v| format_g17(v)).collect();
            vec![result, (*margin).into(), Cell::Empty, w.join(" ").into()]
        }
    });
    let json = serde_json::to_value(&outcome)?;
    Ok(Output { table, json, summary: None })
}

/// `(s, t)` when both environments are relative-fitness games.
fn relative_fitness(model: &MoranModel) -> Option<(f64, f64)> {
    let r = |g: &Game2x2| (g.a == g.b && g.c == 1.0 && g.d == 1.0).then_some(g.a);
    Some((r(model.game(Environment::E1))?, r(model.game(Environment::E2))?))
}

/// Closed form at the mean relative fitness; `r = 0` is the limit `r → 0⁺`.
fn closed_form_at(r: f64, i0: usize, n: usize) -> Result<f64, CliError> {
    if r == 0.0 {
        return Ok(if i0 == n { 1.0 } else { 0.0 });
    }
    Ok(fixation_closed_form(r, i0, n)?.probability)
}

pub fn moran(c: &MoranConfig, seed: Option<u64>) -> Result<Run, CliError> {
    let base = match (&c.model, c.s, c.t, c.n) {
        (Some(m), ..) => *m,
        (None, Some(s), Some(t), Some(n)) => MoranModel::relative_fitness(n, s, t, c.p.unwrap_or(0.5))?,
        _ => unreachable!("validated"),
    };
    let n = base.population();
    if c.i0 > n {
        return Err(CliError::Config(format!("i0 = {} exceeds N = {n}", c.i0)));
    }
    let st = relative_fitness(&base);
    let ps = match (c.p, &c.p_grid) {
        (Some(p), _) => vec![p],
        (None, Some(g)) => g.values(),
        (None, None) => vec![base.p()],
    };
    let mut table = Table::new(["p", "s", "t", "N", "i0", "runs", "phi_hat", "stderr", "method"]);
    let mut results = Vec::new();
    let mut non_absorbed_total = 0u64;
    let mut failure = None;
    let (s_cell, t_cell): (Cell, Cell) = (st.map(|v| v.0).into(), st.map(|v| v.1).into());
    for p in ps {
        let model = MoranModel::new(n, *base.game(Environment::E1), *base.game(Environment::E2), p)?;
        let row = |phi: f64, runs: Cell, stderr: Cell, method: &str| {
            vec![p.into(), s_cell.clone(), t_cell.clone(), n.into(), c.i0.into(), runs, phi.into(), stderr, method.into()]
        };
        let exact = fixation_linear_solve(&model)[c.i0].probability;
        let closed = st.map(|(s, t)| closed_form_at(p * s + (1.0 - p) * t, c.i0, n)).transpose()?;
        let mc = if c.runs > 0 {
            let seed = seed.expect("validated");
            let res = match c.scheme {
                None => fixation_monte_carlo_with_limit(&model, c.i0, c.runs, seed, c.step_limit),
                Some(scheme) => generational_monte_carlo(&model, c.i0, c.runs, seed, scheme),
            };
            match res {
                Ok(r) => Some(r),
                Err(Error::NotAbsorbed { .. }) => {
                    non_absorbed_total += c.runs;
                    failure = Some(CliError::NotAbsorbed(non_absorbed_total));
                    None
                }
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        if let Some(r) = &mc {
            table.push(row(r.probability, c.runs.into(), r.stderr.into(), "monte_carlo"));
            non_absorbed_total += r.non_absorbed.unwrap_or(0);
        }
        table.push(row(exact, Cell::Empty, Cell::Empty, "linear_solve"));
        if let Some(phi) = closed {
            table.push(row(phi, Cell::Empty, Cell::Empty, "closed_form"));
        }
        let difference = mc.as_ref().map(|r| r.probability - exact);
        results.push(json!({
            "p": p,
            "phi_hat": mc.as_ref().map(|r| r.probability),
            "stderr": mc.as_ref().and_then(|r| r.stderr),
            "phi_exact": exact,
            "phi_closed": closed,
            "difference": difference,
            "z": mc.as_ref().and_then(|r| Some(difference? / r.stderr.filter(|&e| e > 0.0)?)),
            "non_absorbed": mc.as_ref().and_then(|r| r.non_absorbed),
        }));
    }
    if non_absorbed_total > 0 {
        failure = Some(CliError::NotAbsorbed(non_absorbed_total));
    }
    let summary = json!({
        "N": n,
        "i0": c.i0,
        "runs": c.runs,
        "seed": seed,
        "scheme": c.scheme,
        "results": results,
    });
    let json = json!({ "rows": table.to_json(), "summary": summary });
    Ok(Run { output: Output { table, json, summary: Some(summary) }, failure })
}

pub fn fixation_heatmap(c: &HeatmapConfig) -> Result<Output, CliError> {
    let (ps, ss) = (c.p_grid.values(), c.s_grid.values());
    let cells: Vec<(f64, f64)> = ps.iter().flat_map(|&p| ss.iter().map(move |&s| (p, s))).collect();
    let phis = cells
        .par_iter()
        .map(|&(p, s)| -> Result<(f64, f64), CliError> {
            let model = MoranModel::relative_fitness(c.n, s, c.t, p)?;
            let exact = fixation_linear_solve(&model)[c.i0].probability;
            let closed = closed_form_at(p * s + (1.0 - p) * c.t, c.i0, c.n)?;
            Ok((closed, exact))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(["p", "s", "phi_closed", "phi_exact"]);
    for (&(p, s), &(closed, exact)) in cells.iter().zip(&phis) {
        table.push(vec![p.into(), s.into(), closed.into(), exact.into()]);
    }
    Ok(Output::table(table))
}

pub fn theorem1(c: &Theorem1Config) -> Result<Output, CliError> {
    let partner = switching_partner(&c.first, c.target, c.p_star, c.free_param)?;
    let first_class = classify_2x2(&c.first, c.tol).tag();
    let sweep = match c.sweep_points {
        Some(points) => Some(sweep_table(&c.first, &partner, &Grid::new(0.0, 1.0, points).values(), c.tol)?),
        None => None,
    };
    let json = json!({
        "first": c.first,
        "first_class": first_class.to_string(),
        "target": c.target.to_string(),
        "p_star": c.p_star,
        "partner": partner,
        "sweep": sweep.as_ref().map(Table::to_json),
    });
    let table = sweep.unwrap_or_else(|| {
        let mut t = Table::new(["a", "b", "c", "d"]);
        t.push(partner.entries().iter().map(|&v| Cell::from(v)).collect());
        t
    });
    Ok(Output { table, json, summary: None })
}
