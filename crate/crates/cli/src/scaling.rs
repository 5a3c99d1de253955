//! Query-count experiments over a grid of (model, N, gap) cells.

use std::fmt::Write as _;
use std::str::FromStr;

use qbandit::algorithms::{
    classical_successive_elimination, erm_best_arm, faulty_grover_self_indicating, grover_channel_curve, one_time_successive_elimination,
    reusable_best_arm, BanditInstance,
};
use qbandit::oracles::RewardVector;
use qbandit::rng;
use rayon::prelude::*;

pub const CSV_HEADER: [&str; 8] = ["model", "n_arms", "gap", "delta", "trial", "seed", "queries", "success"];

/// Mean of the suboptimal arms; the best arm sits `gap` above it.
pub const BASE_MEAN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Model {
    Classical,
    Erm,
    Reusable,
    OneTime,
    GroverFaulty,
    GroverSelfFlag,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Classical => "classical",
            Model::Erm => "erm",
            Model::Reusable => "reusable",
            Model::OneTime => "onetime",
            Model::GroverFaulty => "grover-faulty",
            Model::GroverSelfFlag => "grover-selfflag",
        }
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "classical" => Model::Classical,
            "erm" => Model::Erm,
            "reusable" => Model::Reusable,
            "onetime" | "one-time" => Model::OneTime,
            "grover-faulty" => Model::GroverFaulty,
            "grover-selfflag" => Model::GroverSelfFlag,
            _ => return Err(format!("unknown model '{s}'")),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub models: Vec<Model>,
    pub arms: Vec<usize>,
    pub gaps: Vec<f64>,
    pub delta: f64,
    pub eta: f64,
    /// Firing probability for the Grover models, which ignore the gap.
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub model: Model,
    pub n_arms: usize,
    pub gap: f64,
    pub delta: f64,
    pub trial: usize,
    pub seed: u64,
    pub queries: u64,
    pub success: bool,
}

pub struct Cell {
    pub model: Model,
    pub n_arms: usize,
    pub gap: f64,
    pub rows: Vec<Row>,
}

impl Cell {
    pub fn mean_queries(&self) -> f64 {
        self.rows.iter().map(|r| r.queries as f64).sum::<f64>() / self.rows.len() as f64
    }

    pub fn success_rate(&self) -> f64 {
        self.rows.iter().filter(|r| r.success).count() as f64 / self.rows.len() as f64
    }
}

pub struct Outcome {
    pub cells: Vec<Cell>,
    pub warnings: Vec<String>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` in cell `cell`.
pub fn trial_seed(seed: u64, cell: usize, trial: usize) -> u64 {
    splitmix(seed ^ splitmix(((cell as u64) << 32) | trial as u64))
}

fn run_trial(model: Model, n: usize, gap: f64, grid: &Grid, seed: u64) -> qbandit::Result<(u64, bool)> {
    let instance = || -> qbandit::Result<BanditInstance> {
        let mut means = vec![BASE_MEAN; n];
        means[0] = BASE_MEAN + gap;
        BanditInstance::new(RewardVector::new(means, grid.eta)?, grid.delta)
    };
    let target = 1 + (seed % n as u64) as usize;
    let r = match model {
        Model::Classical => classical_successive_elimination(&instance()?, seed),
        Model::OneTime => one_time_successive_elimination(&instance()?, seed)?,
        Model::Reusable => reusable_best_arm(&instance()?, seed)?,
        Model::Erm => erm_best_arm(&instance()?.rewards, gap, seed)?,
        Model::GroverSelfFlag => faulty_grover_self_indicating(n, grid.p, target, seed)?,
        Model::GroverFaulty => {
            let max_rounds = (4.0 * (n as f64).sqrt()).ceil() as usize;
            let curve = grover_channel_curve(n, grid.p, target, max_rounds)?;
            let (rounds, &best) = curve.iter().enumerate().fold((0, &curve[0]), |b, (t, s)| if *s > *b.1 { (t, s) } else { b });
            let hit = rng::sample_index(&[1.0 - best, best], &mut rng::seeded(seed)) == 1;
            return Ok((rounds as u64, hit));
        }
    };
    Ok((r.queries, r.success))
}

pub fn run(grid: &Grid) -> Outcome {
    let mut cells = Vec::new();
    let mut warnings = Vec::new();
    let mut index = 0;
    for &model in &grid.models {
        for &n in &grid.arms {
            for &gap in &grid.gaps {
                let cell = index;
                index += 1;
                let results: qbandit::Result<Vec<Row>> = (0..grid.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let seed = trial_seed(grid.seed, cell, trial);
                        let (queries, success) = run_trial(model, n, gap, grid, seed)?;
                        Ok(Row { model, n_arms: n, gap, delta: grid.delta, trial, seed, queries, success })
                    })
                    .collect();
                match results {
                    Ok(rows) => cells.push(Cell { model, n_arms: n, gap, rows }),
                    Err(e) => warnings.push(format!("skipping {} n_arms={n} gap={gap}: {e}", model.name())),
                }
            }
        }
    }
    Outcome { cells, warnings }
}

/// Float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: std::io::Write>(out: W, cells: &[Cell]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in cells.iter().flat_map(|c| &c.rows) {
        w.write_record([
            r.model.name().to_string(),
            r.n_arms.to_string(),
            fmt_float(r.gap),
            fmt_float(r.delta),
            r.trial.to_string(),
            r.seed.to_string(),
            r.queries.to_string(),
            (r.success as u8).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of ln y against ln x.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if var == 0.0 {
        return None;
    }
    Some(lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / var)
}

pub fn summary(outcome: &Outcome) -> String {
    let mut s = String::new();
    for w in &outcome.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(s, "{:<16} {:>7} {:>10} {:>16} {:>8}", "model", "n_arms", "gap", "mean_queries", "success");
    for c in &outcome.cells {
        let _ = writeln!(s, "{:<16} {:>7} {:>10.4} {:>16.2} {:>8.4}", c.model.name(), c.n_arms, c.gap, c.mean_queries(), c.success_rate());
    }
    let mut models: Vec<Model> = outcome.cells.iter().map(|c| c.model).collect();
    models.dedup();
    for m in models {
        let of_model: Vec<&Cell> = outcome.cells.iter().filter(|c| c.model == m).collect();
        let mut arms: Vec<usize> = of_model.iter().map(|c| c.n_arms).collect();
        arms.dedup();
        for n in arms {
            let pts: Vec<(f64, f64)> = of_model.iter().filter(|c| c.n_arms == n).map(|c| (c.gap, c.mean_queries())).collect();
            if let Some(k) = log_slope(&pts) {
                let _ = writeln!(s, "slope {} n_arms={n} d ln(queries)/d ln(gap) = {k:.4}", m.name());
            }
        }
        let mut gaps: Vec<f64> = of_model.iter().map(|c| c.gap).collect();
        gaps.sort_by(f64::total_cmp);
        gaps.dedup();
        for g in gaps {
            let pts: Vec<(f64, f64)> = of_model.iter().filter(|c| c.gap == g).map(|c| (c.n_arms as f64, c.mean_queries())).collect();
            if let Some(k) = log_slope(&pts) {
                let _ = writeln!(s, "slope {} gap={g} d ln(queries)/d ln(n_arms) = {k:.4}", m.name());
            }
        }
    }
    s
}
