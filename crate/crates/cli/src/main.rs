//! `qbandit`: verification suites, scaling experiments, Grover runs and plots.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod config;
mod plot;
mod scaling;

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qbandit::algorithms::{faulty_grover_self_indicating, grover_channel_curve, FaultyGroverPlan};
use qbandit::bounds::{grover_lower_bound, reports_to_json, run_suite, SUITES};

use config::FileConfig;
use scaling::{Grid, Model};

#[derive(Parser)]
#[command(name = "qbandit", version, about = "Quantum bandit oracle simulator and bound verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a randomised verification suite and write the JSON report.
    Verify(VerifyArgs),
    /// Run best-arm algorithms over a grid of arm counts and gaps.
    Scaling(ScalingArgs),
    /// Success probability of faulty Grover search.
    Grover(GroverArgs),
    /// Log-log SVG of mean queries against gap from a scaling CSV.
    Plot(PlotArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// One of distance, scalar-lemmas, fidelity-lemma, coupling, history, ledger, purity, all.
    #[arg(long)]
    suite: Option<String>,
    /// Instances per sweep (defaults depend on the suite).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// A check passes when its minimum margin is at least -tol.
    #[arg(long)]
    tol: Option<f64>,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    config: Option<String>,
}

#[derive(Args)]
struct ScalingArgs {
    /// Comma-separated models: classical, erm, reusable, onetime, grover-faulty, grover-selfflag.
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated arm counts.
    #[arg(long)]
    arms: Option<String>,
    /// Comma-separated gaps between the best and the other arms.
    #[arg(long)]
    gap: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Firing probability for the Grover models.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV path; stdout when absent (the summary then goes to stderr).
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    config: Option<String>,
}

#[derive(Args)]
struct GroverArgs {
    /// selfflag or channel.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long, visible_alias = "arms")]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Error level δ for the lower-bound value.
    #[arg(long)]
    delta: Option<f64>,
    /// Sampled runs for an empirical success rate (selfflag only).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<String>,
}

#[derive(Args)]
struct PlotArgs {
    /// Scaling CSV to read.
    csv: String,
    /// SVG path; stdout when absent.
    #[arg(long)]
    out: Option<String>,
}

/// Usage or input error (exit 2).
struct Usage(String);

impl From<String> for Usage {
    fn from(s: String) -> Self {
        Usage(s)
    }
}

fn write_output(path: Option<&str>, text: &str) -> Result<(), Usage> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Usage(format!("cannot write {p}: {e}"))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Usage(e.to_string())),
    }
}

fn verify(a: VerifyArgs) -> Result<ExitCode, Usage> {
    let file = FileConfig::load(a.config.as_deref())?;
    let suite: String = file.pick(a.suite, "suite", "all".to_string())?;
    if !SUITES.contains(&suite.as_str()) {
        return Err(Usage(format!("unknown suite '{suite}'; expected one of {}", SUITES.join(", "))));
    }
    let trials = file.pick_opt(a.trials, "trials")?;
    if trials == Some(0) {
        return Err(Usage("trials must be at least 1".into()));
    }
    let seed = file.pick(a.seed, "seed", 0u64)?;
    let tol = file.pick(a.tol, "tol", 1e-9)?;
    let out: Option<String> = file.pick_opt(a.out, "out")?;
    let reports = run_suite(&suite, trials, seed, tol).map_err(|e| Usage(e.to_string()))?;
    write_output(out.as_deref(), &(reports_to_json(&reports) + "\n"))?;
    for r in &reports {
        eprintln!("{} {:<34} instances={:<7} min_margin={:+.3e}", if r.pass { "PASS" } else { "FAIL" }, r.check, r.instances, r.min_margin);
    }
    Ok(if reports.iter().all(|r| r.pass) { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn scaling_cmd(a: ScalingArgs) -> Result<ExitCode, Usage> {
    let file = FileConfig::load(a.config.as_deref())?;
    let grid = Grid {
        models: file.pick_list::<Model>(a.model.as_deref(), "model", "classical")?,
        arms: file.pick_list(a.arms.as_deref(), "arms", "")?,
        gaps: file.pick_list(a.gap.as_deref(), "gap", "")?,
        delta: file.pick(a.delta, "delta", 0.1)?,
        eta: file.pick(a.eta, "eta", 0.0)?,
        p: file.pick(a.p, "p", 0.5)?,
        trials: file.pick(a.trials, "trials", 20usize)?,
        seed: file.pick(a.seed, "seed", 0u64)?,
    };
    if grid.models.is_empty() || grid.arms.is_empty() || grid.gaps.is_empty() {
        return Err(Usage("empty grid: give at least one model, arm count and gap".into()));
    }
    if grid.trials == 0 {
        return Err(Usage("trials must be at least 1".into()));
    }
    if let Some(g) = grid.gaps.iter().find(|g| !(**g > 0.0 && **g < 0.5)) {
        return Err(Usage(format!("gap {g} outside (0, 0.5)")));
    }
    let out: Option<String> = file.pick_opt(a.out, "out")?;
    let outcome = scaling::run(&grid);
    let mut csv = Vec::new();
    scaling::write_csv(&mut csv, &outcome.cells).map_err(|e| Usage(e.to_string()))?;
    write_output(out.as_deref(), &String::from_utf8(csv).expect("csv is utf-8"))?;
    let summary = scaling::summary(&outcome);
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(ExitCode::SUCCESS)
}

fn grover_cmd(a: GroverArgs) -> Result<ExitCode, Usage> {
    let file = FileConfig::load(a.config.as_deref())?;
    let variant: String = file.pick(a.variant, "variant", "selfflag".to_string())?;
    let n: usize = file.pick(a.n, "n", 16)?;
    let p: f64 = file.pick(a.p, "p", 0.5)?;
    let delta: f64 = file.pick(a.delta, "delta", 0.0)?;
    let trials: usize = file.pick(a.trials, "trials", 0)?;
    let seed: u64 = file.pick(a.seed, "seed", 0)?;
    if n < 2 {
        return Err(Usage("grover needs n >= 2".into()));
    }
    let bound = match grover_lower_bound(n, p, delta) {
        Ok(b) => format!("{b}"),
        Err(e) => format!("undefined ({e})"),
    };
    match variant.as_str() {
        "selfflag" => {
            let plan = FaultyGroverPlan::new(n, p).map_err(|e| Usage(e.to_string()))?;
            println!("variant=selfflag n={n} p={p}");
            println!("rounds={}", plan.rounds);
            println!("success={}", plan.success_probability());
            if trials > 0 {
                let hits = (0..trials as u64)
                    .filter(|&k| faulty_grover_self_indicating(n, p, 1, seed.wrapping_add(k)).map(|r| r.success).unwrap_or(false))
                    .count();
                println!("empirical_success={}", hits as f64 / trials as f64);
            }
            println!("lower_bound={bound}");
        }
        "channel" => {
            let max_rounds = (4.0 * (n as f64).sqrt()).ceil() as usize;
            let curve = grover_channel_curve(n, p, 1, max_rounds).map_err(|e| Usage(e.to_string()))?;
            println!("variant=channel n={n} p={p} delta={delta}");
            for (t, s) in curve.iter().enumerate() {
                println!("T={t} success={s}");
            }
            let (t_best, best) = curve.iter().enumerate().fold((0, curve[0]), |b, (t, &s)| if s > b.1 { (t, s) } else { b });
            println!("max_success={best} at T={t_best}");
            println!("lower_bound={bound}");
        }
        other => return Err(Usage(format!("unknown variant '{other}'; expected selfflag or channel"))),
    }
    Ok(ExitCode::SUCCESS)
}

fn plot_cmd(a: PlotArgs) -> Result<ExitCode, Usage> {
    let text = std::fs::read_to_string(&a.csv).map_err(|e| Usage(format!("cannot read {}: {e}", a.csv)))?;
    let series = plot::read_series(&text).map_err(|e| Usage(format!("{}: {e}", a.csv)))?;
    write_output(a.out.as_deref(), &plot::render_svg(&series))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("QBANDIT_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: QBANDIT_THREADS must be a positive integer, got '{v}'");
                return ExitCode::from(2);
            }
        }
    }
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Scaling(a) => scaling_cmd(a),
        Command::Grover(a) => grover_cmd(a),
        Command::Plot(a) => plot_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
