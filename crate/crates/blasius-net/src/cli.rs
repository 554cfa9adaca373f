//! `blasius-net` subcommands.
//!
//! Exit codes: 0 on success, 1 when a command fails, 2 on usage errors.

use std::ffi::OsString;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use blasius_net_core::oracle::{self, BlasiusSeries};
use blasius_net_core::problem::{self, CollocationGrid};
use blasius_net_core::report::{self, ComparisonRow, TableId};
use blasius_net_core::trainer::{self, Optimizer};
use blasius_net_core::{SolutionProfile, TrainingConfig, TrialMode, TrialSpec};

use crate::gradcheck::{self, CheckOptions};
use crate::{fixtures, fmt_f64, model_file, parallel, profile_csv};

#[derive(Debug, Parser)]
#[command(name = "blasius-net", version, about = "Neural trial-solution solver for the Blasius equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a network (best of several seeds) and save it.
    Solve(SolveArgs),
    /// Solve by RK4 shooting and print the profile as CSV.
    Oracle(OracleArgs),
    /// Evaluate the Blasius power series.
    Series(SeriesArgs),
    /// Compare a model, the oracle or a table's own column against a reference table.
    Compare(CompareArgs),
    /// Check the analytic gradients against central differences.
    CheckGradients(CheckArgs),
    /// Evaluate a saved model on a uniform grid.
    Profile(ProfileArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Trial-solution form: `paper` or `penalty`.
    #[arg(long, default_value = "penalty")]
    mode: TrialMode,
    #[arg(long, default_value_t = trainer::DEFAULT_HIDDEN)]
    hidden: usize,
    /// Number of equidistant collocation points.
    #[arg(long, default_value_t = problem::DEFAULT_POINTS)]
    points: usize,
    #[arg(long, default_value_t = 6.0)]
    domain_end: f64,
    /// Seed of the first run; further runs use consecutive seeds.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = trainer::DEFAULT_MAX_ITERATIONS)]
    iterations: usize,
    /// Sets all three learning rates; the per-group flags override it.
    /// Defaults to 3e-5 for `penalty` and 1e-9 for `paper`.
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    lr_v: Option<f64>,
    #[arg(long)]
    lr_u: Option<f64>,
    #[arg(long)]
    lr_w: Option<f64>,
    /// Momentum coefficient; 0 selects plain gradient descent.
    #[arg(long, default_value_t = trainer::DEFAULT_MOMENTUM)]
    momentum: f64,
    /// Weight of the far-field penalty (ignored in `paper` mode).
    #[arg(long, default_value_t = problem::DEFAULT_PENALTY_WEIGHT)]
    penalty: f64,
    #[arg(long, default_value_t = trainer::DEFAULT_INIT_SCALE)]
    init_scale: f64,
    #[arg(long, default_value_t = trainer::DEFAULT_LOSS_TARGET)]
    loss_target: f64,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    /// Model file to write; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = oracle::DEFAULT_ETA_FAR)]
    eta_max: f64,
    #[arg(long, default_value_t = oracle::DEFAULT_STEP)]
    step: f64,
    /// Where `f'(eta) = 1` is imposed while shooting.
    #[arg(long, default_value_t = oracle::DEFAULT_ETA_FAR)]
    eta_far: f64,
    #[arg(long, default_value_t = oracle::DEFAULT_SHOOT_TOL)]
    tol: f64,
    /// Print every n-th integration step.
    #[arg(long, default_value_t = 1)]
    every: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeriesArgs {
    /// Wall shear f''(0); found by shooting when omitted.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = oracle::DEFAULT_SERIES_TERMS)]
    terms: usize,
    #[arg(long, default_value_t = 2.0)]
    eta_max: f64,
    #[arg(long, default_value_t = 0.2)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Table number, 1 to 8.
    #[arg(long)]
    table: u8,
    /// Reference column, counting from 1.
    #[arg(long, default_value_t = 1)]
    column: usize,
    /// Saved model to evaluate.
    #[arg(long, conflicts_with_all = ["oracle", "published"], required_unless_present_any = ["oracle", "published"])]
    model: Option<PathBuf>,
    /// Use the RK4 shooting solution instead of a model.
    #[arg(long)]
    oracle: bool,
    /// Use the table's own published network column.
    #[arg(long, conflicts_with = "oracle")]
    published: bool,
    /// Drop table rows beyond this abscissa.
    #[arg(long)]
    eta_max: Option<f64>,
    #[arg(long, default_value_t = oracle::DEFAULT_STEP)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, default_value_t = gradcheck::DEFAULT_DRAWS)]
    draws: usize,
    #[arg(long, default_value_t = trainer::DEFAULT_HIDDEN)]
    hidden: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = gradcheck::DEFAULT_FD_STEP)]
    step: f64,
    #[arg(long, default_value_t = gradcheck::DEFAULT_TOLERANCE)]
    tol: f64,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[arg(long)]
    model: PathBuf,
    /// Defaults to the model's domain end.
    #[arg(long)]
    eta_max: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Series(a) => series(a),
        Command::Compare(a) => compare(a),
        Command::CheckGradients(a) => check_gradients(a),
        Command::Profile(a) => profile(a),
    }
}

/// Writes to the file atomically, or to stdout.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => model_file::write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// `0, step, 2·step, ...` up to and including `eta_max`.
fn uniform_etas(eta_max: f64, step: f64) -> anyhow::Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && eta_max.is_finite() && eta_max >= 0.0) {
        bail!("need step > 0 and eta_max >= 0, got step={step}, eta_max={eta_max}");
    }
    let n = (eta_max / step + 1e-9).floor() as usize;
    let mut etas: Vec<f64> = (0..=n).map(|i| i as f64 * step).filter(|&e| e <= eta_max).collect();
    if etas.last().is_none_or(|&e| eta_max - e > 1e-9 * step) {
        etas.push(eta_max);
    }
    Ok(etas)
}

fn solve(a: SolveArgs) -> anyhow::Result<i32> {
    let trial = TrialSpec::new(a.mode, a.domain_end)?;
    let lr = a.lr.unwrap_or_else(|| trainer::default_learning_rate(a.mode));
    let cfg = TrainingConfig {
        hidden_count: a.hidden,
        grid: CollocationGrid::equidistant(a.points, a.domain_end)?,
        trial,
        lr_v: a.lr_v.unwrap_or(lr),
        lr_u: a.lr_u.unwrap_or(lr),
        lr_w: a.lr_w.unwrap_or(lr),
        penalty_weight: a.penalty,
        max_iterations: a.iterations,
        loss_target: a.loss_target,
        seed: a.seed,
        init_scale: a.init_scale,
        optimizer: if a.momentum == 0.0 { Optimizer::PlainGD } else { Optimizer::MomentumGD { momentum: a.momentum } },
        history_stride: trainer::DEFAULT_HISTORY_STRIDE,
    };
    let result = parallel::multi_run(&cfg, a.runs)?;
    let stats = result.loss_stats();
    let best = &result.best;
    eprintln!(
        "runs={} finished={} diverged={} loss_mean={} loss_min={} loss_max={}",
        a.runs,
        stats.finished,
        stats.diverged,
        fmt_f64(stats.mean),
        fmt_f64(stats.min),
        fmt_f64(stats.max)
    );
    eprintln!("best seed={} loss={} iterations={}", best.seed, fmt_f64(best.final_loss), best.iterations_used);
    emit(a.out.as_deref(), &model_file::format_model(&best.final_params, &trial))?;
    Ok(0)
}

fn oracle_cmd(a: OracleArgs) -> anyhow::Result<i32> {
    if a.every == 0 {
        bail!("--every must be at least 1");
    }
    let sigma = oracle::shoot_with_step(a.eta_far, a.tol, a.step)?;
    let full = oracle::rk4_profile(sigma, a.eta_max, a.step)?;
    let last = full.len() - 1;
    let rows = full.into_rows().into_iter().enumerate().filter(|(i, _)| i % a.every == 0 || *i == last).map(|(_, r)| r);
    let profile = SolutionProfile::new(rows.collect())?;
    let text = format!("# sigma={}\n{}", fmt_f64(sigma), profile_csv::profile_to_string(&profile));
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn series(a: SeriesArgs) -> anyhow::Result<i32> {
    let sigma = match a.sigma {
        Some(s) => s,
        None => oracle::shoot(oracle::DEFAULT_ETA_FAR, oracle::DEFAULT_SHOOT_TOL)?,
    };
    let series = BlasiusSeries::new(sigma, a.terms)?;
    let mut text = format!("# sigma={} terms={}\neta,f,last_term\n", fmt_f64(sigma), a.terms);
    for eta in uniform_etas(a.eta_max, a.step)? {
        let sum = series.eval(eta)?;
        text.push_str(&format!("{},{},{}\n", fmt_f64(eta), fmt_f64(sum.value), fmt_f64(sum.last_term)));
    }
    emit(a.out.as_deref(), &text)?;
    Ok(0)
}

fn compare(a: CompareArgs) -> anyhow::Result<i32> {
    let id = TableId::new(a.table)?;
    let mut table = fixtures::load_table(id)?;
    if a.column == 0 || a.column > table.column_count() {
        bail!("{id} has {} reference column(s); --column must be between 1 and that", table.column_count());
    }
    if let Some(eta_max) = a.eta_max {
        table = table.truncated(eta_max);
    }

    let profile = if a.published {
        table.published_profile()
    } else if a.oracle {
        let sigma = oracle::shoot_with_step(oracle::DEFAULT_ETA_FAR, oracle::DEFAULT_SHOOT_TOL, a.step)?;
        let eta_max = table.rows.last().map_or(0.0, |r| r.eta);
        oracle::rk4_profile(sigma, eta_max.max(a.step), a.step)?
    } else {
        let path = a.model.as_deref().expect("clap requires one source");
        let (params, spec) = model_file::load_model(path).with_context(|| format!("reading {}", path.display()))?;
        let before = table.rows.len();
        table = table.truncated(spec.domain_end());
        if table.rows.len() < before {
            eprintln!("note: {} row(s) beyond the model domain [0, {}] skipped", before - table.rows.len(), spec.domain_end());
        }
        report::evaluate_profile(&spec, &params, &table.etas())?
    };

    let rows = report::compare(&profile, &table, a.column - 1)?;
    eprintln!("{id} ({}) vs {}: max rel error {}", table.quantity.as_str(), table.sources[a.column - 1], fmt_f64(max_rel(&rows)));
    let mut buf = Vec::new();
    profile_csv::write_comparison(&mut buf, &rows)?;
    emit(a.out.as_deref(), &String::from_utf8(buf)?)?;
    Ok(0)
}

fn max_rel(rows: &[ComparisonRow]) -> f64 {
    rows.iter().filter(|r| !r.absolute).map(|r| r.rel_error).fold(0.0, f64::max)
}

fn check_gradients(a: CheckArgs) -> anyhow::Result<i32> {
    let opts = CheckOptions { draws: a.draws, hidden: a.hidden, step: a.step, seed: a.seed, ..CheckOptions::default() };
    let results = gradcheck::run_all(&opts)?;
    let mut out = BufWriter::new(io::stdout().lock());
    let mut failed = 0;
    for r in &results {
        let ok = r.worst <= a.tol;
        failed += usize::from(!ok);
        let order = r.order.map_or_else(|| "-".to_string(), |k| k.to_string());
        writeln!(
            out,
            "{:<4} {:<7} mode={:<7} order={} draws={} worst={} {}",
            if ok { "ok" } else { "FAIL" },
            r.target.as_str(),
            r.mode.as_str(),
            order,
            r.draws,
            fmt_f64(r.worst),
            if ok { "" } else { "(above tolerance)" }
        )?;
    }
    out.flush()?;
    if failed > 0 {
        eprintln!("{failed} check(s) above tolerance {}", a.tol);
        return Ok(1);
    }
    Ok(0)
}

fn profile(a: ProfileArgs) -> anyhow::Result<i32> {
    let (params, spec) = model_file::load_model(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let etas = uniform_etas(a.eta_max.unwrap_or(spec.domain_end()), a.step)?;
    let profile = report::evaluate_profile(&spec, &params, &etas)?;
    emit(a.out.as_deref(), &profile_csv::profile_to_string(&profile))?;
    Ok(0)
}
