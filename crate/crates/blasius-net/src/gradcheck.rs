//! Central-difference checks of the closed-form parameter gradients.
//!
//! Errors are relative, with the denominator floored at
//! `1e-3·max(1, |f(p)|)` so that components that are zero up to roundoff do
//! not dominate.

use blasius_net_core::problem::{self, CollocationGrid};
use blasius_net_core::rng::XorShift64Star;
use blasius_net_core::{mlp, NetworkParams, Result, TrialMode, TrialSpec};

pub const DEFAULT_DRAWS: usize = 100;
pub const DEFAULT_FD_STEP: f64 = 1e-6;
pub const DEFAULT_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `∂/∂p` of the k-th input derivative of the bare network.
    Network,
    /// `∂/∂p` of the k-th derivative of the trial solution.
    Trial,
    /// `∂/∂p` of the training loss (no derivative order).
    Loss,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Network => "network",
            Target::Trial => "trial",
            Target::Loss => "loss",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub target: Target,
    pub mode: TrialMode,
    pub order: Option<usize>,
    pub draws: usize,
    pub worst: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub draws: usize,
    pub hidden: usize,
    pub step: f64,
    pub seed: u64,
    pub domain_end: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { draws: DEFAULT_DRAWS, hidden: 5, step: DEFAULT_FD_STEP, seed: 1, domain_end: 6.0 }
    }
}

type Objective = Box<dyn Fn(&NetworkParams) -> f64>;

fn fd_worst(params: &NetworkParams, h: f64, analytic: &[f64], f: impl Fn(&NetworkParams) -> f64) -> Result<f64> {
    let flat = params.to_flat();
    let floor = 1e-3 * f(params).abs().max(1.0);
    let mut worst = 0.0f64;
    for (i, &a) in analytic.iter().enumerate() {
        let mut plus = flat.clone();
        let mut minus = flat.clone();
        plus[i] += h;
        minus[i] -= h;
        let fp = f(&NetworkParams::from_flat(params.hidden_count(), &plus)?);
        let fm = f(&NetworkParams::from_flat(params.hidden_count(), &minus)?);
        let fd = (fp - fm) / (2.0 * h);
        let err = (a - fd).abs() / a.abs().max(fd.abs()).max(floor);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// Runs every check for both trial modes.
pub fn run_all(opts: &CheckOptions) -> Result<Vec<CheckResult>> {
    let mut rng = XorShift64Star::new(opts.seed);
    let mut out = Vec::new();
    for mode in [TrialMode::PaperLiteral, TrialMode::PenaltyForm] {
        let spec = TrialSpec::new(mode, opts.domain_end)?;
        for target in [Target::Network, Target::Trial] {
            for k in 0..=mlp::MAX_ORDER {
                let mut worst = 0.0f64;
                for _ in 0..opts.draws {
                    let params = draw_params(&mut rng, opts.hidden)?;
                    let x = rng.next_unit() * opts.domain_end;
                    let (analytic, f): (Vec<f64>, Objective) = match target {
                        Target::Network => (
                            params.param_gradient_of_derivative(x, k)?.to_flat(),
                            Box::new(move |p: &NetworkParams| p.input_derivative(x, k).unwrap_or(f64::NAN)),
                        ),
                        _ => (
                            spec.param_gradient(&params, x, k)?.to_flat(),
                            Box::new(move |p: &NetworkParams| spec.derivative(p, x, k).unwrap_or(f64::NAN)),
                        ),
                    };
                    worst = worst.max(fd_worst(&params, opts.step, &analytic, f)?);
                }
                out.push(CheckResult { target, mode, order: Some(k), draws: opts.draws, worst });
            }
        }
        let grid = CollocationGrid::equidistant(problem::DEFAULT_POINTS, opts.domain_end)?;
        let mut worst = 0.0f64;
        for _ in 0..opts.draws {
            let params = draw_params(&mut rng, opts.hidden)?;
            let analytic = problem::loss_gradient(&spec, &params, &grid, problem::DEFAULT_PENALTY_WEIGHT)?.to_flat();
            let f = |p: &NetworkParams| {
                problem::loss(&spec, p, &grid, problem::DEFAULT_PENALTY_WEIGHT).map(|r| r.total).unwrap_or(f64::NAN)
            };
            worst = worst.max(fd_worst(&params, opts.step, &analytic, f)?);
        }
        out.push(CheckResult { target: Target::Loss, mode, order: None, draws: opts.draws, worst });
    }
    Ok(out)
}

fn draw_params(rng: &mut XorShift64Star, hidden: usize) -> Result<NetworkParams> {
    let flat: Vec<f64> = (0..3 * hidden).map(|_| rng.next_symmetric(1.0)).collect();
    NetworkParams::from_flat(hidden, &flat)
}
