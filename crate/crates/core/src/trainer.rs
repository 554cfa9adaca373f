//! Seeded gradient-descent training of the collocation loss.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::mlp::{NetworkParams, ParamGradient};
use crate::problem::{self, CollocationGrid, DEFAULT_PENALTY_WEIGHT, DEFAULT_POINTS};
use crate::rng::XorShift64Star;
use crate::trial::{TrialMode, TrialSpec};
use crate::{Error, Result};

pub const DEFAULT_HIDDEN: usize = 5;
pub const DEFAULT_LEARNING_RATE: f64 = 3e-5;
/// The `x²(x − 6)²` factor of the paper form reaches ~1.3e3 on `[0, 6]`, so
/// anything much larger than this diverges.
pub const DEFAULT_PAPER_LEARNING_RATE: f64 = 1e-9;
pub const DEFAULT_INIT_SCALE: f64 = 0.5;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
pub const DEFAULT_LOSS_TARGET: f64 = 1e-8;
pub const DEFAULT_MOMENTUM: f64 = 0.9;
pub const DEFAULT_HISTORY_STRIDE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    PlainGD,
    /// Heavy-ball momentum: `m ← μ m − lr·g`, `p ← p + m`.
    MomentumGD { momentum: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub hidden_count: usize,
    pub grid: CollocationGrid,
    pub trial: TrialSpec,
    /// Learning rate for the output weights `v`.
    pub lr_v: f64,
    /// Learning rate for the hidden biases `u`.
    pub lr_u: f64,
    /// Learning rate for the input weights `w`.
    pub lr_w: f64,
    pub penalty_weight: f64,
    pub max_iterations: usize,
    pub loss_target: f64,
    pub seed: u64,
    pub init_scale: f64,
    pub optimizer: Optimizer,
    /// The loss is appended to the history every this many iterations.
    pub history_stride: usize,
}

impl TrainingConfig {
    /// Documented defaults on `[0, 6]` with 10 equidistant points.
    pub fn new(mode: TrialMode) -> Self {
        let trial = TrialSpec::with_default_domain(mode);
        let lr = default_learning_rate(mode);
        Self {
            hidden_count: DEFAULT_HIDDEN,
            grid: CollocationGrid::equidistant(DEFAULT_POINTS, trial.domain_end())
                .expect("default grid is valid"),
            trial,
            lr_v: lr,
            lr_u: lr,
            lr_w: lr,
            penalty_weight: DEFAULT_PENALTY_WEIGHT,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            loss_target: DEFAULT_LOSS_TARGET,
            seed: 1,
            init_scale: DEFAULT_INIT_SCALE,
            optimizer: Optimizer::MomentumGD { momentum: DEFAULT_MOMENTUM },
            history_stride: DEFAULT_HISTORY_STRIDE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: alloc::string::String| Err(Error::InvalidArgument(msg));
        for (name, lr) in [("lr_v", self.lr_v), ("lr_u", self.lr_u), ("lr_w", self.lr_w)] {
            if !(lr.is_finite() && lr > 0.0) {
                return invalid(format!("{name} must be positive and finite, got {lr}"));
            }
        }
        if self.hidden_count == 0 {
            return invalid("hidden_count must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be at least 1".into());
        }
        if self.history_stride == 0 {
            return invalid("history_stride must be at least 1".into());
        }
        if !(self.loss_target.is_finite() && self.loss_target >= 0.0) {
            return invalid(format!("loss_target must be finite and >= 0, got {}", self.loss_target));
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return invalid(format!("init_scale must be positive and finite, got {}", self.init_scale));
        }
        if let Optimizer::MomentumGD { momentum } = self.optimizer {
            if !(0.0..1.0).contains(&momentum) {
                return invalid(format!("momentum must lie in [0, 1), got {momentum}"));
            }
        }
        if let Some(&x) = self.grid.points().iter().find(|&&x| x > self.trial.domain_end()) {
            return Err(Error::OutOfDomain { x, end: self.trial.domain_end() });
        }
        if !(self.penalty_weight.is_finite() && self.penalty_weight >= 0.0) {
            return invalid(format!("penalty weight must be finite and >= 0, got {}", self.penalty_weight));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRun {
    pub seed: u64,
    pub final_params: NetworkParams,
    pub final_loss: f64,
    pub iterations_used: usize,
    /// Initial loss, then every `history_stride` iterations, then the final
    /// loss if it was not already recorded.
    pub loss_history: Vec<f64>,
}

/// Draws all `3H` parameters uniformly from `[-scale, scale)` with a
/// xorshift64* stream seeded by `seed`, in the order `v`, `u`, `w`.
pub fn init_params(seed: u64, hidden_count: usize, scale: f64) -> Result<NetworkParams> {
    if hidden_count == 0 {
        return Err(Error::InvalidArgument("hidden_count must be at least 1".into()));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("init scale must be positive and finite, got {scale}")));
    }
    let mut rng = XorShift64Star::new(seed);
    let flat: Vec<f64> = (0..3 * hidden_count).map(|_| rng.next_symmetric(scale)).collect();
    NetworkParams::from_flat(hidden_count, &flat)
}

/// Momentum buffers threaded through successive [`gd_step`] calls.
#[derive(Debug, Clone, PartialEq)]
pub struct Velocity(ParamGradient);

impl Velocity {
    pub fn zeros(hidden_count: usize) -> Self {
        Self(ParamGradient::zeros(hidden_count))
    }
}

/// One descent step on the loss with per-group learning rates.
///
/// `velocity` is only read and updated for [`Optimizer::MomentumGD`]. The
/// result is not checked for finiteness.
pub fn gd_step(params: &NetworkParams, grad: &ParamGradient, cfg: &TrainingConfig, velocity: &mut Velocity) -> NetworkParams {
    let momentum = match cfg.optimizer {
        Optimizer::PlainGD => None,
        Optimizer::MomentumGD { momentum } => Some(momentum),
    };
    let vel = &mut velocity.0;
    let groups = [
        (params.output_weights(), &grad.d_output_weights, &mut vel.d_output_weights, cfg.lr_v),
        (params.hidden_biases(), &grad.d_hidden_biases, &mut vel.d_hidden_biases, cfg.lr_u),
        (params.input_weights(), &grad.d_input_weights, &mut vel.d_input_weights, cfg.lr_w),
    ];
    let mut updated: [Vec<f64>; 3] = [vec![], vec![], vec![]];
    for (out, (values, g, m, lr)) in updated.iter_mut().zip(groups) {
        *out = values
            .iter()
            .zip(g)
            .zip(m.iter_mut())
            .map(|((p, g), m)| match momentum {
                None => p - lr * g,
                Some(mu) => {
                    *m = mu * *m - lr * g;
                    p + *m
                }
            })
            .collect();
    }
    let [v, u, w] = updated;
    NetworkParams::from_parts_unchecked(v, u, w)
}

pub fn default_learning_rate(mode: TrialMode) -> f64 {
    match mode {
        TrialMode::PaperLiteral => DEFAULT_PAPER_LEARNING_RATE,
        TrialMode::PenaltyForm => DEFAULT_LEARNING_RATE,
    }
}

/// Trains from `init_params(cfg.seed, ..)` until the loss reaches
/// `loss_target` or `max_iterations` steps have been taken.
pub fn train(cfg: &TrainingConfig) -> Result<TrainingRun> {
    cfg.validate()?;
    let mut params = init_params(cfg.seed, cfg.hidden_count, cfg.init_scale)?;
    let mut velocity = Velocity::zeros(cfg.hidden_count);
    let mut history = Vec::with_capacity(cfg.max_iterations / cfg.history_stride + 2);
    let mut iteration = 0;
    loop {
        let (report, grad) = problem::loss_and_gradient(&cfg.trial, &params, &cfg.grid, cfg.penalty_weight)?;
        let loss = report.total;
        if !loss.is_finite() || !grad.is_finite() {
            return Err(Error::Diverged { iteration });
        }
        if iteration == 0 || iteration % cfg.history_stride == 0 {
            history.push(loss);
        }
        if loss <= cfg.loss_target || iteration == cfg.max_iterations {
            if iteration % cfg.history_stride != 0 {
                history.push(loss);
            }
            return Ok(TrainingRun {
                seed: cfg.seed,
                final_params: params,
                final_loss: loss,
                iterations_used: iteration,
                loss_history: history,
            });
        }
        params = gd_step(&params, &grad, cfg, &mut velocity);
        iteration += 1;
        if !params.is_finite() {
            return Err(Error::Diverged { iteration });
        }
    }
}

/// Seeds used by a multi-run: `seed, seed + 1, ...` (wrapping).
pub fn run_seeds(base_seed: u64, run_count: usize) -> impl Iterator<Item = u64> {
    (0..run_count as u64).map(move |i| base_seed.wrapping_add(i))
}

/// Picks the lowest final loss among the finished runs; ties go to the
/// smaller seed, so the choice does not depend on completion order.
pub fn select_best<I>(outcomes: I) -> Result<TrainingRun>
where
    I: IntoIterator<Item = Result<TrainingRun>>,
{
    let mut runs = 0;
    let mut best: Option<TrainingRun> = None;
    for outcome in outcomes {
        runs += 1;
        let Ok(run) = outcome else { continue };
        let better = match &best {
            None => true,
            Some(b) => run.final_loss < b.final_loss || (run.final_loss == b.final_loss && run.seed < b.seed),
        };
        if better {
            best = Some(run);
        }
    }
    best.ok_or(Error::AllRunsDiverged { runs })
}

/// Runs `run_count` trainings with consecutive seeds, sequentially, and
/// returns the best one.
pub fn multi_run(cfg: &TrainingConfig, run_count: usize) -> Result<TrainingRun> {
    if run_count == 0 {
        return Err(Error::InvalidArgument("run_count must be at least 1".into()));
    }
    cfg.validate()?;
    select_best(run_seeds(cfg.seed, run_count).map(|seed| train(&TrainingConfig { seed, ..cfg.clone() })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(lr: f64) -> TrainingConfig {
        TrainingConfig {
            lr_v: lr,
            lr_u: lr,
            lr_w: lr,
            optimizer: Optimizer::PlainGD,
            ..TrainingConfig::new(TrialMode::PenaltyForm)
        }
    }

    #[test]
    fn init_is_deterministic_and_bounded() {
        let a = init_params(1, 5, 0.5).unwrap();
        assert_eq!(a.to_flat(), init_params(1, 5, 0.5).unwrap().to_flat());
        assert_eq!(a.to_flat().len(), 15);
        assert!(a.to_flat().iter().all(|p| (-0.5..=0.5).contains(p)));
        assert_ne!(a, init_params(2, 5, 0.5).unwrap());
        assert!(init_params(1, 5, 0.0).is_err());
        assert!(init_params(1, 0, 0.5).is_err());
    }

    #[test]
    fn zero_gradient_is_fixed_point() {
        let p = init_params(3, 4, 1.0).unwrap();
        let mut vel = Velocity::zeros(4);
        let cfg = TrainingConfig::new(TrialMode::PenaltyForm);
        assert_eq!(gd_step(&p, &ParamGradient::zeros(4), &cfg, &mut vel), p);
    }

    #[test]
    fn one_step_arithmetic() {
        let p = NetworkParams::zeros(3).unwrap();
        let g = ParamGradient { d_output_weights: vec![1.0; 3], d_hidden_biases: vec![1.0; 3], d_input_weights: vec![1.0; 3] };
        for optimizer in [Optimizer::PlainGD, Optimizer::MomentumGD { momentum: 0.9 }] {
            let cfg = TrainingConfig { optimizer, ..plain(0.1) };
            let next = gd_step(&p, &g, &cfg, &mut Velocity::zeros(3));
            assert!(next.to_flat().iter().all(|&x| x == -0.1));
        }
    }

    #[test]
    fn per_group_rates() {
        let p = NetworkParams::zeros(1).unwrap();
        let g = ParamGradient { d_output_weights: vec![1.0], d_hidden_biases: vec![1.0], d_input_weights: vec![1.0] };
        let cfg = TrainingConfig { lr_v: 1.0, lr_u: 2.0, lr_w: 4.0, ..plain(0.1) };
        let next = gd_step(&p, &g, &cfg, &mut Velocity::zeros(1));
        assert_eq!(next.to_flat(), vec![-1.0, -2.0, -4.0]);
    }

    #[test]
    fn quadratic_surrogate_converges() {
        // E = (v - 3)², dE/dv = 2(v - 3); error contracts by 0.8 per step
        let cfg = plain(0.1);
        let mut vel = Velocity::zeros(1);
        let mut p = NetworkParams::zeros(1).unwrap();
        let mut steps = 0;
        while (p.output_weights()[0] - 3.0).abs() > 1e-6 {
            let g = ParamGradient {
                d_output_weights: vec![2.0 * (p.output_weights()[0] - 3.0)],
                d_hidden_biases: vec![0.0],
                d_input_weights: vec![0.0],
            };
            p = gd_step(&p, &g, &cfg, &mut vel);
            steps += 1;
            assert!(steps <= 200);
        }
        assert!(steps <= 200);
    }

    #[test]
    fn single_iteration_history() {
        let cfg = TrainingConfig { max_iterations: 1, ..TrainingConfig::new(TrialMode::PenaltyForm) };
        let run = train(&cfg).unwrap();
        assert_eq!(run.iterations_used, 1);
        assert_eq!(run.loss_history.len(), 2);
        assert_eq!(run.loss_history[1], run.final_loss);
    }

    #[test]
    fn final_loss_matches_recomputed_loss() {
        let cfg = TrainingConfig { max_iterations: 250, ..TrainingConfig::new(TrialMode::PenaltyForm) };
        let run = train(&cfg).unwrap();
        let again = problem::loss(&cfg.trial, &run.final_params, &cfg.grid, cfg.penalty_weight).unwrap();
        assert_eq!(run.final_loss, again.total);
        assert_eq!(run.loss_history.len(), 4);
    }

    #[test]
    fn huge_rates_diverge() {
        let cfg = TrainingConfig { max_iterations: 1000, ..plain(1e6) };
        assert!(matches!(train(&cfg), Err(Error::Diverged { .. })));
    }

    #[test]
    fn rejects_invalid_config() {
        assert!(train(&TrainingConfig { lr_u: 0.0, ..plain(0.1) }).is_err());
        assert!(train(&TrainingConfig { max_iterations: 0, ..plain(0.1) }).is_err());
        assert!(train(&TrainingConfig { init_scale: -1.0, ..plain(0.1) }).is_err());
        assert!(multi_run(&plain(0.1), 0).is_err());
    }

    #[test]
    fn select_best_prefers_low_loss_then_low_seed() {
        let run = |seed, final_loss| {
            Ok(TrainingRun {
                seed,
                final_params: NetworkParams::zeros(1).unwrap(),
                final_loss,
                iterations_used: 0,
                loss_history: vec![final_loss],
            })
        };
        let best = select_best([run(4, 1.0), Err(Error::Diverged { iteration: 3 }), run(7, 0.5), run(5, 0.5)]).unwrap();
        assert_eq!(best.seed, 5);
        assert_eq!(
            select_best([Err(Error::Diverged { iteration: 1 }), Err(Error::Diverged { iteration: 2 })]),
            Err(Error::AllRunsDiverged { runs: 2 })
        );
    }
}
