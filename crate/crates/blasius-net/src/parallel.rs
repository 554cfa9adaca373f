//! Multi-seed training on the rayon pool.
//!
//! Runs share nothing, and the winner is chosen with the same rule as the
//! sequential [`trainer::multi_run`], so the result does not depend on the
//! thread count or on completion order.

use blasius_net_core::trainer::{self, run_seeds, select_best};
use blasius_net_core::{Error, Result, TrainingConfig, TrainingRun};
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct MultiRun {
    pub best: TrainingRun,
    /// One entry per seed, in seed order.
    pub outcomes: Vec<(u64, Result<TrainingRun>)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossStats {
    pub finished: usize,
    pub diverged: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl MultiRun {
    /// Statistics over the final losses of the runs that finished.
    pub fn loss_stats(&self) -> LossStats {
        let losses: Vec<f64> = self.outcomes.iter().filter_map(|(_, r)| r.as_ref().ok()).map(|r| r.final_loss).collect();
        let finished = losses.len();
        LossStats {
            finished,
            diverged: self.outcomes.len() - finished,
            mean: losses.iter().sum::<f64>() / finished as f64,
            min: losses.iter().copied().fold(f64::INFINITY, f64::min),
            max: losses.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

pub fn multi_run(cfg: &TrainingConfig, run_count: usize) -> Result<MultiRun> {
    if run_count == 0 {
        return Err(Error::InvalidArgument("run_count must be at least 1".into()));
    }
    cfg.validate()?;
    let seeds: Vec<u64> = run_seeds(cfg.seed, run_count).collect();
    let outcomes: Vec<(u64, Result<TrainingRun>)> = seeds
        .into_par_iter()
        .map(|seed| (seed, trainer::train(&TrainingConfig { seed, ..cfg.clone() })))
        .collect();
    let best = select_best(outcomes.iter().map(|(_, r)| r.clone()))?;
    Ok(MultiRun { best, outcomes })
}
