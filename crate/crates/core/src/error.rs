use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("derivative order {order} outside supported range 0..={max}")]
    InvalidOrder { order: usize, max: usize },

    #[error("abscissa {x} outside domain [0, {end}]")]
    OutOfDomain { x: f64, end: f64 },

    #[error("invalid network parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("training diverged at iteration {iteration} (non-finite loss)")]
    Diverged { iteration: usize },

    #[error("all {runs} training runs diverged")]
    AllRunsDiverged { runs: usize },

    #[error("series did not converge: last term {last_term:e} exceeds 1e-9 of partial sum {sum:e}")]
    SeriesNotConverged { sum: f64, last_term: f64 },

    #[error("integration produced a non-finite state at eta = {eta}")]
    Integration { eta: f64 },

    #[error("shooting bracket [{lo}, {hi}] does not straddle the target")]
    Bracket { lo: f64, hi: f64 },

    #[error("profile is missing abscissae {missing:?}")]
    Join { missing: Vec<f64> },
}
