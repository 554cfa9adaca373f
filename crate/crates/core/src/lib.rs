//! Feed-forward neural solver for the Blasius boundary-layer equation
//!
//! ```text
//! f''' + ½ f f'' = 0,   f(0) = 0, f'(0) = 0, f'(∞) = 1
//! ```
//!
//! The equation is solved directly at third order with a trial solution
//! `y_t(x) = A(x) + F(x)·N(x, p)`, where `N` is a single-input network with
//! one sigmoid hidden layer. The collocation residual is squared and summed
//! over a fixed grid and minimised by gradient descent using closed-form
//! parameter gradients.
//!
//! Two classical solutions are provided as independent references: a
//! fourth-order Runge-Kutta shooting solver and the Blasius power series
//! with its exact integer coefficient recurrence.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and threaded multi-run live in the `blasius-net` crate.

#![no_std]

extern crate alloc;

mod error;
pub mod mlp;
pub mod oracle;
pub mod problem;
pub mod report;
pub mod rng;
pub mod trainer;
pub mod trial;

pub use error::{Error, Result};
pub use mlp::{NetworkParams, ParamGradient};
pub use oracle::{ProfileRow, SolutionProfile};
pub use problem::{CollocationGrid, LossReport};
pub use trainer::{Optimizer, TrainingConfig, TrainingRun};
pub use trial::{TrialMode, TrialSpec};
