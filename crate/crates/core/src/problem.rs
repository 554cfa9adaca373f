//! Collocation loss for the Blasius equation.
//!
//! At each grid point the residual `r = y_t''' + ½ y_t y_t''` is squared and
//! summed. In [`TrialMode::PenaltyForm`] a weighted far-field term
//! `λ (y_t'(L) − 1)²` is added.

use alloc::format;
use alloc::vec::Vec;

use crate::mlp::{NetworkParams, ParamGradient};
use crate::trial::{TrialJet, TrialMode, TrialSpec};
use crate::{Error, Result};

/// Default number of collocation points.
pub const DEFAULT_POINTS: usize = 10;

/// Default far-field penalty weight for [`TrialMode::PenaltyForm`].
pub const DEFAULT_PENALTY_WEIGHT: f64 = 10.0;

/// Strictly increasing training abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    points: Vec<f64>,
}

impl CollocationGrid {
    /// Validates that `points` is non-empty, strictly increasing and inside
    /// `[0, domain_end]`.
    pub fn new(points: Vec<f64>, domain_end: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("collocation grid is empty".into()));
        }
        if let Some(&x) = points.iter().find(|x| !(x.is_finite() && (0.0..=domain_end).contains(*x))) {
            return Err(Error::OutOfDomain { x, end: domain_end });
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("collocation points must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// `x_i = i·L/(m−1)` for `i = 0..m`.
    pub fn equidistant(count: usize, domain_end: f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!("equidistant grid needs at least 2 points, got {count}")));
        }
        let last = (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| i as f64 * domain_end / last).collect();
        // keep the end point exact
        points[count - 1] = domain_end;
        Self::new(points, domain_end)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    /// `Σ r_i² + λ·penalty_term`
    pub total: f64,
    pub residuals: Vec<f64>,
    /// Unweighted `(y_t'(L) − 1)²`; zero in paper mode.
    pub penalty_term: f64,
    /// The weight actually applied (forced to zero in paper mode).
    pub penalty_weight: f64,
}

/// `r(x) = y_t'''(x) + ½ y_t(x) y_t''(x)`.
pub fn residual_at(spec: &TrialSpec, params: &NetworkParams, x: f64) -> Result<f64> {
    spec.check_domain(x)?;
    let jet = TrialJet::new(spec, params, x);
    Ok(residual(&jet))
}

fn residual(jet: &TrialJet<'_>) -> f64 {
    jet.derivative(3) + 0.5 * jet.derivative(0) * jet.derivative(2)
}

fn effective_penalty(spec: &TrialSpec, penalty_weight: f64) -> Result<f64> {
    if !(penalty_weight.is_finite() && penalty_weight >= 0.0) {
        return Err(Error::InvalidArgument(format!("penalty weight must be finite and >= 0, got {penalty_weight}")));
    }
    Ok(match spec.mode() {
        TrialMode::PaperLiteral => 0.0,
        TrialMode::PenaltyForm => penalty_weight,
    })
}

pub fn loss(spec: &TrialSpec, params: &NetworkParams, grid: &CollocationGrid, penalty_weight: f64) -> Result<LossReport> {
    evaluate(spec, params, grid, penalty_weight, None)
}

/// Exact gradient of [`loss`] with respect to every network parameter.
pub fn loss_gradient(
    spec: &TrialSpec,
    params: &NetworkParams,
    grid: &CollocationGrid,
    penalty_weight: f64,
) -> Result<ParamGradient> {
    loss_and_gradient(spec, params, grid, penalty_weight).map(|(_, g)| g)
}

/// Loss and gradient in one pass. The reported total is bit-identical to
/// what [`loss`] returns for the same inputs.
pub fn loss_and_gradient(
    spec: &TrialSpec,
    params: &NetworkParams,
    grid: &CollocationGrid,
    penalty_weight: f64,
) -> Result<(LossReport, ParamGradient)> {
    let mut grad = ParamGradient::zeros(params.hidden_count());
    let report = evaluate(spec, params, grid, penalty_weight, Some(&mut grad))?;
    Ok((report, grad))
}

fn evaluate(
    spec: &TrialSpec,
    params: &NetworkParams,
    grid: &CollocationGrid,
    penalty_weight: f64,
    mut grad: Option<&mut ParamGradient>,
) -> Result<LossReport> {
    let lambda = effective_penalty(spec, penalty_weight)?;
    let mut residuals = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        spec.check_domain(x)?;
        let jet = TrialJet::new(spec, params, x);
        let r = residual(&jet);
        if let Some(g) = grad.as_deref_mut() {
            // d(r²) = 2r (dy''' + ½ y dy'' + ½ y'' dy)
            jet.accumulate_gradient(3, 2.0 * r, g);
            jet.accumulate_gradient(2, r * jet.derivative(0), g);
            jet.accumulate_gradient(0, r * jet.derivative(2), g);
        }
        residuals.push(r);
    }
    // fixed index order keeps the sum reproducible
    let mut total = 0.0;
    for r in &residuals {
        total += r * r;
    }

    let mut penalty_term = 0.0;
    if lambda > 0.0 {
        let end = spec.domain_end();
        let jet = TrialJet::new(spec, params, end);
        let mismatch = jet.derivative(1) - 1.0;
        penalty_term = mismatch * mismatch;
        total += lambda * penalty_term;
        if let Some(g) = grad {
            jet.accumulate_gradient(1, 2.0 * lambda * mismatch, g);
        }
    }

    Ok(LossReport { total, residuals, penalty_term, penalty_weight: lambda })
}
