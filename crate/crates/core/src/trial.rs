//! Trial solutions `y_t(x) = A(x) + F(x)·N(x, p)`.
//!
//! `A` carries the initial conditions and has no adjustable parameters;
//! `F` vanishes where the network must not contribute. Both are
//! polynomials with hand-written derivatives, and `y_t^(k)` is assembled
//! with the Leibniz rule `Σ_j C(k,j) F^(j) N^(k-j)`.

use core::fmt;
use core::str::FromStr;

use alloc::string::String;

use crate::mlp::{check_order, Jet, NetworkParams, ParamGradient};
use crate::{Error, Result};

/// Default end of the truncated domain `[0, L]`.
pub const DEFAULT_DOMAIN_END: f64 = 6.0;

/// Root of `F` in the printed Blasius trial function, independent of `L`.
const PAPER_FAR_POINT: f64 = 6.0;

const BINOMIAL: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0],
    [1.0, 3.0, 3.0, 1.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrialMode {
    /// `y_t = x³ + x² + x²(x−6)²·N`
    PaperLiteral,
    /// `y_t = x²·N`; the far-field slope is enforced by a loss penalty.
    PenaltyForm,
}

impl TrialMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialMode::PaperLiteral => "paper",
            TrialMode::PenaltyForm => "penalty",
        }
    }
}

impl fmt::Display for TrialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TrialMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(TrialMode::PaperLiteral),
            "penalty" => Ok(TrialMode::PenaltyForm),
            other => Err(Error::InvalidArgument(String::from("unknown trial mode: ") + other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    mode: TrialMode,
    domain_end: f64,
}

impl TrialSpec {
    pub fn new(mode: TrialMode, domain_end: f64) -> Result<Self> {
        if !(domain_end.is_finite() && domain_end > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "domain end must be positive and finite, got {domain_end}"
            )));
        }
        Ok(Self { mode, domain_end })
    }

    pub fn with_default_domain(mode: TrialMode) -> Self {
        Self { mode, domain_end: DEFAULT_DOMAIN_END }
    }

    pub fn mode(&self) -> TrialMode {
        self.mode
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    pub fn check_domain(&self, x: f64) -> Result<()> {
        if x.is_finite() && (0.0..=self.domain_end).contains(&x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { x, end: self.domain_end })
        }
    }

    /// `A^(k)(x)` for `k = 0..=3`.
    pub fn boundary_term(&self, x: f64) -> [f64; 4] {
        match self.mode {
            TrialMode::PaperLiteral => [x * x * x + x * x, 3.0 * x * x + 2.0 * x, 6.0 * x + 2.0, 6.0],
            TrialMode::PenaltyForm => [0.0; 4],
        }
    }

    /// `F^(k)(x)` for `k = 0..=3`.
    pub fn network_factor(&self, x: f64) -> [f64; 4] {
        match self.mode {
            TrialMode::PaperLiteral => {
                // x²(x−c)² = x⁴ − 2c x³ + c² x²
                let c = PAPER_FAR_POINT;
                let x2 = x * x;
                [
                    x2 * (x - c) * (x - c),
                    4.0 * x2 * x - 6.0 * c * x2 + 2.0 * c * c * x,
                    12.0 * x2 - 12.0 * c * x + 2.0 * c * c,
                    24.0 * x - 12.0 * c,
                ]
            }
            TrialMode::PenaltyForm => [x * x, 2.0 * x, 2.0, 0.0],
        }
    }

    /// `y_t(x, p)`.
    pub fn value(&self, params: &NetworkParams, x: f64) -> Result<f64> {
        self.derivative(params, x, 0)
    }

    /// `d^k y_t / dx^k` for `k = 0..=3`.
    pub fn derivative(&self, params: &NetworkParams, x: f64, k: usize) -> Result<f64> {
        check_order(k)?;
        self.check_domain(x)?;
        Ok(TrialJet::new(self, params, x).derivative(k))
    }

    /// `∂(d^k y_t/dx^k)/∂p`; `A` contributes nothing.
    pub fn param_gradient(&self, params: &NetworkParams, x: f64, k: usize) -> Result<ParamGradient> {
        check_order(k)?;
        self.check_domain(x)?;
        let mut grad = ParamGradient::zeros(params.hidden_count());
        TrialJet::new(self, params, x).accumulate_gradient(k, 1.0, &mut grad);
        Ok(grad)
    }
}

/// Everything needed for `y_t` and its parameter gradients at one abscissa.
/// Callers are responsible for the domain check.
pub(crate) struct TrialJet<'a> {
    net: Jet<'a>,
    a: [f64; 4],
    f: [f64; 4],
}

impl<'a> TrialJet<'a> {
    pub(crate) fn new(spec: &TrialSpec, params: &'a NetworkParams, x: f64) -> Self {
        Self { net: Jet::new(params, x), a: spec.boundary_term(x), f: spec.network_factor(x) }
    }

    pub(crate) fn derivative(&self, k: usize) -> f64 {
        let product: f64 = (0..=k).map(|j| BINOMIAL[k][j] * self.f[j] * self.net.derivative(k - j)).sum();
        self.a[k] + product
    }

    pub(crate) fn accumulate_gradient(&self, k: usize, scale: f64, grad: &mut ParamGradient) {
        for (j, binom) in BINOMIAL[k].iter().enumerate().take(k + 1) {
            let c = binom * self.f[j];
            if c != 0.0 {
                self.net.accumulate_gradient(k - j, scale * c, grad);
            }
        }
    }
}
