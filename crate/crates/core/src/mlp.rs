//! Single-input, single-hidden-layer sigmoid network.
//!
//! `N(x) = Σ v_i σ(w_i x + u_i)` with closed-form input derivatives up to
//! third order and the parameter gradients of each of those derivatives.
//! Every derivative of the logistic sigmoid is written as a polynomial in
//! `σ` itself, so one exponential per hidden unit and abscissa is enough.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Highest input-derivative order exposed by the network.
pub const MAX_ORDER: usize = 3;

/// Logistic sigmoid, evaluated without overflow for large `|z|`.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// `σ` and its first four derivatives, all expressed through `s = σ(z)`.
///
/// The fourth derivative is only needed for the parameter gradients of
/// `N'''`.
#[inline]
pub(crate) fn sigmoid_derivatives(s: f64) -> [f64; 5] {
    let d1 = s * (1.0 - s);
    [
        s,
        d1,
        d1 * (1.0 - 2.0 * s),
        d1 * (1.0 - 6.0 * s + 6.0 * s * s),
        d1 * (1.0 - 2.0 * s) * (1.0 - 12.0 * s + 12.0 * s * s),
    ]
}

/// The `k`-th derivative of the sigmoid at `z`, for `k` in `0..=3`.
pub fn sigmoid_k(z: f64, k: usize) -> Result<f64> {
    check_order(k)?;
    Ok(sigmoid_derivatives(sigmoid(z))[k])
}

pub(crate) fn check_order(k: usize) -> Result<()> {
    if k > MAX_ORDER {
        return Err(Error::InvalidOrder { order: k, max: MAX_ORDER });
    }
    Ok(())
}

/// Weights and biases of a 1-H-1 network.
///
/// Flat layout used by [`NetworkParams::to_flat`]: all `v`, then all `u`,
/// then all `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    output_weights: Vec<f64>,
    hidden_biases: Vec<f64>,
    input_weights: Vec<f64>,
}

impl NetworkParams {
    pub fn new(output_weights: Vec<f64>, hidden_biases: Vec<f64>, input_weights: Vec<f64>) -> Result<Self> {
        let h = output_weights.len();
        if h == 0 {
            return Err(Error::InvalidParams("hidden layer must have at least one unit".into()));
        }
        if hidden_biases.len() != h || input_weights.len() != h {
            return Err(Error::InvalidParams(format!(
                "length mismatch: v={}, u={}, w={}",
                h,
                hidden_biases.len(),
                input_weights.len()
            )));
        }
        let params = Self { output_weights, hidden_biases, input_weights };
        if !params.is_finite() {
            return Err(Error::InvalidParams("non-finite entry".into()));
        }
        Ok(params)
    }

    pub fn zeros(hidden_count: usize) -> Result<Self> {
        Self::new(vec![0.0; hidden_count], vec![0.0; hidden_count], vec![0.0; hidden_count])
    }

    /// Rebuilds parameters from the `[v.., u.., w..]` layout.
    pub fn from_flat(hidden_count: usize, flat: &[f64]) -> Result<Self> {
        if flat.len() != 3 * hidden_count {
            return Err(Error::InvalidParams(format!(
                "expected {} values for H={}, got {}",
                3 * hidden_count,
                hidden_count,
                flat.len()
            )));
        }
        let (v, rest) = flat.split_at(hidden_count);
        let (u, w) = rest.split_at(hidden_count);
        Self::new(v.to_vec(), u.to_vec(), w.to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(3 * self.hidden_count());
        flat.extend_from_slice(&self.output_weights);
        flat.extend_from_slice(&self.hidden_biases);
        flat.extend_from_slice(&self.input_weights);
        flat
    }

    pub(crate) fn from_parts_unchecked(output_weights: Vec<f64>, hidden_biases: Vec<f64>, input_weights: Vec<f64>) -> Self {
        Self { output_weights, hidden_biases, input_weights }
    }

    pub fn hidden_count(&self) -> usize {
        self.output_weights.len()
    }

    /// `v_i`, hidden-to-output weights.
    pub fn output_weights(&self) -> &[f64] {
        &self.output_weights
    }

    /// `u_i`, hidden-unit biases.
    pub fn hidden_biases(&self) -> &[f64] {
        &self.hidden_biases
    }

    /// `w_i`, input-to-hidden weights.
    pub fn input_weights(&self) -> &[f64] {
        &self.input_weights
    }

    pub fn is_finite(&self) -> bool {
        self.output_weights
            .iter()
            .chain(&self.hidden_biases)
            .chain(&self.input_weights)
            .all(|p| p.is_finite())
    }

    /// `N(x) = Σ v_i σ(w_i x + u_i)`.
    pub fn forward(&self, x: f64) -> f64 {
        self.output_weights
            .iter()
            .zip(&self.input_weights)
            .zip(&self.hidden_biases)
            .map(|((v, w), u)| v * sigmoid(w * x + u))
            .sum()
    }

    /// `∂^k N / ∂x^k = Σ v_i w_i^k σ^(k)(z_i)`.
    pub fn input_derivative(&self, x: f64, k: usize) -> Result<f64> {
        check_order(k)?;
        Ok(Jet::new(self, x).derivative(k))
    }

    /// Gradient of `∂^k N / ∂x^k` with respect to every parameter.
    pub fn param_gradient_of_derivative(&self, x: f64, k: usize) -> Result<ParamGradient> {
        check_order(k)?;
        let mut grad = ParamGradient::zeros(self.hidden_count());
        Jet::new(self, x).accumulate_gradient(k, 1.0, &mut grad);
        Ok(grad)
    }
}

/// Gradient with respect to the network parameters, laid out like
/// [`NetworkParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGradient {
    pub d_output_weights: Vec<f64>,
    pub d_hidden_biases: Vec<f64>,
    pub d_input_weights: Vec<f64>,
}

impl ParamGradient {
    pub fn zeros(hidden_count: usize) -> Self {
        Self {
            d_output_weights: vec![0.0; hidden_count],
            d_hidden_biases: vec![0.0; hidden_count],
            d_input_weights: vec![0.0; hidden_count],
        }
    }

    pub fn hidden_count(&self) -> usize {
        self.d_output_weights.len()
    }

    /// `[dv.., du.., dw..]`, matching [`NetworkParams::to_flat`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(3 * self.hidden_count());
        flat.extend_from_slice(&self.d_output_weights);
        flat.extend_from_slice(&self.d_hidden_biases);
        flat.extend_from_slice(&self.d_input_weights);
        flat
    }

    pub fn is_finite(&self) -> bool {
        self.to_flat().iter().all(|g| g.is_finite())
    }
}

/// Per-unit sigmoid derivatives at one abscissa, shared by every derivative
/// order and every gradient evaluated there.
pub(crate) struct Jet<'a> {
    params: &'a NetworkParams,
    x: f64,
    sigma: Vec<[f64; 5]>,
}

impl<'a> Jet<'a> {
    pub(crate) fn new(params: &'a NetworkParams, x: f64) -> Self {
        let sigma = params
            .input_weights
            .iter()
            .zip(&params.hidden_biases)
            .map(|(w, u)| sigmoid_derivatives(sigmoid(w * x + u)))
            .collect();
        Self { params, x, sigma }
    }

    pub(crate) fn derivative(&self, k: usize) -> f64 {
        self.params
            .output_weights
            .iter()
            .zip(&self.params.input_weights)
            .zip(&self.sigma)
            .map(|((v, w), s)| v * powers(*w)[k] * s[k])
            .sum()
    }

    /// Adds `scale * ∂(∂^k N/∂x^k)/∂p` into `grad`.
    pub(crate) fn accumulate_gradient(&self, k: usize, scale: f64, grad: &mut ParamGradient) {
        let p = self.params;
        for i in 0..p.hidden_count() {
            let (v, w, s) = (p.output_weights[i], p.input_weights[i], &self.sigma[i]);
            let wp = powers(w);
            // d/dw (w^k) = k w^(k-1); zero for k = 0
            let dwk = if k == 0 { 0.0 } else { k as f64 * wp[k - 1] };
            grad.d_output_weights[i] += scale * wp[k] * s[k];
            grad.d_hidden_biases[i] += scale * v * wp[k] * s[k + 1];
            grad.d_input_weights[i] += scale * v * (dwk * s[k] + wp[k] * self.x * s[k + 1]);
        }
    }
}

#[inline]
fn powers(w: f64) -> [f64; 4] {
    [1.0, w, w * w, w * w * w]
}
