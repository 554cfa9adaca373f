//! Finite-difference oracle and seeded draws shared by the integration
//! tests. Deliberately independent of the library's derivative code.

#![allow(dead_code)]

use blasius_net_core::NetworkParams;

/// Small splitmix64 stream for test draws, separate from the library RNG.
pub struct Draws(u64);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }

    pub fn params(&mut self, hidden: usize, scale: f64) -> NetworkParams {
        let flat: Vec<f64> = (0..3 * hidden).map(|_| self.uniform(-scale, scale)).collect();
        NetworkParams::from_flat(hidden, &flat).unwrap()
    }
}

pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central differences of `f` with respect to every flat parameter.
pub fn param_fd(params: &NetworkParams, h: f64, f: impl Fn(&NetworkParams) -> f64) -> Vec<f64> {
    let hidden = params.hidden_count();
    let base = params.to_flat();
    (0..base.len())
        .map(|i| {
            let shifted = |delta: f64| {
                let mut flat = base.clone();
                flat[i] += delta;
                f(&NetworkParams::from_flat(hidden, &flat).unwrap())
            };
            (shifted(h) - shifted(-h)) / (2.0 * h)
        })
        .collect()
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Worst relative error of `analytic` against central differences of `f`.
///
/// Denominator: `max(|analytic|, |fd|, 1e-3·max(1, |f(p)|))`. The floor
/// sits about two orders of magnitude above the round-off of a central
/// difference (`ε·|f|/h` with `h = 1e-6`), so components that are
/// numerically zero are judged on an absolute scale.
pub fn worst_param_error(params: &NetworkParams, h: f64, analytic: &[f64], f: impl Fn(&NetworkParams) -> f64) -> f64 {
    let floor = 1e-3 * f(params).abs().max(1.0);
    let numeric = param_fd(params, h, &f);
    assert_eq!(analytic.len(), numeric.len());
    analytic.iter().zip(&numeric).map(|(a, n)| rel_err(*a, *n, floor)).fold(0.0, f64::max)
}
