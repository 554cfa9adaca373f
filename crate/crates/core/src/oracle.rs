//! Classical reference solutions of the Blasius problem.
//!
//! * [`rk4_profile`] / [`shoot`]: the usual reduction to the first-order
//!   system `(f, f', f'')` integrated with classical RK4, with bisection on
//!   the wall shear `f''(0)` until `f'(η_far) = 1`.
//! * [`BlasiusSeries`]: the power series
//!   `f(η) = Σ (−½)^k A_k σ^(k+1) η^(3k+2) / (3k+2)!` with
//!   `A_0 = A_1 = 1`, `A_k = Σ_{r<k} C(3k−1, 3r) A_r A_(k−r−1)`, in exact
//!   integer arithmetic. Its radius of convergence is finite (about 5.7
//!   for the Blasius wall shear), so evaluation refuses to return a
//!   partial sum whose last term is not negligible.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, ToPrimitive};

use crate::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_ETA_FAR: f64 = 10.0;
pub const DEFAULT_SHOOT_TOL: f64 = 1e-10;
pub const DEFAULT_SERIES_TERMS: usize = 25;

/// Relative size of the last series term above which the sum is rejected.
pub const SERIES_TRUNCATION_LIMIT: f64 = 1e-9;

const SHOOT_BRACKET: (f64, f64) = (0.1, 1.0);
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub eta: f64,
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
}

impl ProfileRow {
    pub fn get(&self, quantity: crate::report::Quantity) -> f64 {
        use crate::report::Quantity;
        match quantity {
            Quantity::F => self.f,
            Quantity::Fp => self.fp,
            Quantity::Fpp => self.fpp,
        }
    }
}

/// Rows of `(η, f, f', f'')` with strictly increasing `η`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolutionProfile {
    rows: Vec<ProfileRow>,
}

impl SolutionProfile {
    pub fn new(rows: Vec<ProfileRow>) -> Result<Self> {
        if let Some(w) = rows.windows(2).find(|w| w[0].eta.partial_cmp(&w[1].eta) != Some(core::cmp::Ordering::Less)) {
            return Err(Error::InvalidArgument(format!(
                "profile abscissae must be strictly increasing ({} then {})",
                w[0].eta, w[1].eta
            )));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[ProfileRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row whose `η` lies within `tol` of `eta`.
    pub fn find(&self, eta: f64, tol: f64) -> Option<&ProfileRow> {
        let idx = self.rows.partition_point(|r| r.eta < eta - tol);
        self.rows.get(idx).filter(|r| (r.eta - eta).abs() <= tol)
    }

    pub fn into_rows(self) -> Vec<ProfileRow> {
        self.rows
    }
}

type State = [f64; 3];

#[inline]
fn blasius_rhs(s: &State) -> State {
    [s[1], s[2], -0.5 * s[0] * s[2]]
}

#[inline]
fn rk4_step(s: &State, h: f64) -> State {
    let axpy = |a: &State, k: &State, c: f64| [a[0] + c * k[0], a[1] + c * k[1], a[2] + c * k[2]];
    let k1 = blasius_rhs(s);
    let k2 = blasius_rhs(&axpy(s, &k1, 0.5 * h));
    let k3 = blasius_rhs(&axpy(s, &k2, 0.5 * h));
    let k4 = blasius_rhs(&axpy(s, &k3, h));
    core::array::from_fn(|i| s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn check_integration_args(sigma0: f64, eta_max: f64, step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive and finite, got {step}")));
    }
    if !(eta_max.is_finite() && eta_max > 0.0) {
        return Err(Error::InvalidArgument(format!("eta_max must be positive and finite, got {eta_max}")));
    }
    if !(sigma0.is_finite() && sigma0 >= 0.0) {
        return Err(Error::InvalidArgument(format!("sigma0 must be finite and >= 0, got {sigma0}")));
    }
    Ok(())
}

/// Grid `η_i = i·step`, with a shortened final step landing exactly on
/// `eta_max` when it is not a multiple of `step`.
fn integration_grid(eta_max: f64, step: f64) -> impl Iterator<Item = f64> {
    let full = libm::floor(eta_max / step + 1e-9) as usize;
    let ends_on_grid = (full as f64 * step - eta_max).abs() <= 1e-9 * step;
    let tail = if ends_on_grid { None } else { Some(eta_max) };
    (0..=full).map(move |i| i as f64 * step).chain(tail)
}

/// Integrates `f''' = −½ f f''` from `(0, 0, sigma0)` with classical RK4,
/// emitting a row at every grid point.
pub fn rk4_profile(sigma0: f64, eta_max: f64, step: f64) -> Result<SolutionProfile> {
    check_integration_args(sigma0, eta_max, step)?;
    let mut rows = Vec::with_capacity((eta_max / step) as usize + 2);
    integrate(sigma0, eta_max, step, |eta, s| rows.push(ProfileRow { eta, f: s[0], fp: s[1], fpp: s[2] }))?;
    SolutionProfile::new(rows)
}

fn integrate(sigma0: f64, eta_max: f64, step: f64, mut emit: impl FnMut(f64, &State)) -> Result<State> {
    let mut state: State = [0.0, 0.0, sigma0];
    let mut prev = 0.0;
    for eta in integration_grid(eta_max, step) {
        if eta > prev {
            state = rk4_step(&state, eta - prev);
            if !state.iter().all(|v| v.is_finite()) {
                return Err(Error::Integration { eta });
            }
            prev = eta;
        }
        emit(eta, &state);
    }
    Ok(state)
}

/// `f'(eta_far) − 1` for a given wall shear.
fn far_slope_mismatch(sigma0: f64, eta_far: f64, step: f64) -> Result<f64> {
    Ok(integrate(sigma0, eta_far, step, |_, _| {})?[1] - 1.0)
}

/// Wall shear `f''(0)` such that `f'(eta_far) = 1` within `tol`, using the
/// default step.
pub fn shoot(eta_far: f64, tol: f64) -> Result<f64> {
    shoot_with_step(eta_far, tol, DEFAULT_STEP)
}

/// Bisection on `f''(0) ∈ [0.1, 1.0]`.
pub fn shoot_with_step(eta_far: f64, tol: f64, step: f64) -> Result<f64> {
    if !(eta_far.is_finite() && eta_far >= 8.0) {
        return Err(Error::InvalidArgument(format!("eta_far must be >= 8, got {eta_far}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    check_integration_args(1.0, eta_far, step)?;

    let (mut lo, mut hi) = SHOOT_BRACKET;
    let g_lo = far_slope_mismatch(lo, eta_far, step)?;
    let g_hi = far_slope_mismatch(hi, eta_far, step)?;
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    let lo_negative = g_lo < 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let g = far_slope_mismatch(mid, eta_far, step)?;
        if g.abs() <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        if (g < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact `A_0 ..= A_k_max`.
pub fn series_coefficients(k_max: usize) -> Vec<BigUint> {
    let mut a: Vec<BigUint> = Vec::with_capacity(k_max + 1);
    a.push(BigUint::one());
    if k_max >= 1 {
        a.push(BigUint::one());
    }
    for k in 2..=k_max {
        let n = BigUint::from(3 * k - 1);
        let sum = (0..k).fold(BigUint::ZERO, |acc, r| acc + binomial(n.clone(), BigUint::from(3 * r)) * &a[r] * &a[k - r - 1]);
        a.push(sum);
    }
    a
}

/// `a / b` as a float without overflowing either operand.
fn ratio_to_f64(a: &BigUint, b: &BigUint) -> f64 {
    const KEEP: u64 = 60;
    let shift_a = a.bits().saturating_sub(KEEP);
    let shift_b = b.bits().saturating_sub(KEEP);
    let ma = (a >> shift_a).to_f64().unwrap_or(f64::NAN);
    let mb = (b >> shift_b).to_f64().unwrap_or(f64::NAN);
    libm::ldexp(ma / mb, shift_a as i32 - shift_b as i32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Magnitude of the last included term.
    pub last_term: f64,
}

/// The Blasius power series for one wall shear `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlasiusSeries {
    coefficients: Vec<BigUint>,
    sigma: f64,
    /// `(−½)^k A_k σ^(k+1) / (3k+2)!`
    scaled: Vec<f64>,
}

impl BlasiusSeries {
    pub fn new(sigma: f64, k_max: usize) -> Result<Self> {
        if k_max < 1 {
            return Err(Error::InvalidArgument("series needs k_max >= 1".into()));
        }
        if !sigma.is_finite() {
            return Err(Error::InvalidArgument(format!("sigma must be finite, got {sigma}")));
        }
        let coefficients = series_coefficients(k_max);
        let mut factorial = BigUint::from(2u32); // 2!
        let mut next_factor = 3u64;
        let mut scaled = Vec::with_capacity(k_max + 1);
        let mut sign_sigma = sigma; // (−½)^k σ^(k+1)
        for (k, a) in coefficients.iter().enumerate() {
            while next_factor <= 3 * k as u64 + 2 {
                factorial *= next_factor;
                next_factor += 1;
            }
            scaled.push(sign_sigma * ratio_to_f64(a, &factorial));
            sign_sigma *= -0.5 * sigma;
        }
        Ok(Self { coefficients, sigma, scaled })
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coefficients
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Partial sum through `k_max`; fails when the last term exceeds
    /// `1e-9·|sum|`.
    pub fn eval(&self, eta: f64) -> Result<SeriesSum> {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::InvalidArgument(format!("eta must be finite and >= 0, got {eta}")));
        }
        let eta3 = eta * eta * eta;
        let mut power = eta * eta;
        let mut value = 0.0;
        let mut last_term = 0.0;
        for c in &self.scaled {
            let term = c * power;
            value += term;
            last_term = term.abs();
            power *= eta3;
        }
        if !value.is_finite() || last_term > SERIES_TRUNCATION_LIMIT * value.abs() {
            return Err(Error::SeriesNotConverged { sum: value, last_term });
        }
        Ok(SeriesSum { value, last_term })
    }
}

/// Convenience wrapper around [`BlasiusSeries`].
pub fn series_eval(sigma: f64, eta: f64, k_max: usize) -> Result<SeriesSum> {
    BlasiusSeries::new(sigma, k_max)?.eval(eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn first_coefficients() {
        let a = series_coefficients(3);
        assert_eq!(a, vec![BigUint::from(1u32), BigUint::from(1u32), BigUint::from(11u32), BigUint::from(375u32)]);
        assert_eq!(series_coefficients(0).len(), 1);
    }

    #[test]
    fn ratio_handles_huge_operands() {
        let big = BigUint::from(3u32).pow(2000);
        let r = ratio_to_f64(&(&big * 5u32), &(&big * 2u32));
        assert!((r - 2.5).abs() < 1e-15);
        assert_eq!(ratio_to_f64(&BigUint::from(1u32), &BigUint::from(4u32)), 0.25);
    }

    #[test]
    fn series_at_origin() {
        assert_eq!(series_eval(0.332, 0.0, 10).unwrap().value, 0.0);
    }

    #[test]
    fn series_refuses_outside_convergence() {
        assert!(matches!(series_eval(0.332, 8.0, 25), Err(Error::SeriesNotConverged { .. })));
        assert!(series_eval(0.332, -1.0, 25).is_err());
        assert!(BlasiusSeries::new(0.332, 0).is_err());
    }

    #[test]
    fn zero_shear_profile_is_zero() {
        let p = rk4_profile(0.0, 3.0, 0.01).unwrap();
        assert!(p.rows().iter().all(|r| r.f == 0.0 && r.fp == 0.0 && r.fpp == 0.0));
    }

    #[test]
    fn grid_ends_exactly() {
        let p = rk4_profile(0.33, 1.05, 0.1).unwrap();
        assert_eq!(p.rows().last().unwrap().eta, 1.05);
        assert_eq!(p.len(), 12);
        let p = rk4_profile(0.33, 1.0, 0.1).unwrap();
        assert_eq!(p.len(), 11);
        assert!((p.rows()[10].eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integration_args() {
        assert!(rk4_profile(0.3, 1.0, 0.0).is_err());
        assert!(rk4_profile(0.3, -1.0, 0.1).is_err());
        assert!(rk4_profile(-0.3, 1.0, 0.1).is_err());
        assert!(shoot(5.0, 1e-10).is_err());
        assert!(shoot(10.0, 0.0).is_err());
    }

    #[test]
    fn profile_lookup() {
        let p = rk4_profile(0.33, 2.0, 0.2).unwrap();
        assert!(p.find(1.4, 1e-12).is_some());
        assert!(p.find(1.5, 1e-12).is_none());
        assert!(SolutionProfile::new(vec![
            ProfileRow { eta: 1.0, f: 0.0, fp: 0.0, fpp: 0.0 },
            ProfileRow { eta: 1.0, f: 0.0, fp: 0.0, fpp: 0.0 },
        ])
        .is_err());
    }
}
