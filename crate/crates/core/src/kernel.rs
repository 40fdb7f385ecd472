//! The Whitham kernel `K = F⁻¹ m`.
//!
//! `K` is even, positive, behaves like `1/√(2π|x|)` at the origin and decays
//! like `√2/(π√|x|)·exp(−π|x|/2)`. Pointwise values come from the cosine
//! transform with the `ξ^{-1/2}` tail of the symbol subtracted:
//!
//! ```text
//!     K(x) = 1/√(2π|x|) + (1/π) ∫₀^∞ (m(ξ) − ξ^{-1/2}) cos(xξ) dξ
//! ```
//!
//! The subtracted integrand decays like `e^{-2ξ}`, so the integral is cut at
//! `ξ = 40`. Far out, where `K` underflows, values are taken from the
//! imaginary-axis representation
//!
//! ```text
//!     K(x) = (1/π) Σ_{k≥0} ∫_{(k+½)π}^{(k+1)π} √(|tan t|/t) e^{-xt} dt,   x > 0,
//! ```
//!
//! which factors out `e^{-πx/2}` exactly.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quad::composite;
use crate::symbol;

/// Upper frequency cut of the cosine transform.
const XI_MAX: f64 = 40.0;
/// Beyond this `|x|` values come from the imaginary-axis representation,
/// which keeps full relative accuracy where the cosine transform only has
/// absolute accuracy.
const TAIL_SWITCH: f64 = 2.0;
/// Spatial cut for the moments; `K(40)` is below `1e-27`.
const MOMENT_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    pub x: f64,
    pub value: f64,
    pub regular_part: f64,
}

/// `1/√(2π|x|)`.
pub fn singular_part(x: f64) -> f64 {
    1.0 / (2.0 * PI * x.abs()).sqrt()
}

/// `m(ξ) − ξ^{-1/2}` for `ξ ≥ 1`, written without cancellation.
fn symbol_minus_tail(xi: f64) -> f64 {
    let e = (-2.0 * xi).exp();
    let th = (1.0 - e) / (1.0 + e);
    -2.0 * e / ((1.0 + e) * (1.0 + th.sqrt())) / xi.sqrt()
}

/// `K_reg(x) = K(x) − 1/√(2π|x|)`; finite at `x = 0`.
pub fn regular_part(x: f64) -> f64 {
    let ax = x.abs();
    // (0, 1) in ξ after ξ = u²
    let n_inner = 2 + (ax / PI).ceil() as usize;
    let inner = composite(0.0, 1.0, n_inner, |u| {
        (2.0 * u * symbol::value(u * u) - 2.0) * (ax * u * u).cos()
    });
    // (1, XI_MAX), panels no longer than one oscillation period
    let panel = if ax > 0.0 { (2.0 * PI / ax).min(1.0) } else { 1.0 };
    let n_outer = ((XI_MAX - 1.0) / panel).ceil() as usize;
    let outer = composite(1.0, XI_MAX, n_outer, |xi| symbol_minus_tail(xi) * (ax * xi).cos());
    (inner + outer) / PI
}

pub fn eval(x: f64) -> Result<KernelValue> {
    if x == 0.0 || !x.is_finite() {
        return Err(invalid(format!("kernel is singular at x = 0 (got {x})")));
    }
    if x.abs() >= TAIL_SWITCH {
        let value = scaled_tail(x)? * (-FRAC_PI_2 * x.abs()).exp();
        return Ok(KernelValue { x, value, regular_part: value - singular_part(x) });
    }
    let regular_part = regular_part(x);
    Ok(KernelValue {
        x,
        value: singular_part(x) + regular_part,
        regular_part,
    })
}

/// `K(x)·exp(π|x|/2)` from the imaginary-axis representation.
///
/// Accurate for `|x| ≳ 1`; the series over `k` converges like `e^{-kπ|x|}`.
pub fn scaled_tail(x: f64) -> Result<f64> {
    let ax = x.abs();
    if !(ax >= 0.5) || !ax.is_finite() {
        return Err(invalid(format!("imaginary-axis representation needs |x| ≥ 0.5, got {x}")));
    }
    let mut total = 0.0;
    for k in 0..10_000 {
        let t0 = (k as f64 + 0.5) * PI;
        // s = (π/2) sin²θ removes the inverse-square-root endpoint at the pole
        // and the square-root zero at t = (k+1)π.
        let piece = composite(0.0, FRAC_PI_2, 4, |theta| {
            let (sn, cs) = theta.sin_cos();
            let s = FRAC_PI_2 * sn * sn;
            let cot = s.cos() / s.sin();
            PI * sn * cs * (cot / (t0 + s)).sqrt() * (-ax * s).exp()
        });
        let term = (-ax * PI * k as f64).exp() * piece;
        total += term;
        if term < 1e-18 * total {
            break;
        }
    }
    Ok(total / PI)
}

/// `K(x)` divided by its leading large-`|x|` term `√2/(π√|x|)·exp(−π|x|/2)`.
pub fn tail_ratio(x: f64) -> Result<f64> {
    if !(x >= 5.0) {
        return Err(invalid(format!("tail ratio defined for x ≥ 5, got {x}")));
    }
    let leading_scaled = 2f64.sqrt() / (PI * x.sqrt());
    Ok(scaled_tail(x)? / leading_scaled)
}

/// `∫ xⁿ K(x) dx` over `|x| ≤ 40` for `n ∈ {0, …, 4}`.
pub fn moment(n: u32) -> Result<f64> {
    if n > 4 {
        return Err(invalid(format!("moments are provided for n ≤ 4, got {n}")));
    }
    let p = n as i32;
    let half = |sign: f64| -> f64 {
        // singular part on (0, 1] in closed form
        let singular = 1.0 / ((n as f64 + 0.5) * (2.0 * PI).sqrt());
        let near = composite(0.0, 1.0, 2, |x| x.powi(p) * regular_part(x));
        let far = composite(1.0, MOMENT_CUTOFF, (MOMENT_CUTOFF - 1.0) as usize, |x| {
            let k = eval(sign * x).map(|v| v.value).unwrap_or(0.0);
            x.powi(p) * k
        });
        singular + near + far
    };
    let right = half(1.0);
    if n % 2 == 0 {
        Ok(2.0 * right)
    } else {
        // ∫₀ xⁿ K(x) dx − ∫₀ xⁿ K(−x) dx
        Ok(right - half(-1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath, 30 digits: K(1) = 0.0776073349152983614708961721782
    const K_AT_ONE: f64 = 0.077_607_334_915_298_36;
    // mpmath, 30 digits: K_reg(0) = −0.350832437664847451018691831553
    const K_REG_AT_ZERO: f64 = -0.350_832_437_664_847_45;

    #[test]
    fn even_and_rejects_origin() {
        for &x in &[0.003, 0.7, 2.0, 11.0] {
            assert_eq!(eval(x).unwrap().value, eval(-x).unwrap().value);
        }
        assert!(eval(0.0).is_err());
    }

    #[test]
    fn value_at_one_and_regular_part_at_zero() {
        let k = eval(1.0).unwrap();
        assert!((k.value - K_AT_ONE).abs() < 1e-12, "{}", k.value);
        assert!((regular_part(0.0) - K_REG_AT_ZERO).abs() < 1e-12);
        assert!((regular_part(1e-9) - K_REG_AT_ZERO).abs() < 1e-9);
    }

    #[test]
    fn tail_representation_agrees_with_cosine_transform() {
        for &x in &[1.0, 2.0, 5.0, 8.0] {
            let direct = singular_part(x) + regular_part(x);
            let via_tail = scaled_tail(x).unwrap() * (-FRAC_PI_2 * x).exp();
            assert!((direct - via_tail).abs() < 1e-13, "x = {x}: {direct} vs {via_tail}");
        }
    }

    #[test]
    fn tail_at_ten_is_close_to_leading_term() {
        let leading = 2f64.sqrt() / (PI * 10f64.sqrt()) * (-5.0 * PI).exp();
        let k = eval(10.0).unwrap().value;
        assert!((k / leading - 1.0).abs() < 0.05);
    }

    #[test]
    fn tail_ratio_domain() {
        assert!(tail_ratio(4.0).is_err());
        let r = tail_ratio(30.0).unwrap();
        assert!(r.is_finite() && (r - 1.0).abs() < 0.02);
    }

    #[test]
    fn moments_low_order() {
        assert!((moment(0).unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(moment(1).unwrap(), 0.0);
        assert!(moment(5).is_err());
    }
}
