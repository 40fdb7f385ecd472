//! The Whitham dispersion symbol `m(ξ) = √(tanh ξ / ξ)` on the real line and
//! on the strip `|Im z| < π/2`, its Taylor data at the origin, and the
//! speed-dependent exponential decay rate `η_c`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::defaults::SERIES_THRESHOLD;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolValue {
    pub xi: f64,
    pub value: f64,
}

/// Value of `m(theta + sign·i·eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSymbolValue {
    pub theta: f64,
    pub eta: f64,
    pub sign: Sign,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn from_i32(s: i32) -> Result<Sign> {
        match s {
            -1 => Ok(Sign::Minus),
            1 => Ok(Sign::Plus),
            _ => Err(invalid(format!("sign must be ±1, got {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRate {
    pub c: f64,
    pub eta_c: f64,
}

// m(ξ) = 1 − ξ²/6 + 19ξ⁴/360 + O(ξ⁶)
const C2: f64 = -1.0 / 6.0;
const C4: f64 = 19.0 / 360.0;

/// `m''(0)` as an exact rational.
pub fn second_derivative_at_zero() -> Ratio<i64> {
    Ratio::new(-1, 3)
}

/// `m''''(0)` as an exact rational.
pub fn fourth_derivative_at_zero() -> Ratio<i64> {
    Ratio::new(19, 15)
}

/// Real symbol; total on finite reals.
#[inline]
pub fn value(xi: f64) -> f64 {
    let a = xi.abs();
    if a < SERIES_THRESHOLD {
        let x2 = xi * xi;
        1.0 + x2 * (C2 + C4 * x2)
    } else {
        (a.tanh() / a).sqrt()
    }
}

pub fn eval(xi: f64) -> SymbolValue {
    SymbolValue { xi, value: value(xi) }
}

/// `tanh` that stays finite for large real parts.
fn tanh_complex(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -tanh_complex(-z);
    }
    let e = (-2.0 * z).exp();
    (1.0 - e) / (1.0 + e)
}

/// Principal-branch continuation of `m` to complex arguments with `|Im z| < π/2`.
pub fn value_complex(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_THRESHOLD {
        let z2 = z * z;
        Complex64::new(1.0, 0.0) + z2 * (C2 + z2 * C4)
    } else {
        (tanh_complex(z) / z).sqrt()
    }
}

/// `m(theta + sign·i·eta)` for `eta ∈ (0, π/2)`.
pub fn eval_complex(theta: f64, eta: f64, sign: Sign) -> Result<ComplexSymbolValue> {
    check_strip(eta)?;
    let z = Complex64::new(theta, sign.as_f64() * eta);
    Ok(ComplexSymbolValue {
        theta,
        eta,
        sign,
        value: value_complex(z),
    })
}

pub(crate) fn check_strip(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < FRAC_PI_2) {
        return Err(invalid(format!("eta = {eta} must lie in (0, π/2)")));
    }
    Ok(())
}

/// `√(tan η / η)`, the symbol on the imaginary axis.
fn imaginary_axis_symbol(eta: f64) -> f64 {
    if eta < SERIES_THRESHOLD {
        let e2 = eta * eta;
        // √(tan η/η) = 1 + η²/6 + 19η⁴/360 + …
        1.0 + e2 * (1.0 / 6.0 + e2 * C4)
    } else {
        (eta.tan() / eta).sqrt()
    }
}

/// Root `η_c ∈ (0, π/2)` of `√(tan η / η) = c`.
///
/// Bisection on the bracket followed by a Newton polish.
pub fn decay_rate(c: f64) -> Result<DecayRate> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(invalid(format!("decay rate needs c > 1, got {c}")));
    }
    let g = |eta: f64| imaginary_axis_symbol(eta) - c;

    let mut hi = FRAC_PI_2 - 1e-9;
    let mut gap = 1e-9;
    while g(hi) < 0.0 {
        gap *= 1e-2;
        if gap < 1e-15 {
            return Err(invalid(format!("c = {c} too large for the decay-rate bracket")));
        }
        hi = FRAC_PI_2 - gap;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut eta = 0.5 * (lo + hi);

    for _ in 0..3 {
        let r = g(eta);
        if r == 0.0 {
            break;
        }
        let s = imaginary_axis_symbol(eta);
        let sec2 = 1.0 / eta.cos().powi(2);
        let deriv = (eta * sec2 - eta.tan()) / (eta * eta) / (2.0 * s);
        let next = eta - r / deriv;
        if next.is_finite() && next > 0.0 && next < FRAC_PI_2 && g(next).abs() < r.abs() {
            eta = next;
        } else {
            break;
        }
    }
    Ok(DecayRate { c, eta_c: eta })
}

/// `(−1)^{n/2} m⁽ⁿ⁾(0)`, equal to the n-th moment of the kernel.
pub fn taylor_moment(n: u32) -> Result<f64> {
    match n {
        0 => Ok(1.0),
        2 => Ok(1.0 / 3.0),
        4 => Ok(19.0 / 15.0),
        _ => Err(invalid(format!("taylor moment defined for n ∈ {{0, 2, 4}}, got {n}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn value_at_origin_and_evenness() {
        assert_eq!(value(0.0), 1.0);
        assert_eq!(value(-2.5), value(2.5));
        // sqrt(tanh 1) = 0.872693620897829691543614... (30-digit reference)
        assert!((value(1.0) - 0.872_693_620_897_829_7).abs() < 1e-15);
    }

    #[test]
    fn series_matches_closed_form_across_threshold() {
        for &xi in &[0.0099999, 0.01, 0.02, 0.05] {
            let closed = (f64::tanh(xi) / xi).sqrt();
            let series = 1.0 - xi * xi / 6.0 + 19.0 * xi.powi(4) / 360.0;
            assert!((closed - series).abs() / closed < 1e-8, "xi = {xi}");
            assert!((value(xi) - closed).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_square_on_imaginary_axis() {
        let v = eval_complex(0.0, PI / 4.0, Sign::Minus).unwrap().value;
        let sq = v * v;
        assert!((sq.re - 4.0 / PI).abs() < 1e-14);
        assert!(sq.im.abs() < 1e-14);
    }

    #[test]
    fn conjugate_symmetry() {
        let minus = eval_complex(0.7, 0.3, Sign::Minus).unwrap().value;
        let plus = eval_complex(0.7, 0.3, Sign::Plus).unwrap().value;
        assert!((plus - minus.conj()).norm() < 1e-15);
    }

    #[test]
    fn complex_decay_far_out() {
        let v = eval_complex(40.0, 0.5, Sign::Minus).unwrap().value;
        // |m| ≈ |θ|^{-1/2} once tanh has saturated
        assert!(v.norm() < 0.2);
        assert!((v.norm() - 40f64.powf(-0.5)).abs() < 1e-4);
        let far = eval_complex(800.0, 0.5, Sign::Minus).unwrap().value;
        assert!(far.norm().is_finite() && far.norm() < 0.05);
    }

    #[test]
    fn strip_is_enforced() {
        assert!(eval_complex(1.0, 0.0, Sign::Minus).is_err());
        assert!(eval_complex(1.0, FRAC_PI_2, Sign::Minus).is_err());
        assert!(eval_complex(1.0, -0.2, Sign::Plus).is_err());
    }

    #[test]
    fn decay_rate_special_values() {
        let r = decay_rate((4.0 / PI).sqrt()).unwrap();
        assert!((r.eta_c - PI / 4.0).abs() < 1e-12);

        let c = 1.0 + 1e-6;
        let r = decay_rate(c).unwrap();
        let approx = (3.0 * (c * c - 1.0)).sqrt();
        assert!((r.eta_c - approx).abs() / approx < 1e-5);

        // tan(η)/η = 4: η = 1.393249075325588516... (30-digit reference)
        let r = decay_rate(2.0).unwrap();
        assert!((r.eta_c - 1.393_249_075_325_588_5).abs() < 1e-13);
        // η_c(1.2) = 0.928763160647326890...
        assert!((decay_rate(1.2).unwrap().eta_c - 0.928_763_160_647_326_9).abs() < 1e-13);

        assert!(decay_rate(1.0).is_err());
        assert!(decay_rate(0.5).is_err());
    }

    #[test]
    fn taylor_moments() {
        assert_eq!(taylor_moment(0).unwrap(), 1.0);
        assert!((taylor_moment(2).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!((taylor_moment(4).unwrap() - 19.0 / 15.0).abs() < 1e-16);
        assert!(taylor_moment(3).is_err());
        assert_eq!(second_derivative_at_zero(), Ratio::new(-2, 6));
        assert_eq!(fourth_derivative_at_zero() * Ratio::from_integer(360), Ratio::from_integer(19 * 24));
    }
}
