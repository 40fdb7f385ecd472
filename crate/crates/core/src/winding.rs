//! Argument increase of the boundary symbol `A(θ) = 1 − m(θ ∓ iη)` along the
//! two horizontal arcs of the weighted contour, the resulting Fredholm index,
//! and the positivity of the symbol `c − m(ξ)`, `c − 2φ(x)` along a branch.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::defaults::{INDEX_GUARD, THETA_MAX, WINDING_SAMPLES};
use crate::error::{invalid, Error, Result};
use crate::solver::BranchPoint;
use crate::symbol::{self, check_strip, Sign};

/// Phase jump that triggers midpoint refinement.
const REFINE_JUMP: f64 = PI / 8.0;
/// Phase jump that is never accepted.
const MAX_JUMP: f64 = PI / 2.0;
const MAX_DEPTH: u32 = 30;
/// Clustering strength of the `sinh` sampling map.
const CLUSTER: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcSample {
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    /// Unwrapped argument, starting from the principal value at the first sample.
    pub arg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingResult {
    pub eta: f64,
    pub sign: Sign,
    pub theta_max: f64,
    /// In traversal order.
    pub samples: Vec<ArcSample>,
    pub unwrapped_argument_increase: f64,
    pub min_modulus: f64,
    pub max_jump: f64,
    /// Principal arguments of `A` at the two ends of the arc.
    pub endpoint_args: (f64, f64),
    /// Increase divided by `2π`, rounded.
    pub inferred_index: i64,
}

/// `A(θ) = 1 − m(θ − s·iη)` with `s = ±1`.
fn boundary_symbol(theta: f64, eta: f64, sign: Sign) -> Complex64 {
    Complex64::new(1.0, 0.0) - symbol::value_complex(Complex64::new(theta, -sign.as_f64() * eta))
}

/// `n` points on `[−θ_max, θ_max]`, clustered at `θ = 0`.
fn clustered(theta_max: f64, n: usize) -> Vec<f64> {
    let s = CLUSTER.sinh();
    (0..n)
        .map(|i| {
            let u = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            theta_max * (CLUSTER * u).sinh() / s
        })
        .collect()
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Unwrapped argument increase of `A` along one arc.
///
/// `sign = +1` samples `m(θ − iη)` with `θ` increasing and `sign = −1` samples
/// the conjugate arc `m(θ + iη)` with `θ` decreasing, so that both arcs carry
/// the counter-clockwise orientation of the closed contour.
pub fn arc_winding(eta: f64, sign: Sign, theta_max: f64, n_samples: usize) -> Result<WindingResult> {
    check_strip(eta)?;
    if !(theta_max >= 30.0) || !theta_max.is_finite() {
        return Err(invalid(format!("theta_max must be ≥ 30, got {theta_max}")));
    }
    if n_samples < 10_000 {
        return Err(invalid(format!("at least 10⁴ samples required, got {n_samples}")));
    }
    let mut thetas = clustered(theta_max, n_samples);
    if sign == Sign::Minus {
        thetas.reverse();
    }

    let mut samples = Vec::with_capacity(n_samples);
    let first = boundary_symbol(thetas[0], eta, sign);
    samples.push(ArcSample { theta: thetas[0], re: first.re, im: first.im, arg: first.arg() });
    let mut max_jump = 0.0f64;
    for w in thetas.windows(2) {
        refine_segment(w[0], w[1], eta, sign, 0, &mut samples, &mut max_jump)?;
    }

    let increase = samples.last().unwrap().arg - samples[0].arg;
    let min_modulus = samples
        .iter()
        .map(|s| s.re.hypot(s.im))
        .fold(f64::INFINITY, f64::min);
    let end = samples.last().unwrap();
    Ok(WindingResult {
        eta,
        sign,
        theta_max,
        endpoint_args: (samples[0].im.atan2(samples[0].re), end.im.atan2(end.re)),
        inferred_index: (increase / (2.0 * PI)).round() as i64,
        unwrapped_argument_increase: increase,
        min_modulus,
        max_jump,
        samples,
    })
}

/// Appends samples on `(t0, t1]`, bisecting while the phase jump exceeds `π/8`.
fn refine_segment(
    t0: f64,
    t1: f64,
    eta: f64,
    sign: Sign,
    depth: u32,
    out: &mut Vec<ArcSample>,
    max_jump: &mut f64,
) -> Result<()> {
    let prev = *out.last().unwrap();
    let z = boundary_symbol(t1, eta, sign);
    let jump = wrap(z.arg() - prev.arg);
    if jump.abs() > REFINE_JUMP && depth < MAX_DEPTH {
        let mid = 0.5 * (t0 + t1);
        refine_segment(t0, mid, eta, sign, depth + 1, out, max_jump)?;
        return refine_segment(mid, t1, eta, sign, depth + 1, out, max_jump);
    }
    if jump.abs() >= MAX_JUMP {
        return Err(Error::Unwrap { theta: t1, jump });
    }
    *max_jump = max_jump.max(jump.abs());
    out.push(ArcSample { theta: t1, re: z.re, im: z.im, arg: prev.arg + jump });
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexSummary {
    pub eta: f64,
    pub theta_max: f64,
    pub increase_arc1: f64,
    pub increase_arc2: f64,
    /// `(increase_arc1 + increase_arc2) / 2π`.
    pub winding: f64,
    pub index: i64,
    pub min_modulus: f64,
}

/// Index with the default truncation and sample count.
pub fn total_index(eta: f64) -> Result<i64> {
    Ok(total_index_with(eta, THETA_MAX, WINDING_SAMPLES)?.index)
}

/// Sum of both arc windings over `2π`, rounded with a guard band.
pub fn total_index_with(eta: f64, theta_max: f64, n_samples: usize) -> Result<IndexSummary> {
    let arc1 = arc_winding(eta, Sign::Minus, theta_max, n_samples)?;
    let arc2 = arc_winding(eta, Sign::Plus, theta_max, n_samples)?;
    let winding = (arc1.unwrapped_argument_increase + arc2.unwrapped_argument_increase) / (2.0 * PI);
    let index = winding.round();
    if (winding - index).abs() >= INDEX_GUARD {
        return Err(Error::GuardBand { value: winding });
    }
    Ok(IndexSummary {
        eta,
        theta_max,
        increase_arc1: arc1.unwrapped_argument_increase,
        increase_arc2: arc2.unwrapped_argument_increase,
        winding,
        index: index as i64,
        min_modulus: arc1.min_modulus.min(arc2.min_modulus),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub theta: f64,
    pub re_m2: f64,
    pub im_m2: f64,
    pub re_a: f64,
    pub im_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadrantTrace {
    pub eta: f64,
    pub samples: Vec<TraceSample>,
    /// `Re m² > 0` at every sample.
    pub re_m2_positive: bool,
    /// `Im m²` has the sign of `θ` at every sample.
    pub im_m2_sign_ok: bool,
}

/// `m(θ − iη)²` and `1 − m(θ − iη)` on the clustered grid over `[−θ_max, θ_max]`.
pub fn quadrant_trace(eta: f64, theta_max: f64, n_samples: usize) -> Result<QuadrantTrace> {
    check_strip(eta)?;
    if !(theta_max > 0.0) || !theta_max.is_finite() {
        return Err(invalid(format!("theta_max must be positive, got {theta_max}")));
    }
    if n_samples < 3 {
        return Err(invalid("at least 3 samples required"));
    }
    // odd count puts a sample exactly on θ = 0
    let n = n_samples | 1;
    let samples: Vec<TraceSample> = clustered(theta_max, n)
        .into_iter()
        .map(|theta| {
            let m = symbol::value_complex(Complex64::new(theta, -eta));
            let m2 = m * m;
            TraceSample { theta, re_m2: m2.re, im_m2: m2.im, re_a: 1.0 - m.re, im_a: -m.im }
        })
        .collect();
    let re_m2_positive = samples.iter().all(|s| s.re_m2 > 0.0);
    let im_m2_sign_ok = samples.iter().all(|s| {
        if s.theta == 0.0 {
            s.im_m2.abs() <= f64::EPSILON
        } else {
            s.im_m2.signum() == s.theta.signum()
        }
    });
    Ok(QuadrantTrace { eta, samples, re_m2_positive, im_m2_sign_ok })
}

/// Minima of the boundary symbol of the linearization about a branch point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolCheck {
    /// `min_ξ (c − m(ξ)) = c − 1`, attained at `ξ = 0`.
    pub frequency_min: f64,
    /// `min_x (c − 2φ(x))`, equal to `2·gap` when the maximum sits at `x = 0`.
    pub spatial_min: f64,
    pub minimum: f64,
}

pub fn branch_symbol_check(point: &BranchPoint) -> SymbolCheck {
    let c = point.c();
    let grid = point.grid();
    let frequency_min = (0..=grid.modes())
        .map(|k| c - symbol::value(grid.wavenumber(k as i64)))
        .fold(f64::INFINITY, f64::min);
    let spatial_min = point
        .profile
        .values()
        .iter()
        .map(|v| c - 2.0 * v)
        .fold(f64::INFINITY, f64::min);
    SymbolCheck { frequency_min, spatial_min, minimum: frequency_min.min(spatial_min) }
}
