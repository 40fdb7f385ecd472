//! Property checks applied to computed waves: sign, symmetry and
//! monotonicity, the integral identity `∫φ(φ − ν) = 0`, tail-rate and
//! cusp-exponent fits, and the smallest singular value of the linearization.

use faer::{Mat, Side};
use serde::Serialize;

use crate::defaults::{DIAGNOSTIC_SLACK, NEAR_EXTREME};
use crate::error::{Error, Result};
use crate::solver::BranchPoint;
use crate::spectral::{multiplication_matrix, Spectral};
use crate::symbol;

/// Bound on [`identity_residual`] for an accepted point.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Allowed relative error of a valid decay fit.
pub const DECAY_TOL: f64 = 0.05;
/// Accepted range of the fitted cusp exponent.
pub const CUSP_EXPONENT_RANGE: (f64, f64) = (0.4, 0.6);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasicChecks {
    pub positivity_ok: bool,
    pub evenness_ok: bool,
    /// Non-increasing on `(0, L)` up to the slack.
    pub monotone_ok: bool,
    /// `φ(0) < c/2`.
    pub below_half_speed: bool,
    /// `1 < c ≤ 2`.
    pub speed_ok: bool,
}

impl BasicChecks {
    pub fn all_ok(&self) -> bool {
        self.positivity_ok && self.evenness_ok && self.monotone_ok && self.below_half_speed && self.speed_ok
    }
}

pub fn check_basic(point: &BranchPoint) -> BasicChecks {
    let v = point.profile.values();
    let grid = point.grid();
    let n = grid.modes();
    let c = point.c();
    let positivity_ok = v.iter().all(|&x| x >= -DIAGNOSTIC_SLACK);
    let evenness_ok = (0..v.len()).all(|j| (v[j] - v[grid.mirror(j)]).abs() <= DIAGNOSTIC_SLACK);
    // nodes N, N+1, …, 2N−1 and then node 0 (x = −L ≡ L)
    let half: Vec<f64> = v[n..].iter().copied().chain(std::iter::once(v[0])).collect();
    let monotone_ok = half.windows(2).all(|w| w[1] <= w[0] + DIAGNOSTIC_SLACK);
    BasicChecks {
        positivity_ok,
        evenness_ok,
        monotone_ok,
        below_half_speed: point.amplitude < 0.5 * c,
        speed_ok: c > 1.0 && c <= 2.0,
    }
}

/// `|∫φ(φ − ν)| / ∫φ²` by the trapezoid rule on the periodic grid.
pub fn identity_residual(point: &BranchPoint) -> f64 {
    let nu = point.nu();
    let v = point.profile.values();
    let norm: f64 = v.iter().map(|x| x * x).sum();
    if norm == 0.0 {
        return 0.0;
    }
    let id: f64 = v.iter().map(|x| x * (x - nu)).sum();
    id.abs() / norm
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Negated least-squares slope of `log φ` on the window.
    pub eta_fit: f64,
    pub eta_c: f64,
    pub rel_error: f64,
    /// False when some window sample is below `10·ε`; the fit is then skipped.
    pub valid: bool,
    pub window: (f64, f64),
}

/// Exponential rate of the tail over `x ∈ [L/2, 3L/4]`.
pub fn fit_decay(point: &BranchPoint) -> Result<DecayFit> {
    let eta_c = symbol::decay_rate(point.c())?.eta_c;
    let grid = point.grid();
    let l = grid.half_period();
    let window = (0.5 * l, 0.75 * l);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (grid.center()..grid.len())
        .map(|j| (grid.node(j), point.profile.values()[j]))
        .filter(|(x, _)| *x >= window.0 && *x <= window.1)
        .unzip();
    let valid = xs.len() >= 2 && ys.iter().all(|&y| y > 10.0 * f64::EPSILON);
    if !valid {
        return Ok(DecayFit { eta_fit: f64::NAN, eta_c, rel_error: f64::NAN, valid, window });
    }
    let logs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, _) = least_squares(&xs, &logs);
    let eta_fit = -slope;
    Ok(DecayFit { eta_fit, eta_c, rel_error: (eta_fit - eta_c).abs() / eta_c, valid, window })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspFit {
    /// Slope of `log(c/2 − φ)` against `log x`.
    pub exponent: f64,
    /// Prefactor `C` of the fit `c/2 − φ ≈ C x^p`.
    pub constant: f64,
    /// `min` and `max` of `(c/2 − φ)/x^{1/2}` over the window.
    pub lower_envelope: f64,
    pub upper_envelope: f64,
    /// `√(π/8)`, printed for comparison only.
    pub conjectured_constant: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

/// Power-law fit of `c/2 − φ(x)` over `x ∈ [4h, 100h]` of the refined wave.
pub fn fit_cusp(point: &BranchPoint, refined: &BranchPoint) -> Result<CuspFit> {
    if !(point.gap < NEAR_EXTREME * 0.5 * point.c()) {
        return Err(Error::FitWindow(format!(
            "wave is not near-extreme: gap {:e} ≥ {NEAR_EXTREME}·c/2",
            point.gap
        )));
    }
    let grid = refined.grid();
    let h = grid.spacing();
    let window = (4.0 * h, 100.0 * h);
    let half_c = 0.5 * refined.c();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in grid.center()..grid.len() {
        let x = grid.node(j);
        if x >= window.0 - 1e-12 * h && x <= window.1 + 1e-12 * h {
            let y = half_c - refined.profile.values()[j];
            if !(y > 0.0) {
                return Err(Error::FitWindow(format!("c/2 − φ is not positive at x = {x}")));
            }
            xs.push(x);
            ys.push(y);
        }
    }
    if xs.len() < 10 || window.1 >= grid.half_period() {
        return Err(Error::FitWindow(format!(
            "only {} samples in [4h, 100h]; refine the grid",
            xs.len()
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (exponent, intercept) = least_squares(&lx, &ly);
    let ratios: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y / x.sqrt()).collect();
    Ok(CuspFit {
        exponent,
        constant: intercept.exp(),
        lower_envelope: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        upper_envelope: ratios.iter().copied().fold(0.0, f64::max),
        conjectured_constant: (std::f64::consts::PI / 8.0).sqrt(),
        window,
        samples: xs.len(),
    })
}

/// Smallest singular value of `c − m(D) − 2φ` on the even cosine modes,
/// measured in the `L²` norm of the periodized line.
pub fn linearization_sigma_min(point: &BranchPoint) -> Result<f64> {
    let sp = Spectral::new(*point.grid());
    let a = point.coefficients();
    let n = a.len();
    let c = point.c();
    let m = sp.symbol();
    let mult = multiplication_matrix(a);
    // ‖cos 0‖² = 2L and ‖cos k‖² = L; the operator is symmetric after scaling by these norms
    let weight = |k: usize| if k == 0 { std::f64::consts::SQRT_2 } else { 1.0 };
    let sym = Mat::from_fn(n, n, |i, j| {
        let d = if i == j { c - m[i] } else { 0.0 };
        let jij = d - 2.0 * mult[(i, j)];
        let jji = if i == j { jij } else { -2.0 * mult[(j, i)] };
        let s_ij = jij * weight(i) / weight(j);
        let s_ji = jji * weight(j) / weight(i);
        0.5 * (s_ij + s_ji)
    });
    let eig = sym
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Linalg(format!("{e:?}")))?;
    Ok(eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())))
}

/// All diagnostics of one wave.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub c: f64,
    pub nu: f64,
    pub amplitude: f64,
    pub gap: f64,
    pub residual_norm: f64,
    pub h3_norm: f64,
    #[serde(flatten)]
    pub basic: BasicChecks,
    pub identity_residual: f64,
    pub identity_ok: bool,
    /// `max φ > ν`, required of every non-trivial solution.
    pub amplitude_exceeds_nu: bool,
    pub decay: Option<DecayFit>,
    pub cusp: Option<CuspFit>,
    /// Why the cusp fit was skipped, when it was.
    pub cusp_skipped: Option<String>,
    pub sigma_min: Option<f64>,
    pub symbol_margin: f64,
    pub ok: bool,
}

pub struct ReportOptions {
    pub sigma_min: bool,
}

/// Runs every applicable check; `refined` enables the cusp fit.
pub fn report(point: &BranchPoint, refined: Option<&BranchPoint>, opts: &ReportOptions) -> Result<DiagnosticsReport> {
    let basic = check_basic(point);
    let identity = identity_residual(point);
    let trivial = point.profile.max_abs() == 0.0;
    let amplitude_exceeds_nu = trivial || point.amplitude > point.nu();
    let decay = if point.c() > 1.0 && !trivial { Some(fit_decay(point)?) } else { None };
    let (cusp, cusp_skipped) = match refined {
        Some(r) => match fit_cusp(point, r) {
            Ok(fit) => (Some(fit), None),
            Err(e) => (None, Some(e.to_string())),
        },
        None => (None, None),
    };
    let sigma_min = if opts.sigma_min { Some(linearization_sigma_min(point)?) } else { None };
    let symbol_margin = crate::winding::branch_symbol_check(point).minimum;

    let decay_ok = decay.map_or(true, |d| !d.valid || d.rel_error < DECAY_TOL);
    let cusp_ok = cusp.map_or(true, |f| {
        f.exponent >= CUSP_EXPONENT_RANGE.0
            && f.exponent <= CUSP_EXPONENT_RANGE.1
            && 0.0 < f.lower_envelope
            && f.lower_envelope < f.upper_envelope
    });
    let ok = basic.all_ok()
        && identity < IDENTITY_TOL
        && amplitude_exceeds_nu
        && decay_ok
        && cusp_ok
        && sigma_min.map_or(true, |s| s > 0.0)
        && symbol_margin > 0.0;
    Ok(DiagnosticsReport {
        c: point.c(),
        nu: point.nu(),
        amplitude: point.amplitude,
        gap: point.gap,
        residual_norm: point.residual_norm,
        h3_norm: point.h3_norm,
        basic,
        identity_residual: identity,
        identity_ok: identity < IDENTITY_TOL,
        amplitude_exceeds_nu,
        decay,
        cusp,
        cusp_skipped,
        sigma_min,
        symbol_margin,
        ok,
    })
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
