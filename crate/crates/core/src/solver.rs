//! Newton solver for the discrete traveling-wave equation and amplitude
//! continuation of the solitary-wave branch.
//!
//! Unknowns are the cosine coefficients of the wave (see [`crate::spectral`]).
//! In speed mode `c` is fixed; in amplitude mode `c` is an extra unknown and
//! the row `φ(0) = Σ a_k = a` closes the system.

use faer::prelude::*;
use faer::{Col, Mat};
use serde::{Deserialize, Serialize};

use crate::defaults::{
    AMPLITUDE_STEP, EPS_STOP, KDV_SAFETY, KDV_WIDTH_FACTOR, MAX_HALVINGS, MAX_POINTS, MODES,
    NEWTON_MAX_ITERS, NEWTON_TOL, NU0, PERIODIZATION_TOL,
};
use crate::diagnostics;
use crate::error::{invalid, Error, Result};
use crate::spectral::{multiplication_matrix, Grid, Spectral, WaveProfile};
use crate::symbol;

/// Which quantity Newton keeps fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Fix {
    Speed(f64),
    Amplitude(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: NEWTON_TOL, max_iters: NEWTON_MAX_ITERS }
    }
}

/// A converged wave with the quantities tracked along the branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub profile: WaveProfile,
    /// `φ(0)`.
    pub amplitude: f64,
    /// `max|R| / max|φ|` at the nodes (0 for the zero wave).
    pub residual_norm: f64,
    pub h3_norm: f64,
    /// `c/2 − φ(0)`.
    pub gap: f64,
    pub newton_iters: usize,
    /// Ratio of the largest to the smallest pivot of the last factorization.
    pub condition_estimate: f64,
    coefficients: Vec<f64>,
}

impl BranchPoint {
    fn assemble(sp: &Spectral, coefficients: Vec<f64>, c: f64, iters: usize, cond: f64) -> Result<Self> {
        let values = sp.synthesize(&coefficients);
        let profile = WaveProfile::new(*sp.grid(), values, c)?;
        let residual = sp.synthesize(&sp.residual_coefficients(&coefficients, c));
        let amplitude = profile.amplitude();
        Ok(BranchPoint {
            residual_norm: relative_norm(&residual, profile.values()),
            h3_norm: sp.sobolev_norm(profile.values(), 3.0),
            gap: 0.5 * c - amplitude,
            amplitude,
            newton_iters: iters,
            condition_estimate: cond,
            coefficients,
            profile,
        })
    }

    /// Wraps an externally supplied profile, e.g. one read from disk.
    pub fn from_profile(profile: WaveProfile) -> Result<Self> {
        let sp = Spectral::new(*profile.grid());
        let coefficients = sp.cosine_coefficients(profile.values());
        let c = profile.c();
        let mut point = BranchPoint::assemble(&sp, coefficients, c, 0, f64::NAN)?;
        // keep the samples exactly as given
        point.amplitude = profile.amplitude();
        point.gap = 0.5 * c - point.amplitude;
        point.residual_norm = relative_norm(&sp.residual(&profile), profile.values());
        point.h3_norm = sp.sobolev_norm(profile.values(), 3.0);
        point.profile = profile;
        Ok(point)
    }

    pub fn c(&self) -> f64 {
        self.profile.c()
    }

    pub fn nu(&self) -> f64 {
        self.profile.nu()
    }

    pub fn grid(&self) -> &Grid {
        self.profile.grid()
    }

    /// Cosine coefficients `a_0, …, a_{N−1}`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn relative_norm(residual: &[f64], values: &[f64]) -> f64 {
    let r = max_abs(residual);
    if r == 0.0 {
        0.0
    } else {
        r / max_abs(values).max(f64::MIN_POSITIVE)
    }
}

/// Half period used for a run started at `nu`: wide enough for the KdV
/// soliton and for the exponential tail at speed `1 + nu`.
pub fn kdv_half_period(nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(invalid(format!("nu must be positive, got {nu}")));
    }
    let eta = symbol::decay_rate(1.0 + nu)?.eta_c;
    let tail = -PERIODIZATION_TOL.ln() / eta;
    let width = KDV_WIDTH_FACTOR / (6.0 * nu).sqrt() * KDV_SAFETY;
    Ok(tail.max(width))
}

/// `(3/2)ν sech²(√(6ν)x/2)` at speed `1 + ν` on the given grid.
pub fn kdv_seed_on(grid: Grid, nu: f64) -> Result<WaveProfile> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(invalid(format!("solitary waves need nu > 0, got {nu}")));
    }
    let k = 0.5 * (6.0 * nu).sqrt();
    WaveProfile::from_even_fn(grid, 1.0 + nu, |x| 1.5 * nu / (k * x).cosh().powi(2))
}

/// KdV profile on a grid of `MODES` modes sized by [`kdv_half_period`].
pub fn kdv_seed(nu: f64) -> Result<WaveProfile> {
    if !(nu > 0.0 && nu <= 0.1) {
        return Err(invalid(format!("kdv seed needs nu in (0, 0.1], got {nu}")));
    }
    kdv_seed_on(Grid::new(kdv_half_period(nu)?, MODES)?, nu)
}

/// Newton's method started from `seed`.
///
/// Iterates until the relative residual is far below `tol`, or below `tol`
/// once progress stalls at rounding level.
pub fn newton_solve(seed: &WaveProfile, fix: Fix, opts: &NewtonOptions) -> Result<BranchPoint> {
    let sp = Spectral::new(*seed.grid());
    let coeffs = sp.cosine_coefficients(seed.values());
    newton_coefficients(&sp, coeffs, seed.c(), fix, opts)
}

fn newton_coefficients(
    sp: &Spectral,
    mut a: Vec<f64>,
    mut c: f64,
    fix: Fix,
    opts: &NewtonOptions,
) -> Result<BranchPoint> {
    let n = a.len();
    let target = match fix {
        Fix::Speed(speed) => {
            if !(speed.is_finite()) {
                return Err(invalid("speed must be finite"));
            }
            c = speed;
            None
        }
        Fix::Amplitude(amp) => {
            if !(amp > 0.0 && amp.is_finite()) {
                return Err(invalid(format!("amplitude must be positive, got {amp}")));
            }
            Some(amp)
        }
    };
    let m = sp.symbol();
    let mut prev = f64::INFINITY;
    let mut first = f64::NAN;
    let mut cond = f64::NAN;

    for iter in 0..=opts.max_iters {
        let r = sp.residual_coefficients(&a, c);
        let nodal = sp.synthesize(&r);
        let phi = sp.synthesize(&a);
        let rel = relative_norm(&nodal, &phi);
        let constraint = target.map_or(0.0, |t| Spectral::value_at_origin(&a) - t);
        let constraint_rel = constraint.abs() / max_abs(&phi).max(f64::MIN_POSITIVE);
        let err = rel.max(constraint_rel);
        if !err.is_finite() {
            break;
        }
        if iter == 0 {
            first = err;
        }
        let stalled = err > 0.5 * prev;
        if err <= opts.tol * 1e-3 || (err <= opts.tol && stalled) {
            return BranchPoint::assemble(sp, a, c, iter, cond);
        }
        if iter == opts.max_iters || err > 1e3 * first.max(opts.tol) {
            break;
        }
        prev = err;

        let size = if target.is_some() { n + 1 } else { n };
        let mult = multiplication_matrix(&a);
        let jac = Mat::from_fn(size, size, |i, j| {
            if i < n && j < n {
                let d = if i == j { c - m[i] } else { 0.0 };
                d - 2.0 * mult[(i, j)]
            } else if i < n {
                a[i]
            } else if j < n {
                1.0
            } else {
                0.0
            }
        });
        let rhs = Col::from_fn(size, |i| if i < n { -r[i] } else { -constraint });
        let lu = jac.partial_piv_lu();
        let u = lu.U();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..size {
            let p = u[(i, i)].abs();
            lo = lo.min(p);
            hi = hi.max(p);
        }
        cond = hi / lo;
        let delta = lu.solve(&rhs);
        for i in 0..n {
            a[i] += delta[i];
        }
        if target.is_some() {
            c += delta[n];
        }
        if a.iter().any(|v| !v.is_finite()) || !c.is_finite() {
            break;
        }
        let amp = Spectral::value_at_origin(&a);
        if amp >= 0.5 * c && amp > 0.0 {
            return Err(Error::AmplitudeBound { amplitude: amp, half_speed: 0.5 * c });
        }
    }
    Err(Error::NewtonDiverged { iterations: opts.max_iters, residual: prev })
}

/// Parameters of a continuation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationConfig {
    pub nu0: f64,
    /// Initial and maximal amplitude increment.
    pub amplitude_step: f64,
    /// The run stalls once the step falls below `amplitude_step / 2^max_halvings`.
    pub max_halvings: u32,
    pub newton_tol: f64,
    pub newton_max_iters: usize,
    pub max_points: usize,
    /// Stop once `c/2 − a < eps_stop · c/2`.
    pub eps_stop: f64,
    pub modes: usize,
    /// Half period; derived from `nu0` when absent.
    pub half_period: Option<f64>,
    /// Reject converged points that fail the diagnostics. When false they
    /// are kept and the failures are left to the caller to report.
    pub strict: bool,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            nu0: NU0,
            amplitude_step: AMPLITUDE_STEP,
            max_halvings: MAX_HALVINGS,
            newton_tol: NEWTON_TOL,
            newton_max_iters: NEWTON_MAX_ITERS,
            max_points: MAX_POINTS,
            eps_stop: EPS_STOP,
            modes: MODES,
            half_period: None,
            strict: true,
        }
    }
}

impl ContinuationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("nu0", self.nu0),
            ("amplitude step", self.amplitude_step),
            ("newton tolerance", self.newton_tol),
            ("eps_stop", self.eps_stop),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.nu0 > 0.1 {
            return Err(invalid(format!("nu0 must be at most 0.1, got {}", self.nu0)));
        }
        if self.eps_stop >= self.amplitude_step {
            return Err(invalid("eps_stop must be smaller than the amplitude step"));
        }
        if self.max_points < 2 || self.newton_max_iters == 0 || self.max_halvings == 0 {
            return Err(invalid("max points ≥ 2, Newton iterations ≥ 1 and halvings ≥ 1 required"));
        }
        if let Some(l) = self.half_period {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid(format!("half period must be positive, got {l}")));
            }
        }
        Ok(())
    }

    fn newton(&self) -> NewtonOptions {
        NewtonOptions { tol: self.newton_tol, max_iters: self.newton_max_iters }
    }
}

/// Why a run ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Termination {
    /// The gap fell below `eps_stop · c/2`.
    NearExtreme,
    /// `max_points` reached first.
    PointCap,
    Stalled(StallReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StallReport {
    pub last_amplitude: f64,
    pub last_gap: f64,
    pub last_step: f64,
    pub last_error: String,
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub config: ContinuationConfig,
    pub points: Vec<BranchPoint>,
    pub termination: Termination,
}

impl Branch {
    pub fn last(&self) -> &BranchPoint {
        self.points.last().expect("a branch holds at least its first point")
    }
}

/// Reasons to reject a converged point; `None` means accepted.
fn rejection(point: &BranchPoint, tol: f64) -> Option<String> {
    let report = diagnostics::check_basic(point);
    if !report.all_ok() {
        return Some(format!("basic checks failed: {report:?}"));
    }
    if point.residual_norm >= tol {
        return Some(format!("residual {:e}", point.residual_norm));
    }
    let id = diagnostics::identity_residual(point);
    if !(id < diagnostics::IDENTITY_TOL) {
        return Some(format!("integral identity residual {id:e}"));
    }
    if !(point.amplitude > point.nu()) {
        return Some("amplitude does not exceed nu".into());
    }
    None
}

/// Amplitude continuation from the KdV wave at `nu0` toward the extreme wave.
///
/// Steps are halved on Newton failure or rejection, doubled (up to the
/// configured step) after three consecutive solves taking at most four
/// iterations, and never exceed three quarters of the current gap. A point
/// is rejected when it fails [`diagnostics::check_basic`], the integral
/// identity or `a > ν`, unless `config.strict` is off.
pub fn continue_branch(config: &ContinuationConfig) -> Result<Branch> {
    continue_branch_with(config, |_| {})
}

/// As [`continue_branch`], calling `on_accept` with every accepted point.
pub fn continue_branch_with(
    config: &ContinuationConfig,
    mut on_accept: impl FnMut(&BranchPoint),
) -> Result<Branch> {
    config.validate()?;
    let opts = config.newton();
    let half_period = match config.half_period {
        Some(l) => l,
        None => kdv_half_period(config.nu0)?,
    };
    let grid = Grid::new(half_period, config.modes)?;
    let sp = Spectral::new(grid);
    let seed = kdv_seed_on(grid, config.nu0)?;
    let first = newton_coefficients(
        &sp,
        sp.cosine_coefficients(seed.values()),
        seed.c(),
        Fix::Speed(seed.c()),
        &opts,
    )?;
    if let Some(why) = rejection(&first, config.newton_tol) {
        return Err(invalid(format!("first point rejected: {why}")));
    }
    on_accept(&first);
    let mut points = vec![first];

    let mut step = config.amplitude_step;
    let mut easy = 0u32;
    let min_step = config.amplitude_step * 0.5f64.powi(config.max_halvings as i32);

    let termination = loop {
        let last = points.last().unwrap();
        if last.gap < config.eps_stop * 0.5 * last.c() {
            break Termination::NearExtreme;
        }
        if points.len() >= config.max_points {
            break Termination::PointCap;
        }
        let da = step.min(0.75 * last.gap);
        let target = last.amplitude + da;

        let (guess, c_guess) = match points.len() {
            1 => {
                let s = target / last.amplitude;
                (last.coefficients.iter().map(|v| v * s).collect::<Vec<_>>(), last.c())
            }
            len => {
                let prev = &points[len - 2];
                let t = da / (last.amplitude - prev.amplitude);
                let guess = last
                    .coefficients
                    .iter()
                    .zip(&prev.coefficients)
                    .map(|(x, y)| x + t * (x - y))
                    .collect();
                (guess, last.c() + t * (last.c() - prev.c()))
            }
        };

        let outcome = newton_coefficients(&sp, guess, c_guess, Fix::Amplitude(target), &opts)
            .and_then(|p| match rejection(&p, config.newton_tol) {
                Some(why) if config.strict => Err(Error::Rejected(why)),
                _ => Ok(p),
            });
        match outcome {
            Ok(point) => {
                if point.newton_iters <= 4 {
                    easy += 1;
                    if easy >= 3 {
                        step = (2.0 * step).min(config.amplitude_step);
                        easy = 0;
                    }
                } else {
                    easy = 0;
                }
                on_accept(&point);
                points.push(point);
            }
            Err(e) => {
                let last_error = e.to_string();
                easy = 0;
                step = 0.5 * da;
                if step < min_step {
                    let last = points.last().unwrap();
                    break Termination::Stalled(StallReport {
                        last_amplitude: last.amplitude,
                        last_gap: last.gap,
                        last_step: step,
                        last_error,
                    });
                }
            }
        }
    };

    Ok(Branch { config: *config, points, termination })
}

/// Re-solves `point` at the same amplitude with `factor` times as many modes.
pub fn refine(point: &BranchPoint, factor: usize, opts: &NewtonOptions) -> Result<BranchPoint> {
    if factor < 2 {
        return Err(invalid(format!("refinement factor must be ≥ 2, got {factor}")));
    }
    let grid = point.grid().refined(factor)?;
    let sp = Spectral::new(grid);
    let mut coeffs = point.coefficients.clone();
    coeffs.resize(grid.modes(), 0.0);
    if point.amplitude == 0.0 {
        return newton_coefficients(&sp, coeffs, point.c(), Fix::Speed(point.c()), opts);
    }
    newton_coefficients(&sp, coeffs, point.c(), Fix::Amplitude(point.amplitude), opts)
}

/// Solves at fixed speed `c` on `grid`, starting from `point` resampled by
/// spectral interpolation.
pub fn resolve_at_speed(point: &BranchPoint, grid: Grid, c: f64, opts: &NewtonOptions) -> Result<BranchPoint> {
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| evaluate_series(point.coefficients(), point.grid().half_period(), x))
        .collect();
    let seed = WaveProfile::new(grid, values, c)?;
    newton_solve(&seed, Fix::Speed(c), opts)
}

/// `Σ a_k cos(kπx/L)` at an arbitrary `x`; zero beyond `|x| > L`.
pub fn evaluate_series(coeffs: &[f64], half_period: f64, x: f64) -> f64 {
    if x.abs() > half_period {
        return 0.0;
    }
    let theta = std::f64::consts::PI * x / half_period;
    // Clenshaw recurrence for the cosine series
    let two_cos = 2.0 * theta.cos();
    let (mut b1, mut b2) = (0.0, 0.0);
    for &a in coeffs.iter().skip(1).rev() {
        let b0 = a + two_cos * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + b1 * theta.cos() - b2
}
