//! The reduced second-order ODE `φ'' = −6φ² + (19/5)φ'² + 6νφ` governing
//! small solitary waves, its KdV rescaling and sech² homoclinic, its
//! linearization, and the exact polynomial coefficients behind it.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::symbol;

pub type Q = Ratio<i64>;

/// Blow-up threshold of [`integrate`].
pub const BLOW_UP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedState {
    /// `φ`.
    pub p: f64,
    /// `φ'`.
    pub q: f64,
    pub nu: f64,
}

/// `(Q, −6P² + (19/5)Q² + 6νP)`.
pub fn rhs_truncated(s: ReducedState) -> (f64, f64) {
    (s.q, -6.0 * s.p * s.p + 3.8 * s.q * s.q + 6.0 * s.nu * s.p)
}

/// `(Q̃, P̃ − (3/2)P̃² + (57/10)νQ̃²)`.
pub fn rhs_rescaled(p: f64, q: f64, nu: f64) -> (f64, f64) {
    (q, p - 1.5 * p * p + 5.7 * nu * q * q)
}

/// Linearization of [`rhs_truncated`] at `star` applied to `(U, V)`.
pub fn rhs_linearized(star: ReducedState, u: f64, v: f64) -> (f64, f64) {
    (v, (6.0 * star.nu - 12.0 * star.p) * u + 7.6 * star.q * v)
}

/// `P = βP̃`, `Q = γQ̃`, `t = T/α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ScaleParams {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(invalid(format!("scaling needs nu > 0, got {nu}")));
        }
        let alpha = (6.0 * nu).sqrt();
        let beta = 1.5 * nu;
        Ok(ScaleParams { alpha, beta, gamma: alpha * beta })
    }
}

/// Squares of the coefficient ratios produced by conjugating the truncated
/// field with the rescaling, in exact arithmetic for rational `ν > 0`:
/// `(γ/(αβ))²`, `(6νβ/(αγ))²`, `(6β²/(αγ))²` and `((19/5)(γ/α)/ν)²`.
///
/// They equal `1`, `1`, `9/4` and `(57/10)²`.
pub fn rescaling_identities(nu: Q) -> Result<[Q; 4]> {
    if nu <= Q::from_integer(0) {
        return Err(invalid("nu must be positive"));
    }
    let six = Q::from_integer(6);
    let alpha2 = six * nu;
    let beta = Q::new(3, 2) * nu;
    let gamma2 = Q::new(27, 2) * nu * nu * nu;
    let q19 = Q::new(19, 5);
    Ok([
        gamma2 / (alpha2 * beta * beta),
        six * six * nu * nu * beta * beta / (alpha2 * gamma2),
        six * six * beta * beta * beta * beta / (alpha2 * gamma2),
        q19 * q19 * gamma2 / (alpha2 * nu * nu),
    ])
}

/// Leading-order homoclinic `((3/2)ν sech²(αt/2), φ')` of the truncated field.
pub fn homoclinic_profile(nu: f64, t: f64) -> Result<ReducedState> {
    let s = ScaleParams::new(nu)?;
    let (p, q) = kdv_orbit(s.alpha * t);
    Ok(ReducedState { p: s.beta * p, q: s.gamma * q, nu })
}

/// `(sech²(T/2), −sech²(T/2)tanh(T/2))`.
pub fn kdv_orbit(t: f64) -> (f64, f64) {
    let sech2 = 1.0 / (0.5 * t).cosh().powi(2);
    (sech2, -sech2 * (0.5 * t).tanh())
}

/// A polynomial `c₂x² + c₃x³ + c₄x⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolySolution {
    pub label: (u8, u8, u8),
    /// Coefficients of `x²`, `x³`, `x⁴`.
    pub coefficients: [Q; 3],
}

impl PolySolution {
    pub fn name(&self) -> String {
        let (i, j, k) = self.label;
        format!("Psi_{i}{j}{k}")
    }
}

impl fmt::Display for PolySolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (deg, c) in self.coefficients.iter().enumerate().rev() {
            if *c == Q::from_integer(0) {
                continue;
            }
            let negative = *c < Q::from_integer(0);
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            let mag = if negative { -*c } else { *c };
            if mag != Q::from_integer(1) {
                write!(f, "{mag}*")?;
            }
            write!(f, "x^{}", deg + 2)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `T = Id − K∗` applied to `c₂x² + c₃x³ + c₄x⁴`, returned as the
/// coefficients of `1, x, x²`, via the kernel moments.
pub fn apply_t(coefficients: &[Q; 3]) -> [Q; 3] {
    let m2 = symbol::second_derivative_at_zero();
    let m4 = symbol::fourth_derivative_at_zero();
    let [c2, c3, c4] = *coefficients;
    // T x² = m'', T x³ = 3m''x, T x⁴ = 6m''x² − m''''
    [c2 * m2 - c4 * m4, Q::from_integer(3) * m2 * c3, Q::from_integer(6) * m2 * c4]
}

/// Right-hand sides `1, −1, 2x, −x, x²` for the labels 200, 101, 110, 011, 020.
pub fn coefficient_targets() -> [((u8, u8, u8), [Q; 3]); 5] {
    let z = Q::from_integer(0);
    let one = Q::from_integer(1);
    [
        ((2, 0, 0), [one, z, z]),
        ((1, 0, 1), [-one, z, z]),
        ((1, 1, 0), [z, Q::from_integer(2), z]),
        ((0, 1, 1), [z, -one, z]),
        ((0, 2, 0), [z, z, one]),
    ]
}

/// Solves `T Ψ = rhs` over `span{x², x³, x⁴}` for each target.
///
/// Restricting the Ansatz to degrees ≥ 2 imposes `Ψ(0) = Ψ'(0) = 0`.
pub fn solve_coefficients() -> Vec<PolySolution> {
    let z = Q::from_integer(0);
    let one = Q::from_integer(1);
    // columns are T applied to x², x³, x⁴
    let basis = [[one, z, z], [z, one, z], [z, z, one]].map(|e| apply_t(&e));
    coefficient_targets()
        .into_iter()
        .map(|(label, rhs)| {
            let mut m = [[z; 4]; 3];
            for row in 0..3 {
                for col in 0..3 {
                    m[row][col] = basis[col][row];
                }
                m[row][3] = rhs[row];
            }
            PolySolution { label, coefficients: gauss_solve(m) }
        })
        .collect()
}

/// Gauss–Jordan elimination of a nonsingular 3×3 rational system.
fn gauss_solve(mut m: [[Q; 4]; 3]) -> [Q; 3] {
    let z = Q::from_integer(0);
    for col in 0..3 {
        let pivot = (col..3).find(|&r| m[r][col] != z).expect("nonsingular system");
        m.swap(col, pivot);
        let p = m[col][col];
        for k in 0..4 {
            m[col][k] /= p;
        }
        for r in 0..3 {
            if r != col && m[r][col] != z {
                let f = m[r][col];
                for k in 0..4 {
                    let v = m[col][k];
                    m[r][k] -= f * v;
                }
            }
        }
    }
    [m[0][3], m[1][3], m[2][3]]
}

/// Coefficients of `φ'' = f(φ, φ', ν)` at quadratic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedCoefficients {
    /// On `φ²`.
    pub phi_sq: Q,
    /// On `φ'²`.
    pub dphi_sq: Q,
    /// On `νφ`.
    pub nu_phi: Q,
    /// On `φφ'` and `νφ'`; both vanish by reversibility.
    pub phi_dphi: Q,
    pub nu_dphi: Q,
}

/// `f(A, B, ν) = Ψ''(A, B, ν)(0)`, i.e. twice the `x²` coefficient of each `Ψ_ijk`.
pub fn assemble_reduced(solutions: &[PolySolution]) -> ReducedCoefficients {
    let two = Q::from_integer(2);
    let get = |label: (u8, u8, u8)| {
        solutions
            .iter()
            .find(|s| s.label == label)
            .map(|s| two * s.coefficients[0])
            .unwrap_or_else(|| Q::from_integer(0))
    };
    ReducedCoefficients {
        phi_sq: get((2, 0, 0)),
        dphi_sq: get((0, 2, 0)),
        nu_phi: get((1, 0, 1)),
        phi_dphi: get((1, 1, 0)),
        nu_dphi: get((0, 1, 1)),
    }
}

/// ODE systems available to [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum System {
    /// State `(P, Q)`.
    Truncated { nu: f64 },
    /// State `(P̃, Q̃)`.
    Rescaled { nu: f64 },
    /// State `(P, Q, U, V)`: the truncated field together with its linearization.
    Linearized { nu: f64 },
}

impl System {
    pub fn dimension(&self) -> usize {
        match self {
            System::Linearized { .. } => 4,
            _ => 2,
        }
    }

    pub fn rhs(&self, y: &[f64]) -> Vec<f64> {
        match *self {
            System::Truncated { nu } => {
                let (a, b) = rhs_truncated(ReducedState { p: y[0], q: y[1], nu });
                vec![a, b]
            }
            System::Rescaled { nu } => {
                let (a, b) = rhs_rescaled(y[0], y[1], nu);
                vec![a, b]
            }
            System::Linearized { nu } => {
                let star = ReducedState { p: y[0], q: y[1], nu };
                let (a, b) = rhs_truncated(star);
                let (c, d) = rhs_linearized(star, y[2], y[3]);
                vec![a, b, c, d]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// True when integration stopped because `|state| > 10⁶`.
    pub blew_up: bool,
}

impl Trajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory holds its initial state")
    }
}

/// Classical fourth-order Runge–Kutta with a fixed step from `t0` to `t1`.
///
/// The step is shrunk so that it divides the interval; `t1 < t0` integrates
/// backward.
pub fn integrate(system: System, initial: &[f64], t0: f64, t1: f64, step: f64) -> Result<Trajectory> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(invalid(format!("step must be positive, got {step}")));
    }
    if initial.len() != system.dimension() {
        return Err(invalid(format!(
            "initial state has {} components, system needs {}",
            initial.len(),
            system.dimension()
        )));
    }
    let n = ((t1 - t0).abs() / step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    let mut y = initial.to_vec();
    let mut times = vec![t0];
    let mut states = vec![y.clone()];
    let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for i in 0..n {
        let k1 = system.rhs(&y);
        let k2 = system.rhs(&axpy(&y, &k1, 0.5 * h));
        let k3 = system.rhs(&axpy(&y, &k2, 0.5 * h));
        let k4 = system.rhs(&axpy(&y, &k3, h));
        for j in 0..y.len() {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * h };
        let size = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(size <= BLOW_UP) {
            return Ok(Trajectory { times, states, blew_up: true });
        }
        times.push(t);
        states.push(y.clone());
    }
    Ok(Trajectory { times, states, blew_up: false })
}

/// Halves the step from `step` until the endpoint moves by less than `1e-8`.
pub fn integrate_converged(system: System, initial: &[f64], t0: f64, t1: f64, step: f64) -> Result<(Trajectory, f64)> {
    let mut h = step;
    let mut prev = integrate(system, initial, t0, t1, h)?;
    for _ in 0..20 {
        h *= 0.5;
        let next = integrate(system, initial, t0, t1, h)?;
        let change = if prev.blew_up || next.blew_up {
            f64::INFINITY
        } else {
            prev.last().iter().zip(next.last()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        };
        prev = next;
        if change < 1e-8 {
            return Ok((prev, h));
        }
    }
    Ok((prev, h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub p: f64,
    pub q: f64,
    pub dp: f64,
    pub dq: f64,
}

/// The rescaled vector field on a `grid × grid` lattice of
/// `[−0.5, 1.5] × [−1, 1]`.
pub fn phase_field(nu: f64, grid: usize) -> Result<Vec<FieldSample>> {
    if grid < 2 {
        return Err(invalid("phase grid needs at least 2 points per axis"));
    }
    if !(nu >= 0.0) {
        return Err(invalid(format!("nu must be ≥ 0, got {nu}")));
    }
    let mut out = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let p = -0.5 + 2.0 * i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let q = -1.0 + 2.0 * j as f64 / (grid - 1) as f64;
            let (dp, dq) = rhs_rescaled(p, q, nu);
            out.push(FieldSample { p, q, dp, dq });
        }
    }
    Ok(out)
}

/// Rescaled orbits through `(P̃₀, 0)` for a few `P̃₀` inside the homoclinic
/// loop, each integrated over `T ∈ [−8, 8]`, plus the analytic homoclinic.
pub fn phase_trajectories(nu: f64) -> Result<Vec<(String, Trajectory)>> {
    let mut out = Vec::new();
    for p0 in [0.8, 0.9, 0.95, 0.99] {
        let sys = System::Rescaled { nu };
        let back = integrate(sys, &[p0, 0.0], 0.0, -8.0, 0.01)?;
        let fwd = integrate(sys, &[p0, 0.0], 0.0, 8.0, 0.01)?;
        let mut times: Vec<f64> = back.times.iter().rev().copied().collect();
        let mut states: Vec<Vec<f64>> = back.states.iter().rev().cloned().collect();
        times.extend(fwd.times.iter().skip(1));
        states.extend(fwd.states.iter().skip(1).cloned());
        out.push((format!("orbit_p0_{p0}"), Trajectory { times, states, blew_up: back.blew_up || fwd.blew_up }));
    }
    let times: Vec<f64> = (0..=1600).map(|i| -8.0 + 0.01 * i as f64).collect();
    let states = times.iter().map(|&t| {
        let (p, q) = kdv_orbit(t);
        vec![p, q]
    });
    out.push(("homoclinic".into(), Trajectory { states: states.collect(), times, blew_up: false }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_field_values() {
        assert_eq!(rhs_truncated(ReducedState { p: 0.0, q: 0.0, nu: 0.3 }), (0.0, 0.0));
        let nu = 0.02;
        let (a, b) = rhs_truncated(ReducedState { p: nu, q: 0.0, nu });
        assert_eq!(a, 0.0);
        assert!(b.abs() < 1e-18);
        let (a, b) = rhs_truncated(ReducedState { p: 1.0, q: 1.0, nu: 0.0 });
        assert_eq!(a, 1.0);
        assert!((b + 11.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn rescaled_equilibria() {
        assert_eq!(rhs_rescaled(0.0, 0.0, 0.0), (0.0, 0.0));
        let (a, b) = rhs_rescaled(2.0 / 3.0, 0.0, 0.0);
        assert_eq!(a, 0.0);
        assert!(b.abs() < 1e-16);
    }

    #[test]
    fn homoclinic_endpoints() {
        let nu: f64 = 0.05;
        let s = homoclinic_profile(nu, 0.0).unwrap();
        assert_eq!(s.p, 1.5 * nu);
        assert_eq!(s.q, 0.0);
        let far = homoclinic_profile(nu, 400.0).unwrap();
        assert!(far.p.abs() < 1e-20 && far.q.abs() < 1e-20);
        assert!(homoclinic_profile(0.0, 1.0).is_err());
    }

    #[test]
    fn display_of_polynomials() {
        let sols = solve_coefficients();
        let text: Vec<String> = sols.iter().map(|s| s.to_string()).collect();
        assert_eq!(text, ["-3*x^2", "3*x^2", "-2*x^3", "x^3", "-1/2*x^4 + 19/10*x^2"]);
    }

    #[test]
    fn integrator_rejects_bad_input() {
        assert!(integrate(System::Truncated { nu: 0.0 }, &[0.0, 0.0], 0.0, 1.0, 0.0).is_err());
        assert!(integrate(System::Truncated { nu: 0.0 }, &[0.0], 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn blow_up_is_detected() {
        // P' = Q, Q' = −6P² runs off to −∞ from a negative start
        let t = integrate(System::Truncated { nu: 0.0 }, &[-1.0, -1.0], 0.0, 10.0, 1e-3).unwrap();
        assert!(t.blew_up);
        assert!(t.times.len() < 10_001);
    }
}
