//! Quick invariant suite behind the `selftest` subcommand.

use num_complex::Complex64;
use serde::Serialize;

use crate::reduced::{self, Q};
use crate::solver::{self, ContinuationConfig};
use crate::spectral::{Grid, Spectral};
use crate::{diagnostics, kernel, symbol};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Runs every check; none of them aborts the others.
pub fn run() -> Vec<Check> {
    vec![
        symbol_identities(),
        kernel_moments(),
        coefficient_round_trip(),
        reduced_coefficients(),
        short_branch(),
    ]
}

fn symbol_identities() -> Check {
    let mut worst = 0.0f64;
    for i in 0..40 {
        let theta = -20.0 + 40.0 * i as f64 / 39.0;
        for j in 1..10 {
            let eta = 0.15 * j as f64;
            let m2 = symbol::value_complex(Complex64::new(theta, -eta)).powi(2);
            let (s2t, s2e) = ((2.0 * theta).sinh(), (2.0 * eta).sin());
            let den = (theta * theta + eta * eta) * ((2.0 * theta).cosh() + (2.0 * eta).cos());
            let re = (theta * s2t + eta * s2e) / den;
            let im = (eta * s2t - theta * s2e) / den;
            worst = worst.max((m2 - Complex64::new(re, im)).norm() / m2.norm());
        }
    }
    for j in 1..10 {
        let eta = 0.15 * j as f64;
        let m2 = symbol::value_complex(Complex64::new(0.0, -eta)).powi(2);
        worst = worst.max((m2.re - eta.tan() / eta).abs() / m2.re);
    }
    check("symbol identities", worst < 1e-12, format!("max relative deviation {worst:.2e}"))
}

fn kernel_moments() -> Check {
    let expected = [1.0, 0.0, 1.0 / 3.0, 0.0, 19.0 / 15.0];
    let mut worst = 0.0f64;
    for (n, e) in expected.iter().enumerate() {
        match kernel::moment(n as u32) {
            Ok(v) => worst = worst.max((v - e).abs()),
            Err(e) => return check("kernel moments", false, e.to_string()),
        }
    }
    check("kernel moments", worst < 1e-6, format!("max deviation {worst:.2e}"))
}

fn coefficient_round_trip() -> Check {
    let grid = match Grid::new(10.0, 64) {
        Ok(g) => g,
        Err(e) => return check("coefficient round trip", false, e.to_string()),
    };
    let sp = Spectral::new(grid);
    let coeffs: Vec<f64> = (0..64).map(|k| ((k * 7 % 11) as f64 - 5.0) / (1.0 + k as f64)).collect();
    let back = sp.cosine_coefficients(&sp.synthesize(&coeffs));
    let err = coeffs.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check("coefficient round trip", err < 1e-13, format!("max deviation {err:.2e}"))
}

fn reduced_coefficients() -> Check {
    let r = reduced::assemble_reduced(&reduced::solve_coefficients());
    let ok = r.phi_sq == Q::from_integer(-6)
        && r.dphi_sq == Q::new(19, 5)
        && r.nu_phi == Q::from_integer(6)
        && r.phi_dphi == Q::from_integer(0)
        && r.nu_dphi == Q::from_integer(0);
    check(
        "reduced coefficients",
        ok,
        format!("φ²: {}, φ'²: {}, νφ: {}", r.phi_sq, r.dphi_sq, r.nu_phi),
    )
}

fn short_branch() -> Check {
    let config = ContinuationConfig { modes: 256, max_points: 6, ..Default::default() };
    match solver::continue_branch(&config) {
        Ok(branch) => {
            let n = branch.points.len();
            let all_ok = branch.points.iter().all(|p| diagnostics::check_basic(p).all_ok());
            let rising = branch.points.windows(2).all(|w| w[1].amplitude > w[0].amplitude && w[1].c() > w[0].c());
            check(
                "short branch",
                n == 6 && all_ok && rising,
                format!("{n} points, last a = {:.4}, c = {:.6}", branch.last().amplitude, branch.last().c()),
            )
        }
        Err(e) => check("short branch", false, e.to_string()),
    }
}
