use whitham_core::diagnostics;
use whitham_core::solver::{self, Fix, NewtonOptions, Termination};
use whitham_core::spectral::Grid;
use whitham_core::{kernel, symbol, ContinuationConfig, Error};

// mpmath, 30 digits
const M_AT_ONE: f64 = 0.872_693_620_897_829_691_54;
const K_AT_ONE: f64 = 0.077_607_334_915_298_361_47;
const K_REG_AT_ZERO: f64 = -0.350_832_437_664_847_451_02;
// mpmath findroot of tan(η)/η = c²
const DECAY_RATES: [(f64, f64); 5] = [
    (1.02, 0.339_989_636_679_357_7),
    (1.05, 0.523_240_430_894_810_1),
    (1.1, 0.709_187_482_222_676_1),
    (1.2, 0.928_763_160_647_326_9),
    (2.0, 1.393_249_075_325_588_5),
];
// mpmath quadrature of the cosine transform divided by the leading tail term
const TAIL_RATIOS: [(f64, f64); 3] = [(5.0, 0.967_176), (15.0, 0.989_325), (30.0, 0.994_681)];

#[test]
fn frozen_symbol_and_kernel_values() {
    assert!((symbol::value(1.0) - M_AT_ONE).abs() < 1e-15);
    for (c, eta) in DECAY_RATES {
        assert!((symbol::decay_rate(c).unwrap().eta_c - eta).abs() < 1e-12, "c = {c}");
    }
    assert!((kernel::eval(1.0).unwrap().value - K_AT_ONE).abs() < 1e-12);
    assert!((kernel::regular_part(0.0) - K_REG_AT_ZERO).abs() < 1e-12);
    for (x, r) in TAIL_RATIOS {
        assert!((kernel::tail_ratio(x).unwrap() - r).abs() < 1e-6, "x = {x}");
    }
}

#[test]
fn kernel_is_continuous_across_representations() {
    let below = kernel::eval(2.0 - 1e-12).unwrap().value;
    let at = kernel::eval(2.0).unwrap().value;
    assert!((below - at).abs() < 1e-13);
}

fn small_wave(nu: f64, modes: usize) -> solver::BranchPoint {
    let grid = Grid::new(solver::kdv_half_period(nu).unwrap(), modes).unwrap();
    let seed = solver::kdv_seed_on(grid, nu).unwrap();
    solver::newton_solve(&seed, Fix::Speed(1.0 + nu), &NewtonOptions::default()).unwrap()
}

#[test]
fn small_wave_is_close_to_kdv_and_passes_diagnostics() {
    let p = small_wave(0.01, 512);
    assert!(p.newton_iters <= 6);
    assert!(p.residual_norm < 1e-10);
    // a = (3/2)ν (1 + O(ν))
    assert!((p.amplitude / 0.015 - 1.0).abs() < 0.05);
    assert!(diagnostics::check_basic(&p).all_ok());
    assert!(diagnostics::identity_residual(&p) < 1e-8);
    let fit = diagnostics::fit_decay(&p).unwrap();
    assert!(fit.valid && fit.rel_error < 0.05);
    // the smallest singular value is of order ν
    let s = diagnostics::linearization_sigma_min(&p).unwrap();
    assert!(s > 0.1 * 0.01 && s < 10.0 * 0.01, "{s}");
}

#[test]
fn speed_and_amplitude_modes_agree() {
    let p = small_wave(0.03, 256);
    let q = solver::newton_solve(&p.profile, Fix::Amplitude(p.amplitude), &NewtonOptions::default()).unwrap();
    assert!((q.c() - p.c()).abs() < 1e-12);
    let d = p.profile.values().iter().zip(q.profile.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(d < 1e-12);
}

#[test]
fn refinement_keeps_a_resolved_wave() {
    let p = small_wave(0.03, 256);
    let r = solver::refine(&p, 2, &NewtonOptions::default()).unwrap();
    assert_eq!(r.grid().modes(), 512);
    assert_eq!(r.amplitude, p.amplitude);
    assert!((r.c() - p.c()).abs() < 1e-10);
}

#[test]
fn resolving_at_a_speed_on_a_new_grid() {
    let p = small_wave(0.05, 256);
    let grid = Grid::periodized(1.05, 512).unwrap();
    let q = solver::resolve_at_speed(&p, grid, 1.05, &NewtonOptions::default()).unwrap();
    assert_eq!(q.c(), 1.05);
    assert!(q.residual_norm < 1e-10);
    let fit = diagnostics::fit_decay(&q).unwrap();
    assert!(fit.valid && fit.rel_error < 1e-3, "{fit:?}");
}

#[test]
fn amplitude_at_half_speed_is_refused() {
    let p = small_wave(0.02, 256);
    let err = solver::newton_solve(&p.profile, Fix::Amplitude(0.6), &NewtonOptions::default()).unwrap_err();
    assert!(matches!(err, Error::AmplitudeBound { .. } | Error::NewtonDiverged { .. }), "{err}");
}

#[test]
fn strict_run_stalls_where_checks_start_failing() {
    let config = ContinuationConfig { modes: 256, ..Default::default() };
    let b = solver::continue_branch(&config).unwrap();
    let Termination::Stalled(report) = &b.termination else {
        panic!("expected a stall at 256 modes, got {:?}", b.termination);
    };
    assert!(report.last_error.contains("monotone_ok: false"), "{}", report.last_error);
    assert!(report.last_step < config.amplitude_step / 1000.0);
    assert!(b.points.iter().all(|p| diagnostics::check_basic(p).all_ok()));
    assert!(b.points.windows(2).all(|w| w[1].amplitude > w[0].amplitude));
}

#[test]
fn recording_run_reaches_the_extreme_wave() {
    let config = ContinuationConfig { modes: 256, strict: false, ..Default::default() };
    let b = solver::continue_branch(&config).unwrap();
    assert_eq!(b.termination, Termination::NearExtreme);
    let last = b.last();
    assert!(last.gap < 1e-3 * 0.5 * last.c());
    assert!(b.points.iter().all(|p| p.amplitude < 0.5 * p.c() && p.residual_norm < 1e-10));
    // speed exceeds the KdV-regime values near the extreme
    assert!(last.c() > 1.2);
}

#[test]
fn point_cap_is_honoured() {
    let config = ContinuationConfig { modes: 128, max_points: 3, ..Default::default() };
    let b = solver::continue_branch(&config).unwrap();
    assert_eq!(b.termination, Termination::PointCap);
    assert_eq!(b.points.len(), 3);
}
