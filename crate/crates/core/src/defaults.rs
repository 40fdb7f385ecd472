//! Default parameters for every command and driver, collected in one place.
//!
//! | name                | value | used by                                          |
//! |---------------------|-------|--------------------------------------------------|
//! | `SERIES_THRESHOLD`  | 1e-2  | Taylor branch of the symbol near 0               |
//! | `NU0`               | 0.02  | first speed offset of a continuation run         |
//! | `AMPLITUDE_STEP`    | 0.01  | initial (and maximal) amplitude increment        |
//! | `EPS_STOP`          | 1e-3  | stop when c/2 − a < EPS_STOP · c/2               |
//! | `MODES`             | 2048  | cosine modes N of a branch run                   |
//! | `NEWTON_TOL`        | 1e-10 | relative max-norm residual for convergence       |
//! | `NEWTON_MAX_ITERS`  | 25    | Newton iteration cap                             |
//! | `MAX_HALVINGS`      | 10    | stall once the step is below AMPLITUDE_STEP/2^10 |
//! | `MAX_POINTS`        | 2000  | cap on accepted branch points                    |
//! | `PERIODIZATION_TOL` | 1e-10 | half period L chosen with exp(−η_c L) below it   |
//! | `KDV_WIDTH_FACTOR`  | 12    | L ≥ KDV_WIDTH_FACTOR/√(6ν) · KDV_SAFETY          |
//! | `KDV_SAFETY`        | 1.5   |                                                  |
//! | `DIAGNOSTIC_SLACK`  | 1e-10 | positivity/evenness/monotonicity slack           |
//! | `NEAR_EXTREME`      | 1e-3  | gap/(c/2) below which the cusp fit is allowed    |
//! | `THETA_MAX`         | 100   | contour truncation of the winding computation    |
//! | `WINDING_SAMPLES`   | 20000 | initial samples per arc                          |
//! | `INDEX_GUARD`       | 0.05  | allowed distance of the index from an integer    |

pub const SERIES_THRESHOLD: f64 = 1e-2;

pub const NU0: f64 = 0.02;
pub const AMPLITUDE_STEP: f64 = 0.01;
pub const EPS_STOP: f64 = 1e-3;
pub const MODES: usize = 2048;
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITERS: usize = 25;
pub const MAX_HALVINGS: u32 = 10;
pub const MAX_POINTS: usize = 2000;

pub const PERIODIZATION_TOL: f64 = 1e-10;
pub const KDV_WIDTH_FACTOR: f64 = 12.0;
pub const KDV_SAFETY: f64 = 1.5;

pub const DIAGNOSTIC_SLACK: f64 = 1e-10;
pub const NEAR_EXTREME: f64 = 1e-3;

pub const THETA_MAX: f64 = 100.0;
pub const WINDING_SAMPLES: usize = 20_000;
pub const INDEX_GUARD: f64 = 0.05;
