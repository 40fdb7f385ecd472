//! Periodic even collocation grid, the Fourier multiplier `m(D)`, the
//! dealiased quadratic term and discrete Sobolev norms.
//!
//! An even profile on the grid is represented internally by its cosine
//! coefficients `a_0, …, a_{N-1}`,
//!
//! ```text
//!     φ(x) = Σ_{k<N} a_k cos(kπx/L),
//! ```
//!
//! with the Nyquist mode `k = N` projected out. Products of two such series
//! have modes up to `2N − 2`, so squaring on a `3N`-point grid aliases only
//! into modes `≥ N + 2` and the truncated square is exact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::defaults::PERIODIZATION_TOL;
use crate::error::{invalid, Error, Result};
use crate::symbol;

/// Equispaced periodic grid on `[−L, L)` with `2N` nodes `x_j = −L + jL/N`
/// and wavenumbers `ξ_k = kπ/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_period: f64,
    modes: usize,
}

impl Grid {
    pub fn new(half_period: f64, modes: usize) -> Result<Self> {
        if !(half_period > 0.0 && half_period.is_finite()) {
            return Err(invalid(format!("half period must be positive, got {half_period}")));
        }
        if modes < 4 || !modes.is_power_of_two() {
            return Err(invalid(format!("modes must be a power of two ≥ 4, got {modes}")));
        }
        Ok(Grid { half_period, modes })
    }

    /// Grid whose half period makes `exp(−η_c L)` equal to the periodization tolerance.
    pub fn periodized(c: f64, modes: usize) -> Result<Self> {
        let eta = symbol::decay_rate(c)?.eta_c;
        Grid::new(-PERIODIZATION_TOL.ln() / eta, modes)
    }

    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of nodes, `2N`.
    pub fn len(&self) -> usize {
        2 * self.modes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.half_period / self.modes as f64
    }

    /// Index of the node at `x = 0`.
    pub fn center(&self) -> usize {
        self.modes
    }

    /// `x_j`, computed as `(j − N)h` so that mirrored nodes are exact negatives.
    pub fn node(&self, j: usize) -> f64 {
        (j as f64 - self.modes as f64) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.node(j)).collect()
    }

    /// Index of the node mirrored through `x = 0`.
    pub fn mirror(&self, j: usize) -> usize {
        (self.len() - j) % self.len()
    }

    pub fn wavenumber(&self, k: i64) -> f64 {
        k as f64 * std::f64::consts::PI / self.half_period
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Grid::new(self.half_period, self.modes * factor)
    }
}

/// An even wave `φ` with speed `c` sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    grid: Grid,
    values: Vec<f64>,
    c: f64,
}

const EVENNESS_TOL: f64 = 1e-12;

impl WaveProfile {
    pub fn new(grid: Grid, values: Vec<f64>, c: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "profile has {} samples, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if !c.is_finite() || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("profile values and speed must be finite"));
        }
        let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for j in 0..values.len() {
            if (values[j] - values[grid.mirror(j)]).abs() > EVENNESS_TOL * scale {
                return Err(invalid(format!("profile is not even at node {j}")));
            }
        }
        Ok(WaveProfile { grid, values, c })
    }

    /// Samples `f(|x|)` on the grid.
    pub fn from_even_fn(grid: Grid, c: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|j| f(grid.node(j).abs())).collect();
        WaveProfile::new(grid, values, c)
    }

    pub fn constant(grid: Grid, c: f64, value: f64) -> Result<Self> {
        WaveProfile::new(grid, vec![value; grid.len()], c)
    }

    pub fn zero(grid: Grid, c: f64) -> Result<Self> {
        WaveProfile::constant(grid, c, 0.0)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn nu(&self) -> f64 {
        self.c - 1.0
    }

    /// `φ(0)`.
    pub fn amplitude(&self) -> f64 {
        self.values[self.grid.center()]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> WaveProfile {
        WaveProfile {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
            c: self.c,
        }
    }

    pub fn with_speed(&self, c: f64) -> WaveProfile {
        WaveProfile { c, ..self.clone() }
    }

    /// Writes `# {json header}` followed by an `x,phi` table at full precision.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(48 * self.values.len());
        let header = ProfileHeader {
            half_period: self.grid.half_period,
            modes: self.grid.modes,
            c: self.c,
            nu: self.nu(),
        };
        writeln!(out, "# {}", serde_json::to_string(&header)?).unwrap();
        out.push_str("x,phi\n");
        for (j, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.grid.node(j), v).unwrap();
        }
        let mut file = fs::File::create(path)?;
        file.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| Error::Format("empty file".into()))?;
        let json = first
            .strip_prefix('#')
            .ok_or_else(|| Error::Format("missing '# {json}' header line".into()))?;
        let header: ProfileHeader = serde_json::from_str(json.trim())?;
        match lines.next() {
            Some(h) if h.trim() == "x,phi" => {}
            _ => return Err(Error::Format("missing 'x,phi' column header".into())),
        }
        let grid = Grid::new(header.half_period, header.modes)?;
        let mut values = Vec::with_capacity(grid.len());
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let phi = line
                .split(',')
                .nth(1)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Format(format!("bad data row {}", row + 3)))?;
            values.push(phi);
        }
        WaveProfile::new(grid, values, header.c)
    }
}

/// JSON header of a profile file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileHeader {
    #[serde(rename = "L")]
    pub half_period: f64,
    #[serde(rename = "N")]
    pub modes: usize,
    pub c: f64,
    pub nu: f64,
}

/// Transform plans and the sampled symbol for one grid.
pub struct Spectral {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    forward_padded: Arc<dyn Fft<f64>>,
    inverse_padded: Arc<dyn Fft<f64>>,
    symbol: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.len();
        let padded = 3 * grid.modes();
        Spectral {
            grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            forward_padded: planner.plan_fft_forward(padded),
            inverse_padded: planner.plan_fft_inverse(padded),
            symbol: (0..=grid.modes())
                .map(|k| symbol::value(grid.wavenumber(k as i64)))
                .collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `m(ξ_k)` for `0 ≤ k ≤ N`.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Signed mode number of FFT slot `k`.
    fn signed_mode(&self, k: usize) -> i64 {
        let n = self.grid.len();
        if k <= n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Complex coefficients `φ̂_k` of `φ(x) = Σ φ̂_k e^{iξ_k x}`, FFT ordering.
    pub fn spectrum(&self, values: &[f64]) -> Vec<Complex64> {
        let n = self.grid.len();
        assert_eq!(values.len(), n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / n as f64;
        // x_0 = −L contributes the phase e^{−iξ_k x_0} = (−1)^k
        for (k, z) in buf.iter_mut().enumerate() {
            let s = if k % 2 == 0 { scale } else { -scale };
            *z *= s;
        }
        buf
    }

    /// Applies the diagonal multiplier `f(ξ)` to arbitrary real node values.
    pub fn apply_multiplier(&self, values: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.grid.len();
        assert_eq!(values.len(), n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            *z *= f(self.grid.wavenumber(self.signed_mode(k)));
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter().map(|z| z.re * scale).collect()
    }

    /// `m(D)` applied to node values.
    pub fn apply_symbol(&self, values: &[f64]) -> Vec<f64> {
        let table = &self.symbol;
        let modes = self.grid.modes() as i64;
        let n = self.grid.len();
        assert_eq!(values.len(), n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            let mode = self.signed_mode(k).abs().min(modes) as usize;
            *z *= table[mode];
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter().map(|z| z.re * scale).collect()
    }

    /// Cosine coefficients `a_0, …, a_{N−1}` of the even part of `values`.
    pub fn cosine_coefficients(&self, values: &[f64]) -> Vec<f64> {
        let spec = self.spectrum(values);
        let n = self.grid.len();
        let mut a = Vec::with_capacity(self.grid.modes());
        a.push(spec[0].re);
        for k in 1..self.grid.modes() {
            a.push(spec[k].re + spec[n - k].re);
        }
        a
    }

    /// Node values of a cosine series.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        assert_eq!(coeffs.len(), self.grid.modes());
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        buf[0] = Complex64::new(coeffs[0], 0.0);
        for k in 1..coeffs.len() {
            let s = if k % 2 == 0 { 0.5 } else { -0.5 };
            buf[k] = Complex64::new(s * coeffs[k], 0.0);
            buf[n - k] = buf[k];
        }
        self.inverse.process(&mut buf);
        let mut values: Vec<f64> = buf.iter().map(|z| z.re).collect();
        // restore exact evenness lost to rounding
        for j in 1..self.grid.modes() {
            let m = self.grid.mirror(j);
            let avg = 0.5 * (values[j] + values[m]);
            values[j] = avg;
            values[m] = avg;
        }
        values
    }

    /// Value of a cosine series at `x = 0`.
    pub fn value_at_origin(coeffs: &[f64]) -> f64 {
        coeffs.iter().sum()
    }

    /// Cosine coefficients of the square of a cosine series, truncated to `N` modes.
    ///
    /// Evaluated by zero-padding to `3N` points, squaring pointwise and
    /// transforming back.
    pub fn dealiased_square(&self, coeffs: &[f64]) -> Vec<f64> {
        let modes = self.grid.modes();
        assert_eq!(coeffs.len(), modes);
        let padded = 3 * modes;
        let mut buf = vec![Complex64::new(0.0, 0.0); padded];
        buf[0] = Complex64::new(coeffs[0], 0.0);
        for k in 1..modes {
            buf[k] = Complex64::new(0.5 * coeffs[k], 0.0);
            buf[padded - k] = buf[k];
        }
        self.inverse_padded.process(&mut buf);
        for z in buf.iter_mut() {
            *z = Complex64::new(z.re * z.re, 0.0);
        }
        self.forward_padded.process(&mut buf);
        let scale = 1.0 / padded as f64;
        let mut out = Vec::with_capacity(modes);
        out.push(buf[0].re * scale);
        for k in 1..modes {
            out.push((buf[k].re + buf[padded - k].re) * scale);
        }
        out
    }

    /// Coefficients of `cφ − m(D)φ − φ²` for the cosine series `coeffs`.
    pub fn residual_coefficients(&self, coeffs: &[f64], c: f64) -> Vec<f64> {
        let sq = self.dealiased_square(coeffs);
        coeffs
            .iter()
            .zip(&self.symbol)
            .zip(&sq)
            .map(|((a, m), s)| (c - m) * a - s)
            .collect()
    }

    /// Discrete residual of the traveling-wave equation at the nodes.
    pub fn residual(&self, profile: &WaveProfile) -> Vec<f64> {
        let a = self.cosine_coefficients(profile.values());
        self.synthesize(&self.residual_coefficients(&a, profile.c()))
    }

    /// Discrete `H^s` norm `(2L Σ_k (1 + ξ_k²)^s |φ̂_k|²)^{1/2}`.
    pub fn sobolev_norm(&self, values: &[f64], s: f64) -> f64 {
        let spec = self.spectrum(values);
        let sum: f64 = spec
            .iter()
            .enumerate()
            .map(|(k, z)| {
                let xi = self.grid.wavenumber(self.signed_mode(k));
                (1.0 + xi * xi).powf(s) * z.norm_sqr()
            })
            .sum();
        (2.0 * self.grid.half_period() * sum).sqrt()
    }
}

/// Galerkin matrix of multiplication by the cosine series `coeffs`, acting on
/// cosine coefficients: `(φψ)_k = Σ_l M[k, l] ψ_l`.
pub fn multiplication_matrix(coeffs: &[f64]) -> Mat<f64> {
    let n = coeffs.len();
    Mat::from_fn(n, n, |k, l| {
        let mut v = 0.0;
        if k >= l {
            v += coeffs[k - l];
        }
        if k + l < n {
            v += coeffs[k + l];
        }
        if k > 0 && l >= k {
            v += coeffs[l - k];
        }
        0.5 * v
    })
}

pub fn apply_symbol(profile: &WaveProfile) -> Vec<f64> {
    Spectral::new(*profile.grid()).apply_symbol(profile.values())
}

pub fn residual(profile: &WaveProfile) -> Vec<f64> {
    Spectral::new(*profile.grid()).residual(profile)
}

pub fn sobolev_norm(profile: &WaveProfile, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(invalid(format!("Sobolev index must be ≥ 0, got {s}")));
    }
    Ok(Spectral::new(*profile.grid()).sobolev_norm(profile.values(), s))
}
