use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use whitham_core::diagnostics::{self, ReportOptions};
use whitham_core::solver::{self, Termination};
use whitham_core::symbol::{self, Sign};
use whitham_core::{kernel, reduced, selftest, winding, BranchPoint, ContinuationConfig, WaveProfile};

use crate::manifest::Manifest;
use crate::{BranchArgs, Command, KernelArgs, PhaseArgs, ReducedCommand, SymbolArgs, VerifyArgs, WindingArgs};

/// Runs one subcommand; `Ok(false)` means a check failed.
pub fn dispatch(cmd: &Command, manifest: &mut Manifest) -> Result<bool> {
    match cmd {
        Command::Symbol(a) => symbol_table(a, manifest),
        Command::Kernel(a) => kernel_table(a, manifest),
        Command::Branch(a) => branch(a, manifest),
        Command::Reduced(ReducedCommand::Phase(a)) => phase(a, manifest),
        Command::Reduced(ReducedCommand::Coeffs) => coeffs(),
        Command::Winding(a) => winding_run(a, manifest),
        Command::Verify(a) => verify(a),
        Command::Selftest => Ok(selftest_run()),
    }
}

pub fn is_usage_error(e: &anyhow::Error) -> bool {
    matches!(e.downcast_ref::<whitham_core::Error>(), Some(whitham_core::Error::InvalidArgument(_)))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Buffered writer to `path`, or to stdout when absent.
fn sink(path: Option<&Path>, manifest: &mut Manifest) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            manifest.output(p);
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn linspace(lo: f64, hi: f64, n: usize, log: bool) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(usage("at least 2 samples required"));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(usage(format!("empty range [{lo}, {hi}]")));
    }
    if log && !(lo > 0.0) {
        return Err(usage("log spacing needs a positive lower bound"));
    }
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if log {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect())
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    whitham_core::Error::InvalidArgument(msg.into()).into()
}

fn symbol_table(a: &SymbolArgs, manifest: &mut Manifest) -> Result<bool> {
    let xs = linspace(a.xi_min, a.xi_max, a.samples, false)?;
    let mut w = sink(a.out.as_deref(), manifest)?;
    match a.eta {
        None => {
            writeln!(w, "xi,m")?;
            for x in xs {
                writeln!(w, "{},{}", num(x), num(symbol::value(x)))?;
            }
        }
        Some(eta) => {
            writeln!(w, "theta,re_m,im_m")?;
            for t in xs {
                let v = symbol::eval_complex(t, eta, Sign::Minus)?.value;
                writeln!(w, "{},{},{}", num(t), num(v.re), num(v.im))?;
            }
        }
    }
    w.flush()?;
    Ok(true)
}

fn kernel_table(a: &KernelArgs, manifest: &mut Manifest) -> Result<bool> {
    let xs = linspace(a.x_min, a.x_max, a.samples, a.log_spacing)?;
    let mut w = sink(a.out.as_deref(), manifest)?;
    writeln!(w, "x,K,K_reg,tail_ratio")?;
    for x in xs {
        let k = kernel::eval(x)?;
        // the tail ratio is only defined far out
        let ratio = if x.abs() >= 5.0 { kernel::tail_ratio(x.abs())? } else { f64::NAN };
        writeln!(w, "{},{},{},{}", num(x), num(k.value), num(k.regular_part), num(ratio))?;
    }
    w.flush()?;
    Ok(true)
}

#[derive(Serialize)]
struct FailedPoint {
    index: usize,
    amplitude: f64,
    checks: diagnostics::BasicChecks,
    identity_residual: f64,
}

#[derive(Serialize)]
struct BranchOutcome<'a> {
    termination: &'a Termination,
    points: usize,
    failing: Vec<FailedPoint>,
}

fn branch(a: &BranchArgs, manifest: &mut Manifest) -> Result<bool> {
    let config = ContinuationConfig {
        nu0: a.nu0,
        amplitude_step: a.da,
        max_halvings: a.max_halvings,
        newton_tol: a.newton_tol,
        newton_max_iters: a.newton_max_iters,
        max_points: a.max_points,
        eps_stop: a.eps_stop,
        modes: a.modes,
        half_period: a.half_period,
        strict: !a.record_failures,
    };
    config.validate()?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    // profiles are written as they are accepted so a long run leaves partial output
    let mut written: Vec<PathBuf> = Vec::new();
    let mut write_error = None;
    let branch = solver::continue_branch_with(&config, |p| {
        if write_error.is_some() {
            return;
        }
        let path = a.out.join(format!("profile_{:04}.csv", written.len()));
        match p.profile.write_csv(&path) {
            Ok(()) => written.push(path),
            Err(e) => write_error = Some(e),
        }
    });
    for p in &written {
        manifest.output(p);
    }
    let branch = branch?;
    if let Some(e) = write_error {
        return Err(e.into());
    }

    let summary_path = a.out.join("summary.csv");
    let mut w = sink(Some(&summary_path), manifest)?;
    writeln!(w, "index,a,c,nu,gap,residual,h3_norm,eta_fit,sigma_min")?;
    let mut failing = Vec::new();
    for (i, p) in branch.points.iter().enumerate() {
        let fit = diagnostics::fit_decay(p)?;
        let eta_fit = if fit.valid { fit.eta_fit } else { f64::NAN };
        let sigma = if a.skip_sigma_min { f64::NAN } else { diagnostics::linearization_sigma_min(p)? };
        writeln!(
            w,
            "{i},{},{},{},{},{},{},{},{}",
            num(p.amplitude),
            num(p.c()),
            num(p.nu()),
            num(p.gap),
            num(p.residual_norm),
            num(p.h3_norm),
            num(eta_fit),
            num(sigma)
        )?;
        let checks = diagnostics::check_basic(p);
        let identity_residual = diagnostics::identity_residual(p);
        if !checks.all_ok() || !(identity_residual < diagnostics::IDENTITY_TOL) || !(p.amplitude > p.nu()) {
            failing.push(FailedPoint { index: i, amplitude: p.amplitude, checks, identity_residual });
        }
    }
    w.flush()?;

    let ok = failing.is_empty() && !matches!(branch.termination, Termination::Stalled(_));
    let outcome = BranchOutcome { termination: &branch.termination, points: branch.points.len(), failing };
    let outcome_path = a.out.join("branch.json");
    fs::write(&outcome_path, serde_json::to_string_pretty(&outcome)? + "\n")?;
    manifest.output(&outcome_path);
    eprintln!(
        "{} points, termination {:?}, {} failing",
        outcome.points,
        branch.termination,
        outcome.failing.len()
    );
    Ok(ok)
}

fn phase(a: &PhaseArgs, manifest: &mut Manifest) -> Result<bool> {
    let field = reduced::phase_field(a.nu, a.grid)?;
    let trajectories = reduced::phase_trajectories(a.nu)?;
    fs::create_dir_all(&a.out)?;

    let mut w = sink(Some(&a.out.join("field.csv")), manifest)?;
    writeln!(w, "p,q,dp,dq")?;
    for s in field {
        writeln!(w, "{},{},{},{}", num(s.p), num(s.q), num(s.dp), num(s.dq))?;
    }
    w.flush()?;

    let mut w = sink(Some(&a.out.join("trajectories.csv")), manifest)?;
    writeln!(w, "name,t,p,q")?;
    for (name, traj) in &trajectories {
        for (t, s) in traj.times.iter().zip(&traj.states) {
            writeln!(w, "{name},{},{},{}", num(*t), num(s[0]), num(s[1]))?;
        }
    }
    w.flush()?;
    Ok(true)
}

fn coeffs() -> Result<bool> {
    let sols = reduced::solve_coefficients();
    for s in &sols {
        println!("{} = {}", s.name(), s);
    }
    let r = reduced::assemble_reduced(&sols);
    println!("phi'' = {}*phi^2 + {}*phi'^2 + {}*nu*phi", r.phi_sq, r.dphi_sq, r.nu_phi);
    Ok(true)
}

#[derive(Serialize)]
struct WindingSummary {
    eta: f64,
    increase_arc1: f64,
    increase_arc2: f64,
    index: i64,
}

fn winding_run(a: &WindingArgs, manifest: &mut Manifest) -> Result<bool> {
    let summary = winding::total_index_with(a.eta, a.theta_max, a.samples)?;
    let trace = winding::quadrant_trace(a.eta, a.theta_max, a.samples)?;
    let mut w = sink(Some(&a.out), manifest)?;
    writeln!(w, "theta,re_m2,im_m2,re_a,im_a")?;
    for s in &trace.samples {
        writeln!(w, "{},{},{},{},{}", num(s.theta), num(s.re_m2), num(s.im_m2), num(s.re_a), num(s.im_a))?;
    }
    w.flush()?;
    let out = WindingSummary {
        eta: a.eta,
        increase_arc1: summary.increase_arc1,
        increase_arc2: summary.increase_arc2,
        index: summary.index,
    };
    println!("{}", serde_json::to_string(&out)?);
    Ok(summary.index == 2 && trace.re_m2_positive && trace.im_m2_sign_ok)
}

fn load(path: &Path) -> Result<BranchPoint> {
    let profile = WaveProfile::read_csv(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(BranchPoint::from_profile(profile)?)
}

fn verify(a: &VerifyArgs) -> Result<bool> {
    let point = load(&a.profile)?;
    let refined = a.refined.as_deref().map(load).transpose()?;
    if let Some(r) = &refined {
        if r.grid().modes() <= point.grid().modes() {
            bail!("the refined profile must have more modes than the profile");
        }
    }
    let report = diagnostics::report(&point, refined.as_ref(), &ReportOptions { sigma_min: a.sigma_min })?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.ok)
}

fn selftest_run() -> bool {
    let checks = selftest::run();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    checks.iter().all(|c| c.passed)
}
