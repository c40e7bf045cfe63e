//! Fast invariant suite behind the `verify` subcommand. Writes nothing to disk.

use vortex_sheet::evolve::{linearized_solve, InitialData, VerticalGrid};
use vortex_sheet::modes::mode_residual;
use vortex_sheet::physics::{jacobian_lower_bound, FlatteningProfile, ShearState};
use vortex_sheet::sobolev::{illposedness_table, make_bump, threshold_n, ThresholdVariant};
use vortex_sheet::symbol::{
    cartesian_root_data, quartic_residual, ratio_floor, root_atlas, simple_root_factor, symbol_original,
    symbol_reduced, velocity_coef_bounds, vertical_roots, Frequency,
};
use vortex_sheet::Complex64;

use crate::commands::growing_mode;
use crate::config::RunConfig;
use crate::error::CliError;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn state(c: f64, m: f64) -> Result<ShearState, String> {
    ShearState::from_mach(c, m, 0.1).map_err(err)
}

fn threshold(config: &RunConfig) -> Check {
    let c = config.sound_speed;
    let (mut lo, mut hi) = (None, None);
    for i in 0..=190 {
        let m = 0.1 + 0.01 * f64::from(i);
        let x1_sq = root_atlas(&state(c, m)?).x1_sq;
        if x1_sq > 0.0 {
            lo = Some(m);
        } else if hi.is_none() {
            hi = Some(m);
        }
    }
    let (lo, hi) = (lo.ok_or("no growing state")?, hi.ok_or("no neutral state")?);
    let sqrt2 = std::f64::consts::SQRT_2;
    ensure(lo < sqrt2 && sqrt2 < hi && hi - lo < 0.0100001, || {
        format!("bracket [{lo}, {hi}] misses sqrt 2")
    })?;
    Ok(format!("X1^2 changes sign in [{lo:.2}, {hi:.2}]"))
}

fn roots() -> Check {
    let s = state(1.0, 1.0)?;
    let atlas = root_atlas(&s);
    let exact = 5f64.sqrt() - 2.0;
    ensure((atlas.x1_sq - exact).abs() <= 1e-14, || format!("X1^2 = {}", atlas.x1_sq))?;
    ensure(quartic_residual(&s, atlas.x1_sq).abs() <= 1e-12, || "quartic residual".into())?;
    let x1 = atlas.x1_sq.sqrt();
    for &eta in &[1.0, 10.0, 100.0] {
        let r = vertical_roots(&s, &Frequency::real(x1 * eta, eta)).map_err(err)?;
        let prod = (r.product() - eta * eta).norm() / (eta * eta);
        let modulus = (r.mu_plus.norm() - eta).abs().max((r.mu_minus.norm() - eta).abs()) / eta;
        ensure(prod <= 1e-12 && modulus <= 1e-12, || format!("eta={eta}: {prod:e} {modulus:e}"))?;
    }
    Ok("X1^2 = sqrt5 - 2, mu+ mu- = eta^2, |mu| = eta".into())
}

fn symbol() -> Check {
    let mut worst: f64 = 0.0;
    for &m in &[0.2, 0.5, 1.0, 1.3] {
        let s = state(1.0, m)?;
        let x1 = root_atlas(&s).x1_sq.sqrt();
        for &eta in &[1.0, 10.0] {
            let at = Frequency::real(x1 * eta, eta);
            let scale = eta * eta;
            let z = symbol_reduced(&s, &at).map_err(err)?.norm() / scale;
            let z0 = symbol_original(&s, &at).map_err(err)?.norm() / (scale * eta);
            ensure(z <= 1e-12 && z0 <= 1e-10, || format!("M={m} eta={eta}: |Sigma| {z:e} {z0:e}"))?;
            let tau = Complex64::new(x1 * eta * 1.004, 0.002 * eta);
            let near = Frequency::new(tau, eta);
            let f = simple_root_factor(&s, &near).map_err(err)?;
            let lhs = symbol_reduced(&s, &near).map_err(err)?;
            let rel = (lhs - (tau - x1 * eta) * f.factor).norm() / lhs.norm();
            ensure(rel <= 1e-9, || format!("M={m} eta={eta}: factorisation off by {rel:e}"))?;
            worst = worst.max(z);
        }
    }
    Ok(format!("symbol vanishes at the root ({worst:.1e}), factorisation holds"))
}

fn bounds() -> Check {
    let floor = ratio_floor(0.1);
    for &m in &[0.1, 0.5, 1.0, 1.3, 1.41] {
        let s = state(1.0, m)?;
        let cart = cartesian_root_data(&s, 1.0).map_err(err)?;
        ensure(cart.ratio_sq >= floor * (1.0 - 1e-12), || format!("M={m}: ratio {} < {floor}", cart.ratio_sq))?;
        velocity_coef_bounds(&s).map_err(err)?;
    }
    Ok(format!("root ratio >= {floor:.6e}, velocity coefficient inside its bounds"))
}

fn modes() -> Check {
    let mut worst: f64 = 0.0;
    for &m in &[0.2, 0.5, 1.0, 1.3] {
        let s = state(1.0, m)?;
        for &eta in &[1.0, 10.0, 100.0] {
            let mode = growing_mode(&s, eta).map_err(err)?;
            let r = mode_residual(&s, &mode).max();
            ensure(r <= 1e-10, || format!("M={m} eta={eta}: residual {r:e}"))?;
            worst = worst.max(r);
        }
    }
    Ok(format!("normal-mode residuals <= {worst:.1e}"))
}

fn sobolev(config: &RunConfig) -> Check {
    for n in [1, 10, 1000] {
        make_bump(n, 3, 1.0).map_err(err)?;
    }
    let s = state(1.0, 1.0)?;
    let params = vortex_sheet::sobolev::IllposedParams::default();
    let front = threshold_n(&s, &params, ThresholdVariant::Front).map_err(err)?;
    ensure(front == 12, || format!("front threshold {front}, expected 12"))?;
    let table = illposedness_table(&s, &params, &[1, 5, 12, 50]).map_err(err)?;
    for r in &table.reports {
        ensure(r.lower_bound_log_hk <= r.later.front + 1e-9, || {
            format!("n={}: lower bound {} above the front norm {}", r.band_index, r.lower_bound_log_hk, r.later.front)
        })?;
        ensure(r.log_norm_initial_hj <= (1.0 / f64::from(r.band_index)).ln() + 2.0, || {
            format!("n={}: initial norm {} not small", r.band_index, r.log_norm_initial_hj)
        })?;
    }
    if let Ok(cfg_state) = config.state() {
        if cfg_state.require_growing().is_ok() {
            threshold_n(&cfg_state, &config.illposed_params(), ThresholdVariant::Front).map_err(err)?;
        }
    }
    Ok(format!("bumps normalised, front threshold {front}, lower bounds hold"))
}

fn evolve() -> Check {
    let s = state(1.0, 1.0)?;
    let grid = VerticalGrid::new(40.0, 512).map_err(err)?;
    let run = linearized_solve(&s, 1.0, grid, grid.max_step(&s), 3.0, InitialData::AnalyticMode).map_err(err)?;
    let rate = run.analytic_rate.ok_or("no analytic rate")?;
    let slope = run.fit().map_err(err)?.slope;
    let rel = (slope - rate).abs() / rate;
    ensure(rel <= 0.02, || format!("slope {slope} vs {rate}"))?;
    let res = run.max_energy_residual();
    ensure(res <= 1e-4, || format!("energy residual {res:e}"))?;
    Ok(format!("growth rate within {rel:.1e}, energy residual {res:.1e}"))
}

fn geometry() -> Check {
    let profile = FlatteningProfile::with_supremum(1.0).map_err(err)?;
    let extent = 1.2 * profile.outer_radius() * profile.vertical_scale();
    let samples: Vec<f64> = (0..=2000).map(|i| -extent + 2.0 * extent * f64::from(i) / 2000.0).collect();
    let mut lowest = f64::INFINITY;
    for i in 0..=40 {
        let f = -2.0 + 0.1 * f64::from(i);
        lowest = lowest.min(jacobian_lower_bound(&profile, f, &samples).map_err(err)?);
    }
    ensure(lowest >= 1.0 / 3.0, || format!("Jacobian {lowest}"))?;
    Ok(format!("flattening Jacobian >= {lowest:.4}"))
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let checks: [(&str, Check); 8] = [
        ("threshold", threshold(config)),
        ("roots", roots()),
        ("symbol", symbol()),
        ("bounds", bounds()),
        ("modes", modes()),
        ("sobolev", sobolev(config)),
        ("evolve", evolve()),
        ("geometry", geometry()),
    ];
    let total = checks.len();
    let mut failed = 0;
    for (name, outcome) in checks {
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed, total });
    }
    Ok(())
}
