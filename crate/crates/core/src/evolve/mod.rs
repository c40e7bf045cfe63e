//! Per-Fourier-mode time-domain solver for the linearised two-sided problem,
//! used to recover the analytic growth rate and to check the energy identity.
//!
//! Each side is discretised in the distance `xi = |x2|` with a second-order
//! summation-by-parts operator. The interface and far-end conditions are
//! imposed on the incoming characteristic `c h ± v2` by penalty terms, which
//! makes the semi-discrete energy law `dE/dt = P - D` exact with `D >= 0`.

mod fit;
mod solver;

pub use fit::{growth_rate_fit, GrowthFit, MIN_FIT_SAMPLES};
pub use solver::{
    snapshot_energy, EnergyTerms, InitialData, InterfaceState, ModeState, Solver, VerticalGrid, CFL_LIMIT,
    FAR_FIELD_LIMIT, RESOLUTION_LIMIT,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::physics::ShearState;
use crate::symbol::growth_slope;

/// Exact solution of `g'' = X1^2 eta^2 g` with `g(0) = g0`, `g'(0) = gdot0`.
pub fn front_mode_evolve(state: &ShearState, eta: f64, g0: Complex64, gdot0: Complex64, t: f64) -> Result<Complex64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    state.require_growing()?;
    let rate = growth_slope(state)? * eta.abs();
    if rate == 0.0 {
        return Ok(g0 + gdot0 * t);
    }
    Ok(g0 * (rate * t).cosh() + gdot0 * (rate * t).sinh() / rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionSample {
    pub time: f64,
    /// `ln sqrt(2E)`.
    pub log_norm: f64,
    pub front: Complex64,
    pub energy: f64,
    pub production: f64,
    pub dissipation: f64,
    /// `|dE/dt - P| / (c |eta| E)` with `dE/dt` differenced from the samples.
    pub energy_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRun {
    pub eta: f64,
    pub grid: VerticalGrid,
    pub dt: f64,
    pub steps: usize,
    pub init: InitialData,
    pub samples: Vec<EvolutionSample>,
    /// `X1 |eta|` when the state has a growing root.
    pub analytic_rate: Option<f64>,
    pub resolution_product: f64,
    pub resolved: bool,
    pub far_field_ratio: f64,
    pub far_field_contaminated: bool,
    pub final_state: ModeState,
}

impl EvolutionRun {
    pub fn fit(&self) -> Result<GrowthFit> {
        let t: Vec<f64> = self.samples.iter().map(|s| s.time).collect();
        let y: Vec<f64> = self.samples.iter().map(|s| s.log_norm).collect();
        growth_rate_fit(&t, &y)
    }

    pub fn max_energy_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.energy_residual).fold(0.0, f64::max)
    }
}

/// Fourth-order derivative of uniformly spaced samples.
fn differentiate(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let f = |i: usize| values[i];
    (0..n)
        .map(|i| {
            if n < 5 {
                f64::NAN
            } else if i == 0 {
                (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / (12.0 * h)
            } else if i == 1 {
                (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h)
            } else if i == n - 2 {
                (3.0 * f(n - 1) + 10.0 * f(n - 2) - 18.0 * f(n - 3) + 6.0 * f(n - 4) - f(n - 5)) / (12.0 * h)
            } else if i == n - 1 {
                (25.0 * f(n - 1) - 48.0 * f(n - 2) + 36.0 * f(n - 3) - 16.0 * f(n - 4) + 3.0 * f(n - 5)) / (12.0 * h)
            } else {
                (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h)
            }
        })
        .collect()
}

fn residuals(terms: &[EnergyTerms], h: f64, scale: f64) -> Vec<f64> {
    let energy: Vec<f64> = terms.iter().map(|t| t.energy).collect();
    differentiate(&energy, h)
        .iter()
        .zip(terms)
        .map(|(rate, t)| {
            if t.energy == 0.0 {
                0.0
            } else {
                (rate - t.production).abs() / (scale * t.energy)
            }
        })
        .collect()
}

/// Largest relative defect of `dE/dt = P` over snapshots spaced `dt` apart.
pub fn energy_balance(state: &ShearState, grid: &VerticalGrid, snapshots: &[ModeState], dt: f64) -> Result<f64> {
    if snapshots.len() < 5 {
        return Err(Error::InsufficientData {
            got: snapshots.len(),
            need: 5,
        });
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", "must be > 0"));
    }
    let terms = snapshots
        .iter()
        .map(|s| snapshot_energy(state, grid, s))
        .collect::<Result<Vec<_>>>()?;
    let scale = state.sound_speed() * snapshots[0].eta.abs();
    Ok(residuals(&terms, dt, scale).into_iter().fold(0.0, f64::max))
}

/// Runs the solver to `t_end` with a step no larger than `dt`, sampling every step.
pub fn linearized_solve(
    state: &ShearState,
    eta: f64,
    grid: VerticalGrid,
    dt: f64,
    t_end: f64,
    init: InitialData,
) -> Result<EvolutionRun> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid("t_end", format!("must be finite and > 0, got {t_end}")));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("must be > 0, got {dt}")));
    }
    let steps = (t_end / dt).ceil() as usize;
    let dt_used = t_end / steps as f64;
    let mut solver = Solver::new(state, eta, grid, dt_used.min(dt), init)?;

    let analytic_rate = growth_slope(state).ok().map(|x1| x1 * eta.abs());
    let reference = analytic_rate.unwrap_or(state.sound_speed() * eta.abs());
    let mut terms = Vec::with_capacity(steps + 1);
    let mut fronts = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut far_field_ratio: f64 = 0.0;

    let record = |solver: &Solver, terms: &mut Vec<EnergyTerms>, fronts: &mut Vec<Complex64>, times: &mut Vec<f64>| {
        terms.push(solver.energy_terms());
        fronts.push(solver.front_amp());
        times.push(solver.time());
    };
    record(&solver, &mut terms, &mut fronts, &mut times);
    let log0 = 0.5 * (2.0 * terms[0].energy).ln();
    for step in 1..=steps {
        solver.step();
        record(&solver, &mut terms, &mut fronts, &mut times);
        let e = terms[step].energy;
        let t = solver.time();
        if !e.is_finite() {
            return Err(Error::InstabilityDetected {
                time: t,
                growth: f64::INFINITY,
                allowed: 3.0 * reference * t + 1.0,
            });
        }
        if terms[0].energy > 0.0 {
            let growth = 0.5 * (2.0 * e).ln() - log0;
            let allowed = 3.0 * reference * t + 1.0;
            if growth > allowed {
                return Err(Error::InstabilityDetected { time: t, growth, allowed });
            }
        }
        far_field_ratio = far_field_ratio.max(solver.far_field_ratio());
    }

    let scale = state.sound_speed() * eta.abs();
    let res = residuals(&terms, dt_used, scale);
    let samples = terms
        .iter()
        .zip(&fronts)
        .zip(&times)
        .zip(&res)
        .map(|(((t, &front), &time), &energy_residual)| EvolutionSample {
            time,
            log_norm: 0.5 * (2.0 * t.energy).ln(),
            front,
            energy: t.energy,
            production: t.production,
            dissipation: t.dissipation,
            energy_residual,
        })
        .collect();

    let resolution_product = grid.resolution_product(state, eta);
    Ok(EvolutionRun {
        eta,
        grid,
        dt: dt_used,
        steps,
        init,
        samples,
        analytic_rate,
        resolution_product,
        resolved: resolution_product <= RESOLUTION_LIMIT,
        far_field_ratio,
        far_field_contaminated: far_field_ratio > FAR_FIELD_LIMIT,
        final_state: solver.snapshot(),
    })
}
