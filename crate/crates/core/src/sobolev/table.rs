use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{exp_profile_log_norm_sq, log_sum_exp, make_bump, BandSpectrum};
use crate::error::{invalid, Error, Result};
use crate::modes::build_mode;
use crate::physics::ShearState;
use crate::symbol::{growth_slope, ratio_floor};

/// Largest exponent representable in a linear-domain `f64`.
const LINEAR_LOG_LIMIT: f64 = 709.78;

const MAX_SCAN: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IllposedParams {
    pub j: u32,
    pub k: u32,
    pub t0: f64,
    pub alpha: f64,
    pub norm_constant: f64,
}

impl Default for IllposedParams {
    fn default() -> Self {
        Self {
            j: 3,
            k: 3,
            t0: 1.0,
            alpha: 2.0,
            norm_constant: 1.0,
        }
    }
}

impl IllposedParams {
    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(invalid("k", format!("must be >= 3, got {}", self.k)));
        }
        if self.j < self.k {
            return Err(invalid("j", format!("must be >= k = {}, got {}", self.k, self.j)));
        }
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(invalid("t0", format!("must be finite and > 0, got {}", self.t0)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", format!("must be finite and > 0, got {}", self.alpha)));
        }
        if !(self.norm_constant > 0.0 && self.norm_constant.is_finite()) {
            return Err(invalid("norm_constant", format!("must be finite and > 0, got {}", self.norm_constant)));
        }
        Ok(())
    }
}

/// Natural logs of the unsquared norms of `f`, `h` and `v = (v1, v2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentNorms {
    pub front: f64,
    pub pressure: f64,
    pub velocity: f64,
}

impl ComponentNorms {
    /// `ln(|f| + |h| + |v|)`.
    pub fn log_total(&self) -> f64 {
        log_sum_exp([self.front, self.pressure, self.velocity])
    }
}

/// Logs of `e^{2 X1 eta t}`-weighted band integrals for the three components,
/// with `H^order` weights, returned as logs of unsquared norms.
pub fn band_norms(state: &ShearState, spectrum: &BandSpectrum, order: u32, t: f64) -> Result<ComponentNorms> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    let x1 = growth_slope(state)?;
    let mut front = Vec::with_capacity(spectrum.samples.len());
    let mut pressure = Vec::with_capacity(spectrum.samples.len());
    let mut velocity = Vec::with_capacity(spectrum.samples.len());
    for s in &spectrum.samples {
        let eta = s.eta;
        let base = s.log_weight + 2.0 * s.log_chi + 2.0 * x1 * eta * t;
        let mode = build_mode(state, eta, Complex64::new(1.0, 0.0))?;
        front.push(base + f64::from(order) * (eta * eta).ln_1p());
        let p = [mode.pressure_upper, mode.pressure_lower]
            .iter()
            .map(|pr| exp_profile_log_norm_sq(pr, order, eta))
            .collect::<Result<Vec<_>>>()?;
        pressure.push(base + log_sum_exp(p));
        let v = [mode.v1_upper, mode.v1_lower, mode.v2_upper, mode.v2_lower]
            .iter()
            .map(|pr| exp_profile_log_norm_sq(pr, order, eta))
            .collect::<Result<Vec<_>>>()?;
        velocity.push(base + log_sum_exp(v));
    }
    Ok(ComponentNorms {
        front: 0.5 * log_sum_exp(front),
        pressure: 0.5 * log_sum_exp(pressure),
        velocity: 0.5 * log_sum_exp(velocity),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub band_index: u32,
    /// `ln ||(f, h, v)(0)||_{H^j}` with the norm taken as the sum of the three.
    pub log_norm_initial_hj: f64,
    /// `ln ||(f, h, v)(T0)||_{H^k}`.
    pub log_norm_later_hk: f64,
    /// `ln` of the square root of the front lower bound
    /// `e^{2 X1 n T0} / (1+(n+1)^2)^{j-k+1} * int (1+eta^2)^{j+1} chi^2`.
    pub lower_bound_log_hk: f64,
    /// `log_norm_later_hk - log_norm_initial_hj`.
    pub ratio_log: f64,
    pub exceeds_alpha: bool,
    pub initial: ComponentNorms,
    pub later: ComponentNorms,
    /// Per-component analytic lower bounds, same convention as `lower_bound_log_hk`.
    pub lower_bounds: ComponentNorms,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub front: u64,
    pub pressure: u64,
    pub velocity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IllposednessTable {
    pub params: IllposedParams,
    pub growth_slope: f64,
    pub reports: Vec<NormReport>,
    /// Smallest tabulated band whose later norm reaches `alpha`.
    pub first_exceeding: Option<u32>,
    pub thresholds: Thresholds,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdVariant {
    Front,
    Pressure,
    Velocity,
}

/// `ln 1 + (n+1)^p` as printed in the pressure and velocity inequalities.
fn log_flat_denominator(n: f64, p: u32) -> f64 {
    (f64::from(p) * (n + 1.0).ln()).exp().ln_1p()
}

/// `lhs - rhs` of the sufficiency inequality, in logs.
fn threshold_margin(state: &ShearState, params: &IllposedParams, x1: f64, variant: ThresholdVariant, n: f64) -> f64 {
    let p = params.j - params.k + 1;
    let growth = 2.0 * x1 * n * params.t0;
    let log_ac = 2.0 * (params.alpha * params.norm_constant).ln();
    let c_tilde = ratio_floor(state.mach_floor()).ln();
    match variant {
        ThresholdVariant::Front => growth - f64::from(p) * (n + 1.0).powi(2).ln_1p() - log_ac - 2.0 * n.ln(),
        ThresholdVariant::Pressure => c_tilde + growth - log_flat_denominator(n, p) - log_ac - 2.0 * n.ln(),
        ThresholdVariant::Velocity => {
            2.0 * state.sound_speed().ln() + c_tilde + growth - log_flat_denominator(n, p) - log_ac - n.ln()
        }
    }
}

/// Smallest `n >= 1` satisfying the closed-form sufficiency inequality of `variant`.
pub fn threshold_n(state: &ShearState, params: &IllposedParams, variant: ThresholdVariant) -> Result<u64> {
    params.validate()?;
    let x1 = growth_slope(state)?;
    (1..=MAX_SCAN)
        .find(|&n| threshold_margin(state, params, x1, variant, n as f64) >= 0.0)
        .ok_or_else(|| Error::Consistency(format!("no threshold below n = {MAX_SCAN}")))
}

fn lower_bounds(state: &ShearState, params: &IllposedParams, x1: f64, spectrum: &BandSpectrum) -> ComponentNorms {
    let n = f64::from(spectrum.band_index);
    let p = params.j - params.k + 1;
    let growth = 2.0 * x1 * n * params.t0;
    let moment = spectrum.log_moment(params.j + 1);
    let c_tilde = ratio_floor(state.mach_floor()).ln();
    ComponentNorms {
        front: 0.5 * (growth - f64::from(p) * (n + 1.0).powi(2).ln_1p() + moment),
        pressure: 0.5 * (c_tilde + growth - log_flat_denominator(n, p) + moment),
        velocity: 0.5 * (2.0 * state.sound_speed().ln() + c_tilde + growth - log_flat_denominator(n, p) + n.ln() + moment),
    }
}

/// Norm reports for each band plus the thresholds of all three variants.
pub fn illposedness_table(state: &ShearState, params: &IllposedParams, bands: &[u32]) -> Result<IllposednessTable> {
    params.validate()?;
    let x1 = growth_slope(state)?;
    if bands.is_empty() {
        return Err(invalid("bands", "must not be empty"));
    }
    let mut warnings = Vec::new();
    let mut reports = Vec::with_capacity(bands.len());
    for &n in bands {
        let spectrum = make_bump(n, params.j, params.norm_constant)?;
        let exponent = 2.0 * x1 * f64::from(n) * params.t0;
        if exponent > LINEAR_LOG_LIMIT {
            warnings.push(format!(
                "n = {n}: e^(2 X1 n T0) = e^{exponent:.3} overflows f64; values are kept as logarithms"
            ));
        }
        let initial = band_norms(state, &spectrum, params.j, 0.0)?;
        let later = band_norms(state, &spectrum, params.k, params.t0)?;
        let bounds = lower_bounds(state, params, x1, &spectrum);
        let log_initial = initial.log_total();
        let log_later = later.log_total();
        reports.push(NormReport {
            band_index: n,
            log_norm_initial_hj: log_initial,
            log_norm_later_hk: log_later,
            lower_bound_log_hk: bounds.front,
            ratio_log: log_later - log_initial,
            exceeds_alpha: log_later >= params.alpha.ln(),
            initial,
            later,
            lower_bounds: bounds,
        });
    }
    let first_exceeding = reports.iter().find(|r| r.exceeds_alpha).map(|r| r.band_index);
    let thresholds = Thresholds {
        front: threshold_n(state, params, ThresholdVariant::Front)?,
        pressure: threshold_n(state, params, ThresholdVariant::Pressure)?,
        velocity: threshold_n(state, params, ThresholdVariant::Velocity)?,
    };
    Ok(IllposednessTable {
        params: *params,
        growth_slope: x1,
        reports,
        first_exceeding,
        thresholds,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sobolev::{exp_profile_norm_sq, gauss_legendre};

    fn unit() -> ShearState {
        ShearState::nondimensional(1.0).unwrap()
    }

    /// Independent scan of the front inequality in linear arithmetic.
    fn front_threshold_linear(x1: f64, j: u32, k: u32, t0: f64, alpha: f64, cbar: f64) -> u64 {
        (1u64..)
            .find(|&n| {
                let n = n as f64;
                (2.0 * x1 * n * t0).exp() / (1.0 + (n + 1.0).powi(2)).powi((j - k + 1) as i32)
                    >= alpha * alpha * cbar * cbar * n * n
            })
            .unwrap()
    }

    #[test]
    fn front_threshold_example() {
        let params = IllposedParams::default();
        assert_eq!(threshold_n(&unit(), &params, ThresholdVariant::Front).unwrap(), 12);
        let x1 = growth_slope(&unit()).unwrap();
        assert_eq!(front_threshold_linear(x1, 3, 3, 1.0, 2.0, 1.0), 12);
    }

    #[test]
    fn threshold_limits() {
        let s = unit();
        for variant in [ThresholdVariant::Front, ThresholdVariant::Pressure, ThresholdVariant::Velocity] {
            let tiny = IllposedParams {
                alpha: 1e-300,
                ..Default::default()
            };
            assert_eq!(threshold_n(&s, &tiny, variant).unwrap(), 1);
            let base = IllposedParams::default();
            let doubled = IllposedParams { t0: 2.0, ..base };
            assert!(threshold_n(&s, &doubled, variant).unwrap() <= threshold_n(&s, &base, variant).unwrap());
        }
    }

    #[test]
    fn threshold_matches_linear_scan_on_grid() {
        for &m in &[0.5, 1.0, 1.3] {
            for &(j, k) in &[(3, 3), (4, 3), (5, 4)] {
                for &t0 in &[0.5, 1.0, 3.0] {
                    let s = ShearState::from_mach(1.0, m, 0.1).unwrap();
                    let params = IllposedParams {
                        j,
                        k,
                        t0,
                        ..Default::default()
                    };
                    let x1 = growth_slope(&s).unwrap();
                    assert_eq!(
                        threshold_n(&s, &params, ThresholdVariant::Front).unwrap(),
                        front_threshold_linear(x1, j, k, t0, 2.0, 1.0)
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = unit();
        let bad = [
            IllposedParams { j: 2, k: 2, ..Default::default() },
            IllposedParams { j: 3, k: 4, ..Default::default() },
            IllposedParams { t0: 0.0, ..Default::default() },
            IllposedParams { alpha: -1.0, ..Default::default() },
            IllposedParams { norm_constant: 0.0, ..Default::default() },
        ];
        for p in bad {
            assert!(threshold_n(&s, &p, ThresholdVariant::Front).is_err());
            assert!(illposedness_table(&s, &p, &[1]).is_err());
        }
        let sup = ShearState::nondimensional(1.6).unwrap();
        assert!(illposedness_table(&sup, &IllposedParams::default(), &[1]).is_err());
        assert!(illposedness_table(&s, &IllposedParams::default(), &[]).is_err());
    }

    /// Linear-domain oracle: direct sums with `chi` evaluated point-wise.
    fn linear_norms(state: &ShearState, n: u32, order: u32, t: f64) -> [f64; 3] {
        let spectrum = make_bump(n, 3, 1.0).unwrap();
        let x1 = growth_slope(state).unwrap();
        let mut sums = [0.0; 3];
        for (eta, w) in gauss_legendre(64, f64::from(n), f64::from(n) + 1.0).unwrap() {
            let chi = spectrum.chi_at(eta);
            let base = w * chi * chi * (2.0 * x1 * eta * t).exp();
            let mode = build_mode(state, eta, Complex64::new(1.0, 0.0)).unwrap();
            let nsq = |p| exp_profile_norm_sq(p, order, eta).unwrap();
            sums[0] += base * (1.0 + eta * eta).powi(order as i32);
            sums[1] += base * (nsq(&mode.pressure_upper) + nsq(&mode.pressure_lower));
            sums[2] += base
                * (nsq(&mode.v1_upper) + nsq(&mode.v1_lower) + nsq(&mode.v2_upper) + nsq(&mode.v2_lower));
        }
        sums.map(f64::sqrt)
    }

    #[test]
    fn log_domain_matches_linear_domain() {
        let s = unit();
        for n in 1..=20 {
            let spectrum = make_bump(n, 3, 1.0).unwrap();
            for &t in &[0.0, 1.0] {
                let log = band_norms(&s, &spectrum, 3, t).unwrap();
                let lin = linear_norms(&s, n, 3, t);
                for (l, v) in [log.front, log.pressure, log.velocity].iter().zip(lin) {
                    assert!((l.exp() - v).abs() <= 1e-10 * v, "n={n} t={t}");
                }
            }
        }
    }

    #[test]
    fn table_at_unit_mach() {
        let s = unit();
        let params = IllposedParams::default();
        let bands: Vec<u32> = (1..=64).collect();
        let table = illposedness_table(&s, &params, &bands).unwrap();
        let rho = ((1.0 + (5f64.sqrt() - 2.0)) / 2.0).sqrt();
        let q = 1.0 / (5f64.sqrt() - 1.0).sqrt();
        assert_eq!(table.thresholds.front, 12);
        assert!(table.warnings.is_empty());
        for w in table.reports.windows(2) {
            assert!(w[1].ratio_log > w[0].ratio_log);
        }
        for r in &table.reports {
            assert!(r.log_norm_later_hk >= r.lower_bound_log_hk - 1e-6);
            assert!(r.later.front >= r.lower_bounds.front - 1e-6);
            assert!(r.later.pressure >= r.lower_bounds.pressure - 1e-6);
            assert!(r.later.velocity >= r.lower_bounds.velocity - 1e-6);
            let n = f64::from(r.band_index);
            assert!(n * r.initial.front.exp() <= 1.0);
            assert!(n * r.initial.pressure.exp() <= 2.0 * (4.0 / rho).sqrt());
            assert!(n * r.initial.velocity.exp() <= 2.0 * q * (8.0 / rho).sqrt());
        }
        let first = table.first_exceeding.unwrap();
        assert!(first <= table.thresholds.front as u32);
    }

    #[test]
    fn overflow_only_warns() {
        let s = unit();
        let table = illposedness_table(&s, &IllposedParams::default(), &[800, 1000]).unwrap();
        assert_eq!(table.warnings.len(), 2);
        assert!(table.reports.iter().all(|r| r.log_norm_later_hk.is_finite()));
        assert!(table.reports[1].ratio_log > table.reports[0].ratio_log);
    }
}
