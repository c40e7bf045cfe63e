//! Piecewise Sobolev norms of exponential profiles, band-limited spectra
//! `chi_n` and the ill-posedness tables built from them.
//!
//! Everything that can overflow is carried as a natural logarithm.

mod quadrature;
mod table;

pub use quadrature::{gauss_legendre, log_sum_exp};
pub use table::{
    band_norms, illposedness_table, threshold_n, ComponentNorms, IllposedParams, IllposednessTable, NormReport,
    ThresholdVariant, Thresholds,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::modes::ExpProfile;

/// Default Gauss-Legendre order per band.
pub const BAND_ORDER: usize = 64;

/// Accepted relative error of the band normalisation against a doubled-order rule.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

fn check_profile(profile: &ExpProfile) -> Result<()> {
    if !(profile.decay_rate.re > 0.0) {
        return Err(invalid("decay_rate", format!("real part must be > 0, got {}", profile.decay_rate)));
    }
    Ok(())
}

/// `sum_{s=0}^{j} (1+eta^2)^{j-s} |A|^2 |lambda|^{2s} / (2 Re lambda)`: the squared
/// `H^j` norm over one half-line of `A exp(-lambda |x2|)` at horizontal frequency `eta`.
pub fn exp_profile_norm_sq(profile: &ExpProfile, j: u32, eta: f64) -> Result<f64> {
    check_profile(profile)?;
    let weight = 1.0 + eta * eta;
    let rate_sq = profile.decay_rate.norm_sqr();
    let sum: f64 = (0..=j)
        .map(|s| weight.powi((j - s) as i32) * rate_sq.powi(s as i32))
        .sum();
    Ok(profile.amplitude.norm_sqr() * sum / (2.0 * profile.decay_rate.re))
}

/// Logarithm of [`exp_profile_norm_sq`], accumulated with log-sum-exp.
pub fn exp_profile_log_norm_sq(profile: &ExpProfile, j: u32, eta: f64) -> Result<f64> {
    check_profile(profile)?;
    let log_weight = (eta * eta).ln_1p();
    let log_rate = profile.decay_rate.norm_sqr().ln();
    let log_sum = log_sum_exp((0..=j).map(|s| f64::from(j - s) * log_weight + f64::from(s) * log_rate));
    Ok(profile.amplitude.norm_sqr().ln() + log_sum - (2.0 * profile.decay_rate.re).ln())
}

/// One quadrature node of a band: `ln w` and `ln chi(eta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSample {
    pub eta: f64,
    pub log_weight: f64,
    pub log_chi: f64,
}

/// Smooth real weight `chi_n` supported in `(n, n+1)`, normalised so that
/// `int (1+eta^2)^{j+1} chi_n^2 = 1/(C_j^2 n^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSpectrum {
    pub band_index: u32,
    pub regularity: u32,
    pub norm_constant: f64,
    /// `ln K` with `chi_n = K exp(-1/(1-s^2))`.
    pub log_scale: f64,
    pub samples: Vec<BandSample>,
}

/// `-1/(1-s^2)` with `s` the band coordinate mapped to `(-1, 1)`.
fn log_bump_shape(n: u32, eta: f64) -> Option<f64> {
    let s = 2.0 * (eta - f64::from(n)) - 1.0;
    (s.abs() < 1.0).then(|| -1.0 / (1.0 - s * s))
}

fn log_weight_integral(n: u32, j: u32, log_scale: f64, rule: &[(f64, f64)]) -> f64 {
    log_sum_exp(rule.iter().filter_map(|&(eta, w)| {
        log_bump_shape(n, eta)
            .map(|shape| w.ln() + f64::from(j + 1) * (eta * eta).ln_1p() + 2.0 * (log_scale + shape))
    }))
}

impl BandSpectrum {
    pub fn chi_at(&self, eta: f64) -> f64 {
        self.log_chi_at(eta).map_or(0.0, f64::exp)
    }

    /// `ln chi(eta)`, `None` outside the open band.
    pub fn log_chi_at(&self, eta: f64) -> Option<f64> {
        log_bump_shape(self.band_index, eta).map(|shape| self.log_scale + shape)
    }

    /// `ln int extra(eta) chi^2` with `ln extra` supplied per sample.
    pub fn log_integral<F: FnMut(f64) -> f64>(&self, mut log_extra: F) -> f64 {
        log_sum_exp(
            self.samples
                .iter()
                .map(|s| s.log_weight + 2.0 * s.log_chi + log_extra(s.eta)),
        )
    }

    /// `ln int (1+eta^2)^p chi^2`.
    pub fn log_moment(&self, p: u32) -> f64 {
        self.log_integral(|eta| f64::from(p) * (eta * eta).ln_1p())
    }

    /// Target of the normalisation, `ln 1/(C^2 n^2)`.
    pub fn log_target(&self) -> f64 {
        -2.0 * (self.norm_constant * f64::from(self.band_index)).ln()
    }
}

/// [`make_bump_with_order`] at [`BAND_ORDER`].
pub fn make_bump(n: u32, j: u32, norm_constant: f64) -> Result<BandSpectrum> {
    make_bump_with_order(n, j, norm_constant, BAND_ORDER)
}

/// Samples the bump on a Gauss-Legendre rule of `order` nodes, rescales it to
/// the band normalisation and checks that a rule of twice the order agrees.
pub fn make_bump_with_order(n: u32, j: u32, norm_constant: f64, order: usize) -> Result<BandSpectrum> {
    if n < 1 {
        return Err(invalid("band_index", "must be >= 1"));
    }
    if j < 3 {
        return Err(invalid("regularity", format!("must be >= 3, got {j}")));
    }
    if !(norm_constant > 0.0 && norm_constant.is_finite()) {
        return Err(invalid("norm_constant", format!("must be finite and > 0, got {norm_constant}")));
    }
    if order < 2 {
        return Err(invalid("order", "must be >= 2"));
    }
    let (lo, hi) = (f64::from(n), f64::from(n) + 1.0);
    let rule = gauss_legendre(order, lo, hi)?;
    let target = -2.0 * (norm_constant * f64::from(n)).ln();
    let log_scale = 0.5 * (target - log_weight_integral(n, j, 0.0, &rule));

    let samples = rule
        .iter()
        .filter_map(|&(eta, w)| {
            log_bump_shape(n, eta).map(|shape| BandSample {
                eta,
                log_weight: w.ln(),
                log_chi: log_scale + shape,
            })
        })
        .collect();

    let check_rule = gauss_legendre(2 * order, lo, hi)?;
    let check = log_weight_integral(n, j, log_scale, &check_rule);
    let residual = (check - target).exp_m1().abs();
    if !(residual <= NORMALIZATION_TOLERANCE) {
        return Err(Error::QuadratureFailure {
            residual,
            tolerance: NORMALIZATION_TOLERANCE,
        });
    }

    Ok(BandSpectrum {
        band_index: n,
        regularity: j,
        norm_constant,
        log_scale,
        samples,
    })
}
