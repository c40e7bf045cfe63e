use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples_used: usize,
}

/// Least-squares line through `(t, log_norm)` over the final two thirds of the series.
pub fn growth_rate_fit(times: &[f64], log_norms: &[f64]) -> Result<GrowthFit> {
    let n = times.len().min(log_norms.len());
    if n < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            got: n,
            need: MIN_FIT_SAMPLES,
        });
    }
    let start = n / 3;
    let t = &times[start..n];
    let y = &log_norms[start..n];
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Consistency("log-norm series contains non-finite values".into()));
    }
    let m = t.len() as f64;
    let t_mean = t.iter().sum::<f64>() / m;
    let y_mean = y.iter().sum::<f64>() / m;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for (ti, yi) in t.iter().zip(y) {
        let (dt, dy) = (ti - t_mean, yi - y_mean);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return Err(Error::Consistency("fit window has zero time span".into()));
    }
    let slope = sty / stt;
    let intercept = y_mean - slope * t_mean;
    let ss_res: f64 = t
        .iter()
        .zip(y)
        .map(|(ti, yi)| (yi - intercept - slope * ti).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(GrowthFit {
        slope,
        intercept,
        r_squared,
        samples_used: t.len(),
    })
}
