use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{invalid, Result};

/// Gauss-Legendre nodes and weights mapped onto `[a, b]`, in ascending node order.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let degree = NonZeroUsize::new(order).ok_or_else(|| invalid("order", "must be >= 1"))?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid("interval", format!("need finite a < b, got [{a}, {b}]")));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut pairs: Vec<(f64, f64)> = GaussLegendre::new(degree)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pairs)
}

/// `ln(sum exp(x_i))`; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let peak = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY || peak.is_nan() {
        return peak;
    }
    if peak == f64::INFINITY {
        return f64::INFINITY;
    }
    peak + terms.iter().map(|x| (x - peak).exp()).sum::<f64>().ln()
}
