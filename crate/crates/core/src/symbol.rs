//! Vertical decay roots, the interface symbol and its growing root.
//!
//! For a frequency `(tau, eta)` the pressure profile decays like
//! `exp(-mu^+ x2)` above and `exp(mu^- x2)` below the interface, where
//! `c^2 (mu^±)^2 = (tau ± i v eta)^2 + c^2 eta^2`. The symbol
//! `tau^2 - v^2 eta^2 - 2 i v eta tau (mu^+ - mu^-)/(mu^+ + mu^-)` reduces to
//! `c^2 (mu^+ mu^- - eta^2)`, whose only zero with `Re tau > 0` is
//! `tau = X1 |eta|` when `M < sqrt 2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::physics::ShearState;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Point `(tau, eta)` of the frequency set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub tau: Complex64,
    pub eta: f64,
}

impl Frequency {
    pub fn new(tau: Complex64, eta: f64) -> Self {
        Self { tau, eta }
    }

    pub fn real(tau: f64, eta: f64) -> Self {
        Self::new(Complex64::new(tau, 0.0), eta)
    }

    /// `Re tau > 0`; boundary points are representable but not admissible.
    pub fn is_admissible(&self) -> bool {
        self.tau.re > 0.0 && self.eta.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalRootPair {
    pub mu_plus: Complex64,
    pub mu_minus: Complex64,
}

impl VerticalRootPair {
    pub fn product(&self) -> Complex64 {
        self.mu_plus * self.mu_minus
    }

    pub fn difference(&self) -> Complex64 {
        self.mu_plus - self.mu_minus
    }

    pub fn sum(&self) -> Complex64 {
        self.mu_plus + self.mu_minus
    }
}

/// Right-hand sides `(tau ± i v eta)^2 / c^2 + eta^2` of the two root equations.
pub fn root_radicands(state: &ShearState, freq: &Frequency) -> (Complex64, Complex64) {
    let c2 = state.sound_speed().powi(2);
    let shift = I * state.shear_velocity() * freq.eta;
    let eta2 = freq.eta * freq.eta;
    let plus = (freq.tau + shift).powi(2) / c2 + eta2;
    let minus = (freq.tau - shift).powi(2) / c2 + eta2;
    (plus, minus)
}

fn principal_root(radicand: Complex64) -> Result<Complex64> {
    let root = radicand.sqrt();
    if root.re > 0.0 {
        Ok(root)
    } else {
        Err(Error::DegenerateBranch {
            re: radicand.re,
            im: radicand.im,
        })
    }
}

/// Principal roots `mu^±` (positive real part).
pub fn vertical_roots(state: &ShearState, freq: &Frequency) -> Result<VerticalRootPair> {
    let (plus, minus) = root_radicands(state, freq);
    Ok(VerticalRootPair {
        mu_plus: principal_root(plus)?,
        mu_minus: principal_root(minus)?,
    })
}

/// Symbol in its original form.
pub fn symbol_original(state: &ShearState, freq: &Frequency) -> Result<Complex64> {
    let roots = vertical_roots(state, freq)?;
    let sum = roots.sum();
    if sum.norm() == 0.0 {
        return Err(Error::DegenerateBranch { re: 0.0, im: 0.0 });
    }
    let v = state.shear_velocity();
    let tau = freq.tau;
    let eta = freq.eta;
    Ok(tau * tau - v * v * eta * eta - 2.0 * I * v * eta * tau * roots.difference() / sum)
}

/// Symbol in the reduced form `c^2 (mu^+ mu^- - eta^2)`.
pub fn symbol_reduced(state: &ShearState, freq: &Frequency) -> Result<Complex64> {
    let roots = vertical_roots(state, freq)?;
    Ok(state.sound_speed().powi(2) * (roots.product() - freq.eta * freq.eta))
}

/// Roots of the quadratic in `X^2` whose positive member gives the growth slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootAtlas {
    pub x1_sq: f64,
    pub x2_sq: f64,
    /// `sqrt(-X2^2)`; `X2 = i Y2`.
    pub y2: f64,
    /// `sqrt(X1^2)` when `X1^2 > 0`.
    pub growth_slope: Option<f64>,
}

/// Closed-form roots for any state.
pub fn root_atlas(state: &ShearState) -> RootAtlas {
    let c2 = state.sound_speed().powi(2);
    let v2 = state.shear_velocity().powi(2);
    let disc = (c2 * c2 + 4.0 * c2 * v2).sqrt();
    // rationalised form of -v^2 - c^2 + disc; exact sign at the threshold
    let x1_sq = v2 * (2.0 * c2 - v2) / (disc + v2 + c2);
    let x2_sq = -v2 - c2 - disc;
    RootAtlas {
        x1_sq,
        x2_sq,
        y2: (-x2_sq).sqrt(),
        growth_slope: (x1_sq > 0.0).then(|| x1_sq.sqrt()),
    }
}

/// Like [`root_atlas`] but fails when there is no growing root.
pub fn quartic_roots(state: &ShearState) -> Result<RootAtlas> {
    let atlas = root_atlas(state);
    if atlas.x1_sq <= 0.0 {
        return Err(Error::NoGrowingRoot {
            mach: state.mach(),
            x1_sq: atlas.x1_sq,
        });
    }
    Ok(atlas)
}

/// Growth slope `X1`, the growing root being `tau = X1 |eta|`.
pub fn growth_slope(state: &ShearState) -> Result<f64> {
    quartic_roots(state).map(|atlas| atlas.x1_sq.sqrt())
}

/// Coefficients `(1, 2(v^2 + c^2), v^4 - 2 c^2 v^2)` of the quadratic in `X^2`.
pub fn quartic_coefficients(state: &ShearState) -> [f64; 3] {
    let c2 = state.sound_speed().powi(2);
    let v2 = state.shear_velocity().powi(2);
    [1.0, 2.0 * (v2 + c2), v2 * v2 - 2.0 * c2 * v2]
}

/// Residual of the quadratic at `X^2 = x_sq`, relative to the largest coefficient.
pub fn quartic_residual(state: &ShearState, x_sq: f64) -> f64 {
    let [a, b, c] = quartic_coefficients(state);
    let scale = a.abs().max(b.abs()).max(c.abs());
    (a * x_sq * x_sq + b * x_sq + c).abs() / scale
}

/// `d phi / dX` for `phi(X) = mu~^+ mu~^- - 1`, `X = tau / eta`, `mu~ = mu / eta`.
pub fn phi_derivative(state: &ShearState, x: Complex64) -> Result<Complex64> {
    let c = state.sound_speed();
    let v = state.shear_velocity();
    let roots = vertical_roots(state, &Frequency::new(x, 1.0))?;
    let c2 = c * c;
    Ok(2.0 * x * (x * x + v * v + c2) / (c2 * c2 * roots.product()))
}

/// Factorisation `Sigma = (tau - X1 |eta|) F` near the growing root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootFactor {
    pub factor: Complex64,
    /// `F` at the root itself, `c^2 |eta| phi'(X1)`.
    pub at_root: Complex64,
    /// Half of `|F|` at the root; `|F|` stays above it on the neighbourhood.
    pub floor: f64,
}

/// Relative radius of the neighbourhood accepted by [`simple_root_factor`].
pub const ROOT_NEIGHBORHOOD: f64 = 0.01;

/// Smooth factor `F` with `Sigma_reduced = (tau - X1 |eta|) F`.
///
/// Uses `(mu^+ mu^-)^2 - eta^4 = eta^4 (X^2 - X1^2)(X^2 - X2^2) / c^4`, so
/// `F = eta^3 (X + X1)(X^2 - X2^2) / (c^2 (mu^+ mu^- + eta^2))` with no
/// cancellation at the root.
pub fn simple_root_factor(state: &ShearState, freq: &Frequency) -> Result<RootFactor> {
    if freq.eta == 0.0 {
        return Err(Error::DegenerateMode);
    }
    let atlas = quartic_roots(state)?;
    let x1 = atlas.x1_sq.sqrt();
    let eta = freq.eta.abs();
    let root_tau = x1 * eta;
    if (freq.tau - root_tau).norm() > ROOT_NEIGHBORHOOD * eta {
        return Err(Error::OutsideNeighborhood {
            re: freq.tau.re,
            im: freq.tau.im,
        });
    }
    let c2 = state.sound_speed().powi(2);
    let x = freq.tau / eta;
    let roots = vertical_roots(state, freq)?;
    let factor = eta.powi(3) * (x + x1) * (x * x - atlas.x2_sq) / (c2 * (roots.product() + eta * eta));
    let at_root = c2 * eta * phi_derivative(state, Complex64::new(x1, 0.0))?;
    let floor = 0.5 * at_root.norm();
    if factor.norm() < floor {
        return Err(Error::Consistency(format!(
            "root factor {} fell below floor {floor}",
            factor.norm()
        )));
    }
    Ok(RootFactor {
        factor,
        at_root,
        floor,
    })
}

/// Cartesian data of `(mu^+)^2 = a + i b` at the growing root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianRootData {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    /// `|(mu^+ - mu^-) / mu^+|^2 = 2 (r - a) / r`.
    pub ratio_sq: f64,
}

pub fn cartesian_root_data(state: &ShearState, eta: f64) -> Result<CartesianRootData> {
    state.require_growing()?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid("eta", format!("must be > 0, got {eta}")));
    }
    let m = state.mach();
    let c2 = state.sound_speed().powi(2);
    let x1 = growth_slope(state)?;
    let eta2 = eta * eta;
    let a = ((1.0 + 4.0 * m * m).sqrt() - 2.0 * m * m) * eta2;
    let b = 2.0 * x1 * state.shear_velocity() / c2 * eta2;
    let r = a.hypot(b);
    Ok(CartesianRootData {
        a,
        b,
        r,
        ratio_sq: 2.0 * (r - a) / r,
    })
}

/// Lower bound `2 - 2(sqrt(1 + 4 eps0^2) - 2 eps0^2)` of the squared root ratio.
pub fn ratio_floor(mach_floor: f64) -> f64 {
    let e2 = mach_floor * mach_floor;
    2.0 - 2.0 * ((1.0 + 4.0 * e2).sqrt() - 2.0 * e2)
}

/// Bounds on `|i eta / (tau + i v eta)|` at the growing root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityCoefBounds {
    pub lower: f64,
    pub upper: f64,
    pub value: f64,
    /// `|mu^+ / (tau + i v eta)|`, equal to `value` since `|mu^+| = eta`.
    pub mu_ratio: f64,
}

pub fn velocity_coef_bounds(state: &ShearState) -> Result<VelocityCoefBounds> {
    state.require_growing()?;
    let c = state.sound_speed();
    let v = state.shear_velocity();
    let atlas = quartic_roots(state)?;
    let value = 1.0 / (atlas.x1_sq + v * v).sqrt();
    let lower = 1.0 / (std::f64::consts::SQRT_2 * c);
    let e2 = state.mach_floor().powi(2);
    let upper = 1.0 / (c * ((1.0 + 4.0 * e2).sqrt() - 1.0).sqrt());

    let x1 = atlas.x1_sq.sqrt();
    let freq = Frequency::real(x1, 1.0);
    let roots = vertical_roots(state, &freq)?;
    let mu_ratio = (roots.mu_plus / (freq.tau + I * v)).norm();

    if (mu_ratio - value).abs() > 1e-10 * value {
        return Err(Error::Consistency(format!(
            "|mu+/(tau + i v eta)| = {mu_ratio} differs from {value}"
        )));
    }
    if !(lower <= value * (1.0 + 1e-14) && value <= upper * (1.0 + 1e-14)) {
        return Err(Error::Consistency(format!(
            "coefficient {value} outside [{lower}, {upper}]"
        )));
    }
    Ok(VelocityCoefBounds {
        lower,
        upper,
        value,
        mu_ratio,
    })
}
