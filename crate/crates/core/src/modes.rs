//! Explicit growing normal modes `e^{tau t} e^{i eta x1} (g, m(x2), w(x2))`
//! at the root `tau = X1 eta`, stored symbolically as exponential profiles.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::physics::ShearState;
use crate::symbol::{growth_slope, vertical_roots, Frequency, VerticalRootPair};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

/// `amplitude * exp(-rate x2)` for `x2 >= 0` (upper) or
/// `amplitude * exp(rate x2)` for `x2 < 0` (lower).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpProfile {
    pub amplitude: Complex64,
    pub decay_rate: Complex64,
    pub side: Side,
}

impl ExpProfile {
    pub fn new(amplitude: Complex64, decay_rate: Complex64, side: Side) -> Result<Self> {
        if !(decay_rate.re > 0.0) {
            return Err(invalid("decay_rate", format!("real part must be > 0, got {decay_rate}")));
        }
        Ok(Self {
            amplitude,
            decay_rate,
            side,
        })
    }

    /// Exponent `lambda` with `profile = amplitude * exp(lambda x2)`.
    fn exponent(&self) -> Complex64 {
        match self.side {
            Side::Upper => -self.decay_rate,
            Side::Lower => self.decay_rate,
        }
    }

    pub fn value(&self, x2: f64) -> Complex64 {
        self.amplitude * (self.exponent() * x2).exp()
    }

    /// `d^order / dx2^order` of the profile.
    pub fn derivative(&self, x2: f64, order: u32) -> Complex64 {
        let lambda = self.exponent();
        self.amplitude * lambda.powu(order) * (lambda * x2).exp()
    }

    fn scaled(&self, s: Complex64) -> Self {
        Self {
            amplitude: self.amplitude * s,
            ..*self
        }
    }

    fn conj(&self) -> Self {
        Self {
            amplitude: self.amplitude.conj(),
            decay_rate: self.decay_rate.conj(),
            side: self.side,
        }
    }
}

/// Growing normal mode of the linearised interface problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearMode {
    pub eta: f64,
    pub tau: Complex64,
    pub front_amp: Complex64,
    pub roots: VerticalRootPair,
    pub pressure_upper: ExpProfile,
    pub pressure_lower: ExpProfile,
    pub v1_upper: ExpProfile,
    pub v1_lower: ExpProfile,
    pub v2_upper: ExpProfile,
    pub v2_lower: ExpProfile,
}

impl LinearMode {
    /// Profiles bundled per side: `(pressure, v1, v2)`.
    pub fn side(&self, side: Side) -> (&ExpProfile, &ExpProfile, &ExpProfile) {
        match side {
            Side::Upper => (&self.pressure_upper, &self.v1_upper, &self.v2_upper),
            Side::Lower => (&self.pressure_lower, &self.v1_lower, &self.v2_lower),
        }
    }

    /// Complex mode scaled by `s`; all fields are linear in the front amplitude.
    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            front_amp: self.front_amp * s,
            pressure_upper: self.pressure_upper.scaled(s),
            pressure_lower: self.pressure_lower.scaled(s),
            v1_upper: self.v1_upper.scaled(s),
            v1_lower: self.v1_lower.scaled(s),
            v2_upper: self.v2_upper.scaled(s),
            v2_lower: self.v2_lower.scaled(s),
            ..*self
        }
    }

    /// Complex conjugate mode at `-eta`; its real part is the same real field.
    pub fn conjugate(&self) -> Self {
        Self {
            eta: -self.eta,
            tau: self.tau.conj(),
            front_amp: self.front_amp.conj(),
            roots: VerticalRootPair {
                mu_plus: self.roots.mu_plus.conj(),
                mu_minus: self.roots.mu_minus.conj(),
            },
            pressure_upper: self.pressure_upper.conj(),
            pressure_lower: self.pressure_lower.conj(),
            v1_upper: self.v1_upper.conj(),
            v1_lower: self.v1_lower.conj(),
            v2_upper: self.v2_upper.conj(),
            v2_lower: self.v2_lower.conj(),
        }
    }
}

/// Builds the growing mode at `tau = X1 eta` for `eta > 0`.
///
/// Pressure amplitude is `(mu^+ - mu^-) g` on both sides. Velocities follow from
/// the momentum equations: `w1 = -c^2 i eta m / (tau ± i v eta)` and
/// `w2 = -c^2 m' / (tau ± i v eta)`.
pub fn build_mode(state: &ShearState, eta: f64, front_amp: Complex64) -> Result<LinearMode> {
    if eta == 0.0 {
        return Err(Error::DegenerateMode);
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid("eta", format!("must be > 0 (use LinearMode::conjugate for eta < 0), got {eta}")));
    }
    if front_amp.norm() == 0.0 || !front_amp.is_finite() {
        return Err(invalid("front_amp", "must be finite and non-zero"));
    }
    state.require_growing()?;
    let x1 = growth_slope(state)?;
    let tau = Complex64::new(x1 * eta, 0.0);
    let roots = vertical_roots(state, &Frequency::new(tau, eta))?;
    let c2 = state.sound_speed().powi(2);
    let v = state.shear_velocity();

    let pressure = roots.difference() * front_amp;
    let doppler_upper = tau + I * v * eta;
    let doppler_lower = tau - I * v * eta;

    let pressure_upper = ExpProfile::new(pressure, roots.mu_plus, Side::Upper)?;
    let pressure_lower = ExpProfile::new(pressure, roots.mu_minus, Side::Lower)?;
    let v1_upper = ExpProfile::new(-c2 * I * eta * pressure / doppler_upper, roots.mu_plus, Side::Upper)?;
    let v1_lower = ExpProfile::new(-c2 * I * eta * pressure / doppler_lower, roots.mu_minus, Side::Lower)?;
    let v2_upper = ExpProfile::new(c2 * roots.mu_plus * pressure / doppler_upper, roots.mu_plus, Side::Upper)?;
    let v2_lower = ExpProfile::new(-c2 * roots.mu_minus * pressure / doppler_lower, roots.mu_minus, Side::Lower)?;

    Ok(LinearMode {
        eta,
        tau,
        front_amp,
        roots,
        pressure_upper,
        pressure_lower,
        v1_upper,
        v1_lower,
        v2_upper,
        v2_lower,
    })
}

/// Relative residuals of the interior equations and the interface conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeResidual {
    pub interior_upper: f64,
    pub interior_lower: f64,
    pub kinematic: f64,
    pub velocity_jump: f64,
    pub pressure_value_jump: f64,
    pub pressure_deriv_jump: f64,
}

impl ModeResidual {
    pub fn max(&self) -> f64 {
        [
            self.interior_upper,
            self.interior_lower,
            self.kinematic,
            self.velocity_jump,
            self.pressure_value_jump,
            self.pressure_deriv_jump,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `|sum of terms|` relative to the largest term.
fn balance(terms: &[Complex64]) -> f64 {
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    terms.iter().sum::<Complex64>().norm() / scale
}

fn interior_residual(state: &ShearState, mode: &LinearMode, side: Side) -> f64 {
    let c2 = state.sound_speed().powi(2);
    let (shear, rate) = match side {
        Side::Upper => (state.shear_velocity(), mode.pressure_upper.decay_rate),
        Side::Lower => (-state.shear_velocity(), mode.pressure_lower.decay_rate),
    };
    let (m, w1, w2) = mode.side(side);
    let eta = mode.eta;
    let doppler = mode.tau + I * shear * eta;
    let sign = match side {
        Side::Upper => 1.0,
        Side::Lower => -1.0,
    };
    [0.0, 1.0, 2.0]
        .iter()
        .map(|k| {
            let x2 = sign * k / rate.re;
            let mass = balance(&[doppler * m.value(x2), I * eta * w1.value(x2), w2.derivative(x2, 1)]);
            let horizontal = balance(&[doppler * w1.value(x2), c2 * I * eta * m.value(x2)]);
            let vertical = balance(&[doppler * w2.value(x2), c2 * m.derivative(x2, 1)]);
            mass.max(horizontal).max(vertical)
        })
        .fold(0.0, f64::max)
}

fn mismatch(lhs: Complex64, rhs: Complex64) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

/// Closed-form residual report; interior equations are sampled at
/// `x2 = 0, ±1/Re mu, ±2/Re mu`.
pub fn mode_residual(state: &ShearState, mode: &LinearMode) -> ModeResidual {
    let c2 = state.sound_speed().powi(2);
    let v = state.shear_velocity();
    let eta = mode.eta;
    let g = mode.front_amp;
    let tau = mode.tau;

    let w2_up = mode.v2_upper.value(0.0);
    let w2_down = mode.v2_lower.value(0.0);
    let m_up = mode.pressure_upper.value(0.0);
    let m_down = mode.pressure_lower.value(0.0);
    let dm_up = mode.pressure_upper.derivative(0.0, 1);
    let dm_down = mode.pressure_lower.derivative(0.0, 1);

    let pressure_value_jump = {
        let scale = m_up.norm().max(m_down.norm());
        if scale == 0.0 {
            0.0
        } else {
            (m_up - m_down).norm() / scale
        }
    };

    ModeResidual {
        interior_upper: interior_residual(state, mode, Side::Upper),
        interior_lower: interior_residual(state, mode, Side::Lower),
        kinematic: mismatch(tau * g, w2_up - I * v * eta * g),
        velocity_jump: mismatch(w2_up - w2_down, 2.0 * v * I * eta * g),
        pressure_value_jump,
        pressure_deriv_jump: mismatch(c2 * (dm_up - dm_down), -4.0 * I * v * eta * tau * g),
    }
}

/// Real fields `(f, h, v1, v2)` at a physical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub front: f64,
    pub pressure: f64,
    pub v1: f64,
    pub v2: f64,
}

pub fn evaluate_field(mode: &LinearMode, t: f64, x1: f64, x2: f64) -> FieldSample {
    let phase = (mode.tau * t + I * mode.eta * x1).exp();
    let side = if x2 >= 0.0 { Side::Upper } else { Side::Lower };
    let (m, w1, w2) = mode.side(side);
    FieldSample {
        front: (phase * mode.front_amp).re,
        pressure: (phase * m.value(x2)).re,
        v1: (phase * w1.value(x2)).re,
        v2: (phase * w2.value(x2)).re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ShearState {
        ShearState::nondimensional(1.0).unwrap()
    }

    #[test]
    fn pressure_amplitude_at_unit_mach() {
        let mode = build_mode(&unit(), 1.0, Complex64::new(1.0, 0.0)).unwrap();
        // mu+ - mu- = 2i sqrt((r - a)/2) with a = sqrt5 - 2, r = 1
        let expected = 2.0 * ((3.0 - 5f64.sqrt()) / 2.0).sqrt();
        let amp = mode.pressure_upper.amplitude;
        assert!(amp.re.abs() < 1e-14);
        assert!((amp.im - expected).abs() < 1e-14);
        assert!((amp.im - 1.236068).abs() < 1e-6);
        assert!(mode_residual(&unit(), &mode).max() <= 1e-10);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        let s = unit();
        assert_eq!(build_mode(&s, 0.0, Complex64::new(1.0, 0.0)), Err(Error::DegenerateMode));
        assert!(build_mode(&s, -1.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(build_mode(&s, 1.0, Complex64::new(0.0, 0.0)).is_err());
        let sup = ShearState::nondimensional(1.5).unwrap();
        assert!(matches!(build_mode(&sup, 1.0, Complex64::new(1.0, 0.0)), Err(Error::MachOutOfRange { .. })));
        assert!(ExpProfile::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Side::Upper).is_err());
    }

    #[test]
    fn residuals_vanish_across_parameters() {
        for &m in &[0.2, 0.5, 1.0, 1.3] {
            for &eta in &[1.0, 10.0, 100.0] {
                let state = ShearState::from_mach(1.0, m, 0.1).unwrap();
                let mode = build_mode(&state, eta, Complex64::new(1.0, 0.0)).unwrap();
                let r = mode_residual(&state, &mode);
                assert!(r.max() <= 1e-10, "M={m} eta={eta}: {r:?}");
            }
        }
    }

    #[test]
    fn residuals_invariant_under_scaling() {
        let s = ShearState::new(1.7, 1.1, 1.0, 0.1).unwrap();
        let mode = build_mode(&s, 3.0, Complex64::new(1.0, 0.0)).unwrap();
        let scaled = mode.scaled(Complex64::new(-2.5, 4.0));
        let (a, b) = (mode_residual(&s, &mode), mode_residual(&s, &scaled));
        assert!((a.max() - b.max()).abs() < 1e-14);
        assert!(b.max() <= 1e-10);
    }

    #[test]
    fn perturbed_pressure_breaks_derivative_jump() {
        let s = unit();
        let mut mode = build_mode(&s, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        mode.pressure_upper.amplitude *= 1.01;
        mode.pressure_lower.amplitude *= 1.01;
        let r = mode_residual(&s, &mode);
        assert!((r.pressure_deriv_jump - 0.01 / 1.01).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn jump_identity_chain() {
        for &m in &[0.2, 0.7, 1.3] {
            let s = ShearState::from_mach(1.4, m, 0.1).unwrap();
            let mode = build_mode(&s, 2.0, Complex64::new(1.0, 0.0)).unwrap();
            let lhs = mode.roots.mu_plus.powi(2) - mode.roots.mu_minus.powi(2);
            let rhs = 4.0 * I * s.shear_velocity() * mode.eta * mode.tau / s.sound_speed().powi(2);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn conjugate_mode_is_the_mirror_frequency() {
        let s = ShearState::from_mach(1.0, 0.8, 0.1).unwrap();
        let mode = build_mode(&s, 2.5, Complex64::new(0.3, -1.2)).unwrap();
        let mirror = mode.conjugate();
        let roots = vertical_roots(&s, &Frequency::new(mirror.tau, mirror.eta)).unwrap();
        assert!((roots.mu_plus - mirror.pressure_upper.decay_rate).norm() < 1e-13);
        assert!((roots.mu_minus - mirror.pressure_lower.decay_rate).norm() < 1e-13);
        assert!(mode_residual(&s, &mirror).max() <= 1e-10);
        for &(t, x1, x2) in &[(0.0, 0.0, 0.3), (1.0, 0.7, -0.4), (0.5, -2.0, 1.5)] {
            let a = evaluate_field(&mode, t, x1, x2);
            let b = evaluate_field(&mirror, t, x1, x2);
            assert!((a.pressure - b.pressure).abs() < 1e-13);
            assert!((a.v2 - b.v2).abs() < 1e-13);
        }
    }

    #[test]
    fn field_evaluation() {
        let s = unit();
        let mode = build_mode(&s, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(evaluate_field(&mode, 0.0, 0.0, 0.0).front, 1.0);

        let x1 = growth_slope(&s).unwrap();
        for &t in &[0.5, 2.0, 7.0] {
            let a = evaluate_field(&mode, 0.0, 0.3, 0.4);
            let b = evaluate_field(&mode, t, 0.3, 0.4);
            let growth = (x1 * t).exp();
            for (u, w) in [(a.front, b.front), (a.pressure, b.pressure), (a.v1, b.v1), (a.v2, b.v2)] {
                assert!((w - growth * u).abs() <= 1e-12 * (growth * u).abs().max(1e-300));
            }
        }

        let far = evaluate_field(&mode, 0.0, 0.0, 60.0);
        assert!(far.pressure.abs() < 1e-15 && far.v1.abs() < 1e-15 && far.v2.abs() < 1e-15);
        let far_below = evaluate_field(&mode, 0.0, 0.0, -60.0);
        assert!(far_below.pressure.abs() < 1e-15);
    }
}
