//! Background shear flow and the interface-flattening geometry.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance used to classify a Mach number as exactly critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

/// Largest front amplitude for which the flattening map stays a diffeomorphism.
pub const FRONT_BOUND: f64 = 2.0;

/// Rectilinear solution: equal densities, opposite tangential velocities
/// `+shear_velocity` above and `-shear_velocity` below the flat interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShearState {
    sound_speed: f64,
    shear_velocity: f64,
    density: f64,
    mach_floor: f64,
}

impl ShearState {
    pub fn new(sound_speed: f64, shear_velocity: f64, density: f64, mach_floor: f64) -> Result<Self> {
        if !(sound_speed.is_finite() && sound_speed > 0.0) {
            return Err(invalid("sound_speed", format!("must be finite and > 0, got {sound_speed}")));
        }
        if !(shear_velocity.is_finite() && shear_velocity >= 0.0) {
            return Err(invalid("shear_velocity", format!("must be finite and >= 0, got {shear_velocity}")));
        }
        if !(density.is_finite() && density > 0.0) {
            return Err(invalid("density", format!("must be finite and > 0, got {density}")));
        }
        if !(mach_floor.is_finite() && mach_floor > 0.0) {
            return Err(invalid("mach_floor", format!("must be finite and > 0, got {mach_floor}")));
        }
        Ok(Self {
            sound_speed,
            shear_velocity,
            density,
            mach_floor,
        })
    }

    /// Nondimensional state (`c = 1`, `rho = 1`, floor 0.1) with the given shear speed.
    pub fn nondimensional(shear_velocity: f64) -> Result<Self> {
        Self::new(1.0, shear_velocity, 1.0, 0.1)
    }

    /// State with shear speed `mach * sound_speed`.
    pub fn from_mach(sound_speed: f64, mach: f64, mach_floor: f64) -> Result<Self> {
        Self::new(sound_speed, mach * sound_speed, 1.0, mach_floor)
    }

    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }

    /// Upper-fluid tangential velocity; the lower fluid moves with the opposite sign.
    pub fn shear_velocity(&self) -> f64 {
        self.shear_velocity
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn mach_floor(&self) -> f64 {
        self.mach_floor
    }

    pub fn mach(&self) -> f64 {
        self.shear_velocity / self.sound_speed
    }

    pub fn mach_class(&self) -> MachClass {
        mach_class(self)
    }

    /// Fails unless `mach_floor <= M < sqrt 2`, the regime with a growing root.
    pub fn require_growing(&self) -> Result<()> {
        match self.mach_class() {
            MachClass::SubcriticalGrowing => Ok(()),
            _ => Err(Error::MachOutOfRange {
                mach: self.mach(),
                floor: self.mach_floor,
            }),
        }
    }
}

impl Default for ShearState {
    fn default() -> Self {
        Self {
            sound_speed: 1.0,
            shear_velocity: 1.0,
            density: 1.0,
            mach_floor: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MachClass {
    SubcriticalGrowing,
    Critical,
    SupercriticalNeutral,
    BelowFloor,
}

pub fn mach_class(state: &ShearState) -> MachClass {
    let mach = state.mach();
    let threshold = std::f64::consts::SQRT_2;
    if (mach - threshold).abs() <= CRITICAL_TOLERANCE {
        MachClass::Critical
    } else if mach > threshold {
        MachClass::SupercriticalNeutral
    } else if mach < state.mach_floor {
        MachClass::BelowFloor
    } else {
        MachClass::SubcriticalGrowing
    }
}

/// Cut-off data for `psi(x2) = theta(x2 / (3(1+a))) f`.
///
/// `theta` is 1 on `[-inner, inner]`, 0 outside `[-outer, outer]` and joins the
/// two with the smooth step `S(u) = e^{-1/u} / (e^{-1/u} + e^{-1/(1-u)})`.
/// Since `max S' = S'(1/2) = 2`, the slope bound `|theta'| <= 1` needs
/// `outer - inner >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatteningProfile {
    front_supremum: f64,
    inner_radius: f64,
    outer_radius: f64,
}

impl FlatteningProfile {
    pub fn new(front_supremum: f64, inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&front_supremum) {
            return Err(invalid("front_supremum", format!("must lie in [0, 1], got {front_supremum}")));
        }
        if !(inner_radius > 0.0 && inner_radius < outer_radius && outer_radius.is_finite()) {
            return Err(invalid(
                "cutoff radii",
                format!("need 0 < inner < outer, got {inner_radius}, {outer_radius}"),
            ));
        }
        if outer_radius - inner_radius < 2.0 {
            return Err(invalid(
                "cutoff radii",
                format!("transition width {} < 2 breaks |theta'| <= 1", outer_radius - inner_radius),
            ));
        }
        Ok(Self {
            front_supremum,
            inner_radius,
            outer_radius,
        })
    }

    /// Standard radii 1 and 3.
    pub fn with_supremum(front_supremum: f64) -> Result<Self> {
        Self::new(front_supremum, 1.0, 3.0)
    }

    pub fn front_supremum(&self) -> f64 {
        self.front_supremum
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    fn width(&self) -> f64 {
        self.outer_radius - self.inner_radius
    }

    /// Vertical scale `3(1 + a)` of the cut-off argument.
    pub fn vertical_scale(&self) -> f64 {
        3.0 * (1.0 + self.front_supremum)
    }

    pub fn theta(&self, s: f64) -> f64 {
        let r = s.abs();
        if r <= self.inner_radius {
            1.0
        } else if r >= self.outer_radius {
            0.0
        } else {
            smooth_step((self.outer_radius - r) / self.width())
        }
    }

    pub fn theta_derivative(&self, s: f64) -> f64 {
        let r = s.abs();
        if r <= self.inner_radius || r >= self.outer_radius {
            0.0
        } else {
            -s.signum() * smooth_step_derivative((self.outer_radius - r) / self.width()) / self.width()
        }
    }
}

impl Default for FlatteningProfile {
    fn default() -> Self {
        Self {
            front_supremum: 1.0,
            inner_radius: 1.0,
            outer_radius: 3.0,
        }
    }
}

/// `S(u)` on `[0, 1]`, written as a logistic of `1/u - 1/(1-u)` to avoid 0/0.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / u - 1.0 / (1.0 - u)).exp())
    }
}

fn smooth_step_derivative(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let s = smooth_step(u);
    s * (1.0 - s) * (1.0 / (u * u) + 1.0 / ((1.0 - u) * (1.0 - u)))
}

fn check_front(front_value: f64) -> Result<()> {
    if !front_value.is_finite() || front_value.abs() > FRONT_BOUND {
        return Err(Error::FrontOutOfRange { value: front_value });
    }
    Ok(())
}

/// `psi = theta(x2 / (3(1+a))) * front_value`.
pub fn cutoff_psi(profile: &FlatteningProfile, front_value: f64, x2: f64) -> Result<f64> {
    check_front(front_value)?;
    Ok(profile.theta(x2 / profile.vertical_scale()) * front_value)
}

/// Analytic `d psi / d x2`.
pub fn cutoff_psi_dx2(profile: &FlatteningProfile, front_value: f64, x2: f64) -> Result<f64> {
    check_front(front_value)?;
    let scale = profile.vertical_scale();
    Ok(profile.theta_derivative(x2 / scale) * front_value / scale)
}

/// Smallest `J = 1 + d psi / d x2` over the samples.
pub fn jacobian_lower_bound(profile: &FlatteningProfile, front_value: f64, samples: &[f64]) -> Result<f64> {
    check_front(front_value)?;
    let mut lowest = 1.0_f64;
    for &x2 in samples {
        let jacobian = 1.0 + cutoff_psi_dx2(profile, front_value, x2)?;
        if jacobian < 1.0 / 3.0 {
            return Err(Error::JacobianViolation { jacobian, x2 });
        }
        lowest = lowest.min(jacobian);
    }
    Ok(lowest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense(profile: &FlatteningProfile) -> Vec<f64> {
        let extent = 1.2 * profile.outer_radius() * profile.vertical_scale();
        (0..=20_000).map(|i| -extent + 2.0 * extent * i as f64 / 20_000.0).collect()
    }

    #[test]
    fn mach_classes() {
        let sub = ShearState::new(1.0, 1.0, 1.0, 0.1).unwrap();
        assert_eq!(sub.mach_class(), MachClass::SubcriticalGrowing);
        let crit = ShearState::new(1.0, 2f64.sqrt(), 1.0, 0.1).unwrap();
        assert_eq!(crit.mach_class(), MachClass::Critical);
        let sup = ShearState::new(1.0, 1.5, 1.0, 0.1).unwrap();
        assert_eq!(sup.mach_class(), MachClass::SupercriticalNeutral);
        let low = ShearState::new(1.0, 0.05, 1.0, 0.1).unwrap();
        assert_eq!(low.mach_class(), MachClass::BelowFloor);
        assert!(low.require_growing().is_err());
    }

    #[test]
    fn rejects_bad_states() {
        assert!(ShearState::new(-1.0, 1.0, 1.0, 0.1).is_err());
        assert!(ShearState::new(1.0, 1.0, 0.0, 0.1).is_err());
        assert!(ShearState::new(1.0, -0.5, 1.0, 0.1).is_err());
        assert!(ShearState::new(1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn cutoff_examples() {
        let p = FlatteningProfile::with_supremum(0.5).unwrap();
        assert_eq!(cutoff_psi(&p, 0.5, 0.0).unwrap(), 0.5);
        assert_eq!(cutoff_psi(&p, 0.5, 10.0 * p.vertical_scale()).unwrap(), 0.0);
        assert_eq!(cutoff_psi(&p, 0.0, 1.7).unwrap(), 0.0);
        assert!(cutoff_psi(&p, 2.5, 0.0).is_err());
    }

    #[test]
    fn theta_slope_within_one() {
        let p = FlatteningProfile::default();
        let max = (0..=200_000)
            .map(|i| p.theta_derivative(1.0 + 2.0 * i as f64 / 200_000.0).abs())
            .fold(0.0, f64::max);
        assert!(max <= 1.0 + 1e-12, "max |theta'| = {max}");
        assert!(max > 0.999);
    }

    #[test]
    fn theta_derivative_matches_finite_difference() {
        let p = FlatteningProfile::default();
        for &s in &[-2.7, -1.5, 1.2, 2.0, 2.9] {
            let h = 1e-6;
            let fd = (p.theta(s + h) - p.theta(s - h)) / (2.0 * h);
            assert!((fd - p.theta_derivative(s)).abs() < 1e-7, "s={s}");
        }
    }

    #[test]
    fn jacobian_examples() {
        let p = FlatteningProfile::default();
        let samples = dense(&p);
        assert_eq!(jacobian_lower_bound(&p, 0.0, &samples).unwrap(), 1.0);
        assert!(jacobian_lower_bound(&p, 2.0, &samples).unwrap() >= 1.0 / 3.0);
        assert!(jacobian_lower_bound(&p, -2.0, &samples).unwrap() >= 1.0 / 3.0);
        // a = 1 gives |d psi| <= |f| / 6
        assert!(jacobian_lower_bound(&p, 1.0, &samples).unwrap() >= 5.0 / 6.0 - 1e-15);
        assert!(jacobian_lower_bound(&p, 2.01, &samples).is_err());
    }

    #[test]
    fn rejects_steep_profiles() {
        assert!(FlatteningProfile::new(0.5, 1.0, 2.5).is_err());
        assert!(FlatteningProfile::new(1.5, 1.0, 3.0).is_err());
        assert!(FlatteningProfile::new(0.5, 3.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn psi_matches_front_at_interface(f in -2.0f64..=2.0, a in 0.0f64..=1.0) {
            let p = FlatteningProfile::with_supremum(a).unwrap();
            prop_assert_eq!(cutoff_psi(&p, f, 0.0).unwrap(), f);
            prop_assert_eq!(cutoff_psi_dx2(&p, f, 0.0).unwrap(), 0.0);
        }

        #[test]
        fn jacobian_never_below_a_third(f in -2.0f64..=2.0, a in 0.0f64..=1.0, x2 in -20.0f64..20.0) {
            let p = FlatteningProfile::with_supremum(a).unwrap();
            let j = jacobian_lower_bound(&p, f, &[x2]).unwrap();
            prop_assert!(j >= 1.0 / 3.0);
            let slope = cutoff_psi_dx2(&p, f, x2).unwrap().abs();
            prop_assert!(slope <= f.abs() / p.vertical_scale() + 1e-15);
        }

        #[test]
        fn mach_class_monotone(v1 in 0.0f64..3.0, dv in 0.0f64..1.0) {
            let lo = ShearState::new(1.0, v1, 1.0, 0.1).unwrap().mach_class();
            let hi = ShearState::new(1.0, v1 + dv, 1.0, 0.1).unwrap().mach_class();
            if lo == MachClass::SupercriticalNeutral {
                prop_assert_eq!(hi, MachClass::SupercriticalNeutral);
            }
        }
    }
}
