//! Linear stability analysis of the two-dimensional compressible vortex sheet.
//!
//! The crate is organised bottom-up:
//!
//! * [`physics`]: the rectilinear shear state, Mach classification and the
//!   interface-flattening cut-off.
//! * [`symbol`]: vertical decay roots, both forms of the interface symbol, the
//!   quartic for the growing root and the coefficient bounds derived at the root.
//! * [`modes`]: explicit growing normal modes and their residual checks.
//! * [`sobolev`]: closed-form piecewise Sobolev norms, band-limited spectra and
//!   the blow-up tables.
//! * [`evolve`]: an independent per-Fourier-mode time-domain solver used to
//!   cross-check the analytic growth rate and the energy identity.

pub mod error;
pub mod evolve;
pub mod modes;
pub mod physics;
pub mod sobolev;
pub mod symbol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
