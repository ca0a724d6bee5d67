//! `fwlab`: a pseudospectral laboratory for the two-component Fornberg-Whitham
//! system
//!
//! ```text
//!     u_t + u u_x = ∂ₓΛ⁻²(η − u),      η_t + (η u)_x = 0,      Λ = (1 − ∂ₓ²)^{1/2}
//! ```
//!
//! posed on the line and truncated here to a large periodic box.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: periodic grids, fields, transforms, Fourier multipliers,
//!   dealiasing and off-grid interpolation.
//! * [`norms`]: Lebesgue, Sobolev and Besov norms, the Littlewood-Paley
//!   partition, the interpolation inequality and power-law fitting.
//! * [`constructions`]: smooth cutoffs, the two-parameter approximate-solution
//!   family and its residuals, the norm-inflation data and wave-breaking data.
//! * [`dynamics`]: RK4 time stepping with characteristics, monitors and
//!   halt detection, plus post-run reports.
//! * [`experiments`]: reproducible drivers with verdicts, used by the `fwlab`
//!   binary.

// `!(x > 0.0)` is the idiom used throughout to reject NaN along with bad values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod norms;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{Field, PeriodicGrid, Spectrum};
