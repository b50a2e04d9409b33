//! Pure-point spectral measures of Hydrogen-like spectra, their generalized
//! fractal dimensions, and time-averaged basis moments.
//!
//! The crate builds finite truncations of bound states over an eigenvalue
//! family, converts them to atomic spectral measures, estimates the scaling
//! exponents of two correlation-integral forms across radius grids, and
//! simulates moment growth along orthonormal bases to compare transport
//! against dimension. Everything is generic over the scalar type through
//! [`scalar::Scalar`]; the `*64` aliases below are the working set.
//!
//! Honest finite-size accounting runs through the whole API: truncated
//! measures resolve below half their smallest gap (the resolution floor),
//! truncated dynamics saturate once the smallest gap dephases, and every
//! estimator exposes the window it was read from.

pub mod dimensions;
pub mod dynamics;
pub mod error;
pub mod measure;
mod numeric;
pub mod oracle;
pub mod scalar;
pub mod spectra;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Measure64 = measure::AtomicMeasure<f64>;
pub type Measure32 = measure::AtomicMeasure<f32>;
pub type Family64 = spectra::EigenvalueFamily<f64>;
pub type Family32 = spectra::EigenvalueFamily<f32>;
pub type State64 = states::BoundState<f64>;
pub type State32 = states::BoundState<f32>;
pub type Scan64 = dimensions::DimensionScan<f64>;
pub type Basis64 = dynamics::Basis<f64>;
pub type Trace64 = dynamics::MomentTrace<f64>;
