//! Weyl-Heisenberg covariant integral quantization on uniform grids.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

mod scalar;

pub mod analysis;
pub mod apodization;
pub mod deficiency;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod mollifier;
pub mod operator;
pub mod portrait;
pub mod quantizer;
pub mod states;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::{LineGrid, PhaseGrid, SampledFunction1D, SampledFunction2D, Warning};
pub use scalar::Real;

pub type LineGrid64 = LineGrid<f64>;
pub type PhaseGrid64 = PhaseGrid<f64>;
pub type Sampled1D64 = SampledFunction1D<f64>;
pub type Sampled2D64 = SampledFunction2D<f64>;
pub type Operator64 = operator::OperatorMatrix<f64>;
pub type Apodization64 = apodization::Apodization<f64>;
pub type Interval64 = mollifier::IntervalSet<f64>;

pub type LineGrid32 = LineGrid<f32>;
pub type PhaseGrid32 = PhaseGrid<f32>;
pub type Sampled1D32 = SampledFunction1D<f32>;
pub type Sampled2D32 = SampledFunction2D<f32>;
pub type Operator32 = operator::OperatorMatrix<f32>;
pub type Apodization32 = apodization::Apodization<f32>;
pub type Interval32 = mollifier::IntervalSet<f32>;
