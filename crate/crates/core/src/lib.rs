//! Explicit solutions of the focusing cubic wave equation `□u = u³` in
//! three dimensions obtained from the Duffing equation `Ü + U = U³` through
//! the Penrose compactification.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod duffing;
pub mod error;
pub mod interp;
pub mod lifespan;
pub mod norms;
pub mod penrose;
pub mod quad;
pub mod roots;
pub mod scalar;
pub mod threshold;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PhasePoint = duffing::PhasePoint<f64>;
pub type OdeConfig = duffing::OdeConfig<f64>;
pub type OdeState = duffing::OdeState<f64>;
pub type OdeTrajectory = duffing::OdeTrajectory<f64>;
pub type DenseSolution = duffing::DenseSolution<f64>;
pub type QuadConfig = lifespan::QuadConfig<f64>;
pub type Lifespan = lifespan::Lifespan<f64>;
pub type ThresholdConfig = threshold::ThresholdConfig<f64>;
pub type Threshold = threshold::Threshold<f64>;
pub type ThresholdCurve = threshold::ThresholdCurve<f64>;
pub type GridSpec = threshold::GridSpec<f64>;
pub type PhaseDiagram = threshold::PhaseDiagram<f64>;
pub type FieldConfig = penrose::FieldConfig<f64>;
pub type Field = penrose::Field<f64>;
pub type FieldPoint = penrose::FieldPoint<f64>;
pub type RadialField = penrose::RadialField<f64>;
pub type ConformalFactors = penrose::ConformalFactors<f64>;
pub type NormConfig = norms::NormConfig<f64>;
pub type NormResult = norms::NormResult<f64>;
pub type SpectralSamples = norms::SpectralSamples<f64>;
pub type AsymptoticsConfig = asymptotics::AsymptoticsConfig<f64>;
pub type FitResult = asymptotics::FitResult<f64>;
pub type VerifyConfig = verify::VerifyConfig<f64>;
pub type SuiteReport = verify::SuiteReport<f64>;
pub type Check = verify::Check<f64>;

pub use duffing::Sign;
pub use threshold::{Behavior, Classification};
pub use verify::Suite;
