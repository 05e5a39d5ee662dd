//! Numerical checks of Talenti-type comparison results for the Poisson
//! equation with Neumann boundary data.
//!
//! A solution `u` on a domain `Ω` is compared with the radial solution `v` of
//! the symmetrized problem on the ball `Ω♯` of equal measure, through their
//! distribution functions and Lorentz norms.
//!
//! * [`measure`], [`curve`]: distribution functions and decreasing rearrangements.
//! * [`lorentz`]: Lorentz quasi-norms from a distribution function.
//! * [`radial`]: closed-form radial solutions on `Ω♯` and their level-set identity.
//! * [`geometry`]: the catalogued domains, loads and closed-form solutions.
//! * [`grid`]: an independent finite-volume solver on rectangles.
//! * [`verify`]: theorem checks, counterexample reproduction and the self-test.
//!
//! The scalar-generic modules accept `f32` and `f64`; geometry, grid and
//! verification work in `f64`.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curve;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod lorentz;
pub mod measure;
pub mod quad;
pub mod radial;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{CaseId, ExampleCase};
pub use lorentz::{lorentz_norm, LorentzIndex};
pub use measure::{decreasing_rearrangement, distribution, LevelMeasure};
pub use radial::{solve, NormalizationCondition};
pub use scalar::Real;

pub type SampledFunctionF64 = measure::SampledFunction<f64>;
pub type DistributionCurveF64 = measure::DistributionCurve<f64>;
pub type StepRearrangementF64 = measure::StepRearrangement<f64>;
pub type SymmetrizedProblemF64 = radial::SymmetrizedProblem<f64>;
pub type RadialSolutionF64 = radial::RadialSolution<f64>;
pub type PhiCurveF64 = radial::PhiCurve<f64>;
