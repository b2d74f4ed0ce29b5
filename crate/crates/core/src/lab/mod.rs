//! Dimension estimates from quantization sweeps, quantization coefficient
//! traces, and continuity experiments over families of systems.

mod coefficient;
mod continuity;
mod dimension;

pub use coefficient::{coefficient_trace, CoefficientTrace};
pub use continuity::{
    contraction_family, continuity_experiment, equal_steps_experiment, halving_family,
    halving_limit, ContinuityReport, EqualStepsReport, EqualStepsRow, MemberRow,
};
pub use dimension::{empirical_dimension, fit_slope, DimensionEstimate, LineFit};
