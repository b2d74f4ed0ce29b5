//! Quantization dimension of invariant measures generated by iterated
//! function systems of contractive infinitesimal similitudes on a compact
//! real interval.
//!
//! The quantization dimension `D_r` is computed three ways and checked
//! against directly computed optimal quantization errors:
//!
//! * [`spectral::closed_form_sigma`] solves `Σ (p_i c_i^r)^{D/(r+D)} = 1`
//!   for similitude systems;
//! * [`spectral::word_sum_sigma`] finds the root of the level-`n` word sum
//!   built from the derivative bounds `T_w` and `R_w`;
//! * [`spectral::solve_sigma_spectral`] discretizes the transfer operator
//!   `L_{σ,r}` on a mesh and bisects on its spectral radius.
//!
//! [`quantizer`] computes `V_{n,r}` exactly by a 1-D dynamic program and
//! [`lab`] turns error sweeps into dimension estimates.

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ifs;
pub mod lab;
pub mod measure;
pub mod quantizer;
pub mod root;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use ifs::{IfsModel, Interval, MapDescriptor, Word};
pub use measure::AtomicMeasure;
