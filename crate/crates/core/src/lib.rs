//! Chen delta-invariants of Lagrangian submanifolds in complex space forms,
//! computed pointwise from the cubic form `h_ABC = <h(e_A, e_B), J e_C>`.
//!
//! The crate covers
//! - symmetric cubic forms, orthonormal frames and curvature via the Gauss
//!   equation ([`tensor`], [`frame`], [`curvature`]);
//! - delta-invariants by exact coordinate enumeration and by descent on the
//!   orthogonal group ([`delta`]);
//! - the optimal inequalities `delta <= a |H|^2 + b c` next to two older
//!   bounds ([`inequality`]) and the quadratic forms fixing `a`
//!   ([`quadratic`]);
//! - tensors attaining equality ([`equality`]);
//! - gradient-graph immersions realizing any cubic form ([`immersion`]);
//! - seeded random campaigns ([`campaign`]).
//!
//! Indices are 0-based in the Rust API and 1-based in every file format.

pub mod campaign;
pub mod curvature;
pub mod delta;
pub mod equality;
pub mod error;
pub mod frame;
pub mod immersion;
pub mod inequality;
pub mod partition;
pub mod quadratic;
pub mod rational;
pub mod sampling;
pub mod tensor;

pub use curvature::AmbientConstant;
pub use delta::{delta_coordinate_oracle, delta_invariant, DeltaResult, OptimizerOptions};
pub use error::{Error, Result};
pub use frame::Frame;
pub use inequality::{BoundSource, InequalityReport, Verdict};
pub use partition::PartitionSpec;
pub use quadratic::QuadraticFormBundle;
pub use rational::Rational;
pub use tensor::CubicForm;

pub use nalgebra;
