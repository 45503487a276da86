//! Numerical operator theory for Carathéodory functions on the unit disk.
//!
//! The finite model takes `B = ℂⁿ` with the pairing `⟨Ab, c⟩ = cᴴAb`. On top
//! of that the crate provides positive-operator factorization, kernel Gram
//! matrices and their signatures, operator-valued Stieltjes integration, Helly
//! selection, Riesz–Herglotz measures (forward evaluation and recovery from
//! radial samples) and synthesis of isometric colligations from samples.
//!
//! ```
//! use caratheodory::{kernel::CaratheodoryFunction, linalg::re};
//!
//! let phi = CaratheodoryFunction::unit_atom_scalar(); // (1 + z)/(1 − z)
//! let v = phi.eval(re(0.5)).unwrap();
//! assert!((v[(0, 0)] - re(3.0)).norm() < 1e-15);
//! ```

// `!(x < y)` also rejects NaN, which is the point of those guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod helly;
pub mod herglotz;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod operator;
pub mod random;
pub mod realization;
pub mod selftest;
pub mod stieltjes;

pub use error::{Error, Result};
pub use herglotz::HerglotzMeasure;
pub use kernel::{CaratheodoryFunction, GramMatrix, SampleSet};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use operator::{DualityTag, HermitianOperator, PositiveOperator};
pub use realization::Realization;
