//! Open-system simulation of two laser-driven optical cavities whose fields leak
//! into a shared, absorbing fiber.
//!
//! Models are built in [`model`], solved in [`solvers`], and reduced to
//! populations and emission rates in [`observables`]. [`runner`] drives
//! parameter sweeps from TOML configs and backs the `cavitylink` binary.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fock;
pub mod model;
pub mod observables;
pub mod runner;
pub mod solvers;

pub use error::{Error, Result};
