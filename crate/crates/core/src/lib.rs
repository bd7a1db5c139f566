//! Well-balanced solvers for relativistic fluid flows on a Schwarzschild
//! background.
//!
//! Two models are provided: the relativistic Burgers equation, solved by
//! first/second-order finite volume schemes and a random choice (Glimm)
//! scheme built on exact generalized Riemann problems, and the isothermal
//! relativistic Euler system, solved by a steady-state preserving finite
//! volume scheme. The [`scenarios`] module wires them into reproducible
//! experiments.

// `!(x < y)` guards deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod burgers;
pub mod error;
pub mod euler;
pub mod grid;
pub mod numerics;
pub mod par;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{FieldSnapshot, Grid};
pub use par::Exec;
