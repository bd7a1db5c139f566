//! Relativistic Euler model and its finite volume scheme.

pub mod fv;
pub mod model;

pub use model::{EulerConserved, EulerParams, EulerState, SteadyEuler, SteadyShockEuler};
