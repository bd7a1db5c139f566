//! Relativistic Burgers model and its solvers.

pub mod fv;
pub mod glimm;
pub mod grp;
pub mod model;

pub use model::{Sign, SteadyBurgers, SteadyShockBurgers};
