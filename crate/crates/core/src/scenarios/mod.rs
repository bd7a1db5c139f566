//! Scenario catalog, configuration, detectors, output and the run driver.

pub mod catalog;
pub mod config;
pub mod detect;
pub mod initial;
pub mod output;
pub mod runner;

pub use catalog::{catalog, find};
pub use config::Scenario;
pub use initial::{build_initial, reference};
