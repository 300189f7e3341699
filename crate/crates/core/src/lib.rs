//! Projected Cauchy distributions on the circle and the sphere: densities, samplers,
//! maximum likelihood fitting, regression, hypothesis tests and the simulation
//! studies built on them.

pub mod circular;
pub mod error;
pub mod estimation;
pub mod geometry;
pub mod inference;
pub mod io;
pub mod quadrature;
pub mod regression;
pub mod special;
pub mod spherical;

pub use error::{Error, Result};
