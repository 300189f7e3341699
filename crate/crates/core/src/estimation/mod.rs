//! Maximum likelihood fitting for the circular and spherical models.

pub mod circular_fits;
pub mod derivatives;
pub mod optim;
pub mod spherical_fits;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circular::CircularModel;
use crate::spherical::SphericalModel;

pub use circular_fits::*;
pub use optim::{
    brent_minimize, nelder_mead, newton_ascent, numeric_gradient, numeric_hessian, Minimum, OptimizerConfig,
};
pub use spherical_fits::*;

/// Starts screened by the multi-start GCPC and SESPC drivers unless overridden.
pub const DEFAULT_MULTI_START: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FittedModel {
    Circular(CircularModel),
    Spherical(SphericalModel),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: FittedModel,
    pub names: Vec<String>,
    pub estimates: Vec<f64>,
    /// Present only when the observed information is positive definite.
    pub std_errors: Option<Vec<f64>>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub starts_used: usize,
    pub diagnostics: Vec<String>,
}

impl FitResult {
    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.estimates[i])
    }

    pub fn circular(&self) -> Option<&CircularModel> {
        match &self.model {
            FittedModel::Circular(m) => Some(m),
            _ => None,
        }
    }

    pub fn spherical(&self) -> Option<&SphericalModel> {
        match &self.model {
            FittedModel::Spherical(m) => Some(m),
            _ => None,
        }
    }
}

/// Inverse observed information from a finite-difference Hessian of `loglik` at `x`.
/// `Err` carries the diagnostic when the information is not positive definite.
pub fn inverse_information<F: FnMut(&[f64]) -> f64>(loglik: F, x: &[f64]) -> std::result::Result<DMatrix<f64>, String> {
    let h = numeric_hessian(loglik, x);
    if h.iter().any(|v| !v.is_finite()) {
        return Err("non-finite Hessian".into());
    }
    let info = -h;
    let info = 0.5 * (&info + info.transpose());
    match info.clone().cholesky() {
        Some(c) => Ok(c.inverse()),
        None => Err("observed information is not positive definite; standard errors omitted".into()),
    }
}

/// Square roots of the diagonal of the inverse observed information.
pub fn standard_errors<F: FnMut(&[f64]) -> f64>(loglik: F, x: &[f64]) -> std::result::Result<Vec<f64>, String> {
    let cov = inverse_information(loglik, x)?;
    Ok((0..x.len()).map(|i| cov[(i, i)].sqrt()).collect())
}

fn attach_std_errors<F: FnMut(&[f64]) -> f64>(fit: &mut FitResult, loglik: F, x: &[f64]) {
    match standard_errors(loglik, x) {
        Ok(se) => fit.std_errors = Some(se),
        Err(msg) => fit.diagnostics.push(msg),
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}
