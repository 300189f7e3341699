//! Accuracy measures used by the simulation studies.

use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};

/// ‖μ̂ − μ‖₂.
pub fn metric_euclid(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::ShapeMismatch(format!(
            "estimate has {} entries, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    Ok(estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// ‖B̂ − B‖_F.
pub fn metric_frobenius(estimate: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    if estimate.shape() != truth.shape() {
        return Err(Error::ShapeMismatch(format!(
            "estimate is {:?}, truth is {:?}",
            estimate.shape(),
            truth.shape()
        )));
    }
    Ok((estimate - truth).norm())
}

/// √(2[1 − mean(m̂ᵢᵀm)]) over the estimated mean directions.
pub fn metric_error_m(estimates: &[Vector3<f64>], truth: &Vector3<f64>) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::ShapeMismatch("no estimated directions".into()));
    }
    let mean = estimates.iter().map(|m| m.dot(truth)).sum::<f64>() / estimates.len() as f64;
    Ok((2.0 * (1.0 - mean)).max(0.0).sqrt())
}
