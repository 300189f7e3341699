//! Kullback–Leibler divergences between fitted or specified models, by quadrature.

use serde::{Deserialize, Serialize};

use crate::circular::CircularModel;
use crate::error::{Error, Result};
use crate::estimation::FittedModel;
use crate::quadrature::{integrate_circle_centered, integrate_sphere, QuadratureSpec};
use crate::spherical::SphericalModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KldResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn term(lp: f64, lq: f64) -> f64 {
    let p = lp.exp();
    if p == 0.0 {
        0.0
    } else {
        p * (lp - lq)
    }
}

fn check(value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NumericalDomain(
            "divergence is not finite; q vanishes where p does not".into(),
        ))
    }
}

/// KL(p‖q) = ∫ p log(p/q) over the circle, with the cut placed opposite p's location.
pub fn kld_circular(p: &CircularModel, q: &CircularModel, spec: &QuadratureSpec) -> Result<KldResult> {
    let r = integrate_circle_centered(|t| term(p.ln_pdf(t), q.ln_pdf(t)), p.location(), spec)?;
    Ok(KldResult {
        value: check(r.value)?,
        error_estimate: r.error,
        evaluations: r.evaluations,
    })
}

/// KL(p‖q) over S², with the grid pole on p's location.
pub fn kld_spherical(p: &SphericalModel, q: &SphericalModel, spec: &QuadratureSpec) -> Result<KldResult> {
    let lp = p.ln_pdf_fn();
    let lq = q.ln_pdf_fn();
    let pole = p.location();
    let r = integrate_sphere(|y| term(lp(y), lq(y)), Some(&pole), spec)?;
    Ok(KldResult {
        value: check(r.value)?,
        error_estimate: r.error,
        evaluations: r.evaluations,
    })
}

/// Dispatch on the domain of the two models, which must agree.
pub fn kld(p: &FittedModel, q: &FittedModel, spec: &QuadratureSpec) -> Result<KldResult> {
    match (p, q) {
        (FittedModel::Circular(a), FittedModel::Circular(b)) => kld_circular(a, b, spec),
        (FittedModel::Spherical(a), FittedModel::Spherical(b)) => kld_spherical(a, b, spec),
        _ => Err(Error::Input("both models must live on the same domain".into())),
    }
}
