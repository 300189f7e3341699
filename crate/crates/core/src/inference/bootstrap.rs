//! Nonparametric bootstrap calibration of the likelihood ratio tests.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lrt::{fit_nested, LrtKind, LrtResult, TestData};
use crate::circular::{gcpc_inverse_scatter, CircularModel};
use crate::error::{Error, Result};
use crate::estimation::{FitResult, OptimizerConfig};
use crate::spherical::{sespc_inverse_scatter, SphericalModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub p_value: f64,
    pub statistic: f64,
    pub requested: usize,
    /// Resamples whose two fits both succeeded.
    pub effective: usize,
    pub failures: usize,
    pub exceedances: usize,
}

fn sqrt_spd2(m: Matrix2<f64>) -> Matrix2<f64> {
    let e = SymmetricEigen::new(m);
    let d = e.eigenvalues.map(|v| v.max(0.0).sqrt());
    e.eigenvectors * Matrix2::from_diagonal(&d) * e.eigenvectors.transpose()
}

fn sqrt_spd3(m: Matrix3<f64>) -> Matrix3<f64> {
    let e = SymmetricEigen::new(m);
    let d = e.eigenvalues.map(|v| v.max(0.0).sqrt());
    e.eigenvectors * Matrix3::from_diagonal(&d) * e.eigenvectors.transpose()
}

/// Observations moved onto the null model. If X has location μ and scatter Σ with
/// Σμ = μ, then Σ^{-1/2}X has location μ and identity scatter, and its direction is
/// the direction of Σ^{-1/2}Y. Whitening by the fitted scatter therefore turns a
/// GCPC sample into a CIPC one and an SESPC sample into an SIPC one.
enum Nulled {
    Angles(Vec<f64>),
    Sphere(Vec<Vector3<f64>>),
}

fn impose_null(data: TestData<'_>, alt: &FitResult) -> Result<Nulled> {
    match data {
        TestData::Angles(a) => {
            let Some(CircularModel::Gcpc(p)) = alt.circular() else {
                return Err(Error::FitFailed("alternative is not a GCPC fit".into()));
            };
            let w: Matrix2<f64> = match gcpc_inverse_scatter(p) {
                Ok(s) => sqrt_spd2(s),
                Err(_) => Matrix2::identity(),
            };
            Ok(Nulled::Angles(
                a.iter()
                    .map(|t| {
                        let v = w * Vector2::new(t.cos(), t.sin());
                        v[1].atan2(v[0])
                    })
                    .collect(),
            ))
        }
        TestData::Sphere(s) => {
            let Some(SphericalModel::Sespc(p)) = alt.spherical() else {
                return Err(Error::FitFailed("alternative is not an SESPC fit".into()));
            };
            let w: Matrix3<f64> = match sespc_inverse_scatter(p) {
                Ok(m) => sqrt_spd3(m),
                Err(_) => Matrix3::identity(),
            };
            Ok(Nulled::Sphere(s.iter().map(|y| (w * y).normalize()).collect()))
        }
    }
}

/// Bootstrap p-value (1 + #{T*ᵦ ≥ T}) / (B_eff + 1). The null is imposed by whitening
/// the data with the fitted alternative scatter; resamples drawn with replacement from
/// the whitened data are refitted under both models. Resamples whose fits fail are
/// counted and left out.
pub fn bootstrap_lrt(
    data: TestData<'_>,
    kind: LrtKind,
    b: usize,
    seed: u64,
    cfg: &OptimizerConfig,
) -> Result<BootstrapResult> {
    if b < 99 {
        return Err(Error::InvalidParameter {
            name: "B",
            value: b as f64,
            reason: "at least 99 bootstrap resamples are required",
        });
    }
    let (h0, h1) = fit_nested(data, kind, cfg)?;
    let observed = LrtResult::from_logliks(h0.loglik, h1.loglik, kind.null()).statistic;
    let nulled = impose_null(data, &h1)?;
    let n = data.len();
    let mut exceed = 0;
    let mut failures = 0;
    for r in 0..b {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(r as u64 + 1);
        let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let fits = match &nulled {
            Nulled::Angles(a) => {
                let s: Vec<f64> = idx.iter().map(|&i| a[i]).collect();
                fit_nested(TestData::Angles(&s), kind, cfg)
            }
            Nulled::Sphere(v) => {
                let s: Vec<Vector3<f64>> = idx.iter().map(|&i| v[i]).collect();
                fit_nested(TestData::Sphere(&s), kind, cfg)
            }
        };
        match fits {
            Ok((f0, f1)) if f0.loglik.is_finite() && f1.loglik.is_finite() => {
                let t = LrtResult::from_logliks(f0.loglik, f1.loglik, kind.null()).statistic;
                if t >= observed {
                    exceed += 1;
                }
            }
            _ => failures += 1,
        }
    }
    let effective = b - failures;
    if effective == 0 {
        return Err(Error::FitFailed("every bootstrap resample failed".into()));
    }
    Ok(BootstrapResult {
        p_value: (1 + exceed) as f64 / (effective + 1) as f64,
        statistic: observed,
        requested: b,
        effective,
        failures,
        exceedances: exceed,
    })
}
