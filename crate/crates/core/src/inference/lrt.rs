//! Likelihood ratio tests between nested projected Cauchy models.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::estimation::{fit_cipc, fit_gcpc, fit_sespc, fit_sipc, FitResult, OptimizerConfig};

/// Reference distribution of the statistic under the null.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NullDistribution {
    ChiSquared {
        df: f64,
    },
    /// 0.5·δ₀ + 0.5·χ²₁, for a parameter tested on the edge of its range
    Mixture,
}

impl NullDistribution {
    pub fn p_value(&self, statistic: f64) -> f64 {
        match *self {
            NullDistribution::ChiSquared { df } => chi2_sf(statistic, df),
            NullDistribution::Mixture => {
                if statistic <= 0.0 {
                    1.0
                } else {
                    0.5 * chi2_sf(statistic, 1.0)
                }
            }
        }
    }
}

fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).map(|d| d.sf(x)).unwrap_or(f64::NAN).clamp(0.0, 1.0)
}

/// Which nested comparison to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrtKind {
    /// GCPC against CIPC with the boundary mixture null
    RhoOne,
    /// GCPC against CIPC referred to a plain χ²₁
    RhoOneChiSquared,
    /// SESPC against SIPC, χ²₂
    Isotropy,
}

impl LrtKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "rho1" | "rho_one" | "rho-one" => Ok(LrtKind::RhoOne),
            "rho1-chi2" | "rho_one_chi2" | "rho1_chi2" => Ok(LrtKind::RhoOneChiSquared),
            "isotropy" | "sphere" => Ok(LrtKind::Isotropy),
            other => Err(Error::Input(format!("unknown test '{other}'"))),
        }
    }

    pub fn null(self) -> NullDistribution {
        match self {
            LrtKind::RhoOne => NullDistribution::Mixture,
            LrtKind::RhoOneChiSquared => NullDistribution::ChiSquared { df: 1.0 },
            LrtKind::Isotropy => NullDistribution::ChiSquared { df: 2.0 },
        }
    }

    pub fn circular(self) -> bool {
        !matches!(self, LrtKind::Isotropy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrtResult {
    pub statistic: f64,
    pub null: NullDistribution,
    pub p_value: f64,
    pub loglik_null: f64,
    pub loglik_alternative: f64,
    /// 2(ℓ₁ − ℓ₀) before clipping at zero.
    pub raw_statistic: f64,
}

impl LrtResult {
    pub fn from_logliks(loglik_null: f64, loglik_alternative: f64, null: NullDistribution) -> Self {
        let raw = 2.0 * (loglik_alternative - loglik_null);
        let statistic = raw.max(0.0);
        LrtResult {
            statistic,
            null,
            p_value: null.p_value(statistic),
            loglik_null,
            loglik_alternative,
            raw_statistic: raw,
        }
    }

    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Observations for a test: angles in radians or points on S².
#[derive(Debug, Clone, Copy)]
pub enum TestData<'a> {
    Angles(&'a [f64]),
    Sphere(&'a [Vector3<f64>]),
}

impl TestData<'_> {
    pub fn len(&self) -> usize {
        match self {
            TestData::Angles(a) => a.len(),
            TestData::Sphere(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fits the null and alternative models of `kind`.
pub fn fit_nested(data: TestData<'_>, kind: LrtKind, cfg: &OptimizerConfig) -> Result<(FitResult, FitResult)> {
    match (data, kind.circular()) {
        (TestData::Angles(a), true) => {
            if a.len() < 4 {
                return Err(Error::TooFewObservations {
                    needed: 4,
                    got: a.len(),
                });
            }
            Ok((fit_cipc(a, cfg)?, fit_gcpc(a, cfg)?))
        }
        (TestData::Sphere(s), false) => {
            if s.len() < 6 {
                return Err(Error::TooFewObservations {
                    needed: 6,
                    got: s.len(),
                });
            }
            Ok((fit_sipc(s, cfg)?, fit_sespc(s, cfg)?))
        }
        _ => Err(Error::Input("test does not match the data domain".into())),
    }
}

pub fn run_lrt(data: TestData<'_>, kind: LrtKind, cfg: &OptimizerConfig) -> Result<LrtResult> {
    let (h0, h1) = fit_nested(data, kind, cfg)?;
    Ok(LrtResult::from_logliks(h0.loglik, h1.loglik, kind.null()))
}

/// Test of ρ = 1 (CIPC) within the GCPC, referred to 0.5·δ₀ + 0.5·χ²₁.
pub fn lrt_rho_one(data: &[f64], cfg: &OptimizerConfig) -> Result<LrtResult> {
    run_lrt(TestData::Angles(data), LrtKind::RhoOne, cfg)
}

/// As [`lrt_rho_one`] with a plain χ²₁ reference.
pub fn lrt_rho_one_chi2(data: &[f64], cfg: &OptimizerConfig) -> Result<LrtResult> {
    run_lrt(TestData::Angles(data), LrtKind::RhoOneChiSquared, cfg)
}

/// Test of rotational symmetry, θ = 0 (SIPC) within the SESPC, referred to χ²₂.
pub fn lrt_isotropy_sphere(data: &[Vector3<f64>], cfg: &OptimizerConfig) -> Result<LrtResult> {
    run_lrt(TestData::Sphere(data), LrtKind::Isotropy, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_p_values() {
        let m = NullDistribution::Mixture;
        assert_eq!(m.p_value(0.0), 1.0);
        assert!((m.p_value(3.841_458_820_694_124) - 0.025).abs() < 1e-9);
        let c2 = NullDistribution::ChiSquared { df: 2.0 };
        assert!((c2.p_value(5.991_464_547_107_979) - 0.05).abs() < 1e-9);
        let c1 = NullDistribution::ChiSquared { df: 1.0 };
        assert!((c1.p_value(2.705_543_454_095_404) - 0.1).abs() < 1e-9);
    }

    #[test]
    fn clipping() {
        let r = LrtResult::from_logliks(-10.0, -10.0 - 1e-9, NullDistribution::Mixture);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(r.raw_statistic < 0.0);
    }
}
