//! Regression of directions on covariates. The location of every observation is
//! μᵢ = Bᵀxᵢ; circular models use a p×2 coefficient matrix and spherical models a p×3 one.

mod circular_reg;
mod sphere_reg;

pub use circular_reg::*;
pub use sphere_reg::*;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::estimation::standard_errors;
use crate::geometry::Rotation3;

/// n×p covariate matrix, intercept column included by the caller or by
/// [`DesignMatrix::with_intercept`]. Always of full column rank.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    x: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.ncols() == 0 || x.nrows() == 0 {
            return Err(Error::ShapeMismatch("design matrix is empty".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("design matrix contains non-finite values".into()));
        }
        let rank = numeric_rank(&x);
        if rank < x.ncols() {
            return Err(Error::RankDeficient { rank, cols: x.ncols() });
        }
        Ok(DesignMatrix { x })
    }

    /// Prepends a column of ones to `covariates` (n×q, q may be 0).
    pub fn with_intercept(covariates: &DMatrix<f64>) -> Result<Self> {
        let n = covariates.nrows();
        let q = covariates.ncols();
        DesignMatrix::new(DMatrix::from_fn(n, q + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                covariates[(i, j - 1)]
            }
        }))
    }

    pub fn intercept_only(n: usize) -> Result<Self> {
        DesignMatrix::new(DMatrix::from_element(n, 1, 1.0))
    }

    pub fn nrows(&self) -> usize {
        self.x.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// Locations Bᵀxᵢ as the rows of an n×k matrix.
    pub fn locations(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        &self.x * b
    }
}

fn numeric_rank(x: &DMatrix<f64>) -> usize {
    let sv = x.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    let tol = max * 1e-10;
    sv.iter().filter(|&&s| s > tol).count()
}

/// Internal centring and scaling of the covariates: Z = X·A, so coefficients on the
/// standardised scale map back by B = A·B_z. Fitted locations are unaffected.
#[derive(Debug, Clone)]
pub(crate) struct Standardized {
    pub z: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub a_inv: DMatrix<f64>,
}

impl Standardized {
    pub fn new(design: &DesignMatrix) -> Self {
        let x = design.matrix();
        let (n, p) = (x.nrows(), x.ncols());
        let is_const = |j: usize| {
            let v0 = x[(0, j)];
            v0 != 0.0 && x.column(j).iter().all(|&v| v == v0)
        };
        let intercept = (0..p).find(|&j| is_const(j));
        let mut a = DMatrix::<f64>::identity(p, p);
        for j in 0..p {
            let col = x.column(j);
            if Some(j) == intercept {
                a[(j, j)] = 1.0 / x[(0, j)];
                continue;
            }
            match intercept {
                Some(c) => {
                    let m = col.mean();
                    let s = (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64).sqrt();
                    let s = if s > 0.0 { s } else { 1.0 };
                    a[(j, j)] = 1.0 / s;
                    a[(c, j)] = -m / (s * x[(0, c)]);
                }
                None => {
                    let s = (col.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
                    a[(j, j)] = 1.0 / if s > 0.0 { s } else { 1.0 };
                }
            }
        }
        let a_inv = a.clone().try_inverse().expect("triangular with nonzero diagonal");
        Standardized { z: x * &a, a, a_inv }
    }

    pub fn to_original(&self, bz: &DMatrix<f64>) -> DMatrix<f64> {
        &self.a * bz
    }

    pub fn to_standard(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        &self.a_inv * b
    }
}

/// Least squares of the response coordinates on Z.
pub(crate) fn ols(z: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    let zt = z.transpose();
    let g = &zt * z;
    match g.clone().cholesky() {
        Some(c) => c.solve(&(&zt * y)),
        None => DMatrix::zeros(z.ncols(), y.ncols()),
    }
}

pub(crate) fn unpack(v: &[f64], p: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(p, k, &v[..p * k])
}

/// Extra parameters beyond the coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nuisance {
    None,
    Rho { rho: f64 },
    Shape { theta1: f64, theta2: f64 },
    EsagShape { gamma1: f64, gamma2: f64 },
}

impl Nuisance {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Nuisance::None => vec![],
            Nuisance::Rho { rho } => vec![rho],
            Nuisance::Shape { theta1, theta2 } => vec![theta1, theta2],
            Nuisance::EsagShape { gamma1, gamma2 } => vec![gamma1, gamma2],
        }
    }
}

fn serialize_rows<S: Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect();
    rows.serialize(s)
}

fn deserialize_rows<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<DMatrix<f64>, D::Error> {
    let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(serde::de::Error::custom("ragged coefficient rows"));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub model: String,
    /// p×2 (cos, sin) or p×3; serialized as a list of rows.
    #[serde(serialize_with = "serialize_rows", deserialize_with = "deserialize_rows")]
    pub coefficients: DMatrix<f64>,
    pub nuisance: Nuisance,
    /// Applied to the responses before the model; identity for circular fits.
    pub rotation: Rotation3,
    pub loglik: f64,
    /// Column-major coefficients followed by the nuisance values.
    pub parameter_names: Vec<String>,
    pub std_errors: Option<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub diagnostics: Vec<String>,
}

impl RegressionFit {
    /// Per-observation locations Bᵀxᵢ (rows).
    pub fn locations(&self, design: &DesignMatrix) -> DMatrix<f64> {
        design.locations(&self.coefficients)
    }

    /// Fitted angles atan2(μ₂ᵢ, μ₁ᵢ) of a circular fit.
    pub fn fitted_angles(&self, design: &DesignMatrix) -> Vec<f64> {
        let m = self.locations(design);
        (0..m.nrows()).map(|i| m[(i, 1)].atan2(m[(i, 0)])).collect()
    }
}

pub(crate) fn coefficient_names(p: usize, k: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(p * k);
    for j in 0..k {
        for a in 0..p {
            out.push(format!("beta{}[{}]", j + 1, a));
        }
    }
    out
}

/// Standard errors for (vec B, nuisance) on the original covariate scale.
pub(crate) fn regression_std_errors<F: Fn(&DMatrix<f64>, &[f64]) -> f64>(
    loglik: F,
    b: &DMatrix<f64>,
    nuisance: &[f64],
) -> std::result::Result<Vec<f64>, String> {
    let (p, k) = (b.nrows(), b.ncols());
    let mut x: Vec<f64> = b.as_slice().to_vec();
    x.extend_from_slice(nuisance);
    standard_errors(|v| loglik(&unpack(v, p, k), &v[p * k..]), &x)
}

/// Circular correlation Σsin(θᵢ−θ̄)sin(φᵢ−φ̄) / √(Σsin²(θᵢ−θ̄)·Σsin²(φᵢ−φ̄)) with θ̄, φ̄ the
/// sample mean directions.
pub fn circular_correlation(observed: &[f64], fitted: &[f64]) -> Result<f64> {
    if observed.len() != fitted.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} observed vs {} fitted angles",
            observed.len(),
            fitted.len()
        )));
    }
    if observed.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: observed.len(),
        });
    }
    let mean = |v: &[f64]| {
        let (s, c) = v.iter().fold((0.0, 0.0), |(s, c), t| (s + t.sin(), c + t.cos()));
        s.atan2(c)
    };
    let (tm, fm) = (mean(observed), mean(fitted));
    let (mut num, mut st, mut sf) = (0.0, 0.0, 0.0);
    for (t, f) in observed.iter().zip(fitted) {
        let a = (t - tm).sin();
        let b = (f - fm).sin();
        num += a * b;
        st += a * a;
        sf += b * b;
    }
    // a constant sequence leaves only rounding noise in the sines
    let floor = observed.len() as f64 * 1e-24;
    if st <= floor || sf <= floor {
        return Err(Error::ZeroVariance);
    }
    Ok((num / (st * sf).sqrt()).clamp(-1.0, 1.0))
}

/// Frobenius norm of the difference of two equally shaped matrices.
pub fn frobenius_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok((a - b).norm())
}

pub(crate) fn check_rows(design: &DesignMatrix, n: usize, needed: usize) -> Result<()> {
    if design.nrows() != n {
        return Err(Error::ShapeMismatch(format!(
            "{} responses but {} design rows",
            n,
            design.nrows()
        )));
    }
    if n <= needed {
        return Err(Error::TooFewObservations {
            needed: needed + 1,
            got: n,
        });
    }
    Ok(())
}

pub(crate) fn dvec(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}
