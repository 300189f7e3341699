//! Distributions on the unit sphere S²: the general spherical projected Cauchy (SPC),
//! its isotropic (SIPC) and elliptically symmetric (SESPC) special cases, and the
//! spherical Cauchy (SC), ESAG and IAG baselines.
//!
//! The closed forms are evaluated as G(u)/(2π²|Σ|^{1/2} B √Δ) with
//! G(u) = (1+u²)(π/2 + arctan u) + u and u = A/√Δ, which is algebraically the
//! two-arctangent expression but keeps full precision in the far tail.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector2, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{tangent_frame, TangentFrame3, UnitVector3};
use crate::special::{arctan2_bracket, cauchy_sphere_factor, ln_esag_factor, LN_2PI};

const LN_2PI2: f64 = 2.982_606_952_258_745_7; // ln(2π²)

/// General SPC parameters: location μ ∈ ℝ³ and a positive-definite scatter Σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpcParams {
    mu: Vector3<f64>,
    sigma: Matrix3<f64>,
    // Σ⁻¹ = RᵀR
    root_inv: Matrix3<f64>,
    ln_det: f64,
}

impl SpcParams {
    pub fn new(mu: Vector3<f64>, sigma: Matrix3<f64>) -> Result<Self> {
        if (sigma - sigma.transpose()).abs().max() > 1e-12 * sigma.abs().max().max(1.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let chol = sigma.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        let root_inv = l.try_inverse().ok_or(Error::NotPositiveDefinite)?;
        let ln_det = 2.0 * (0..3).map(|i| l[(i, i)].ln()).sum::<f64>();
        Ok(SpcParams {
            mu,
            sigma,
            root_inv,
            ln_det,
        })
    }

    pub fn mu(&self) -> Vector3<f64> {
        self.mu
    }

    pub fn sigma(&self) -> Matrix3<f64> {
        self.sigma
    }

    pub fn ln_pdf(&self, y: &Vector3<f64>) -> f64 {
        // with w = Ry, m = Rμ: A = w·m, B = ‖w‖², BΓ² − A² = ‖w × m‖²
        let w = self.root_inv * y;
        let m = self.root_inv * self.mu;
        let b = w.norm_squared();
        let a = w.dot(&m);
        let delta = b + w.cross(&m).norm_squared();
        cauchy_ln_pdf(a, b, delta, self.ln_det)
    }
}

/// log of G(u)/(2π²|Σ|^{1/2}B√Δ), u = A/√Δ.
fn cauchy_ln_pdf(a: f64, b: f64, delta: f64, ln_det: f64) -> f64 {
    let sd = delta.sqrt();
    cauchy_sphere_factor(a / sd).ln() - LN_2PI2 - 0.5 * ln_det - b.ln() - sd.ln()
}

/// SPC density, evaluated literally with the two-arctangent bracket on Δ = BΓ²+B−A².
pub fn spc_density(y: &UnitVector3, p: &SpcParams) -> Result<f64> {
    let yv = y.as_vector();
    let sinv = p.root_inv.transpose() * p.root_inv;
    let a = (yv.transpose() * sinv * p.mu)[0];
    let b = (yv.transpose() * sinv * yv)[0];
    let g2 = (p.mu.transpose() * sinv * p.mu)[0];
    let delta = b * g2 + b - a * a;
    if !(delta > 0.0) {
        return Err(Error::NumericalDomain(format!("nonpositive discriminant {delta:e}")));
    }
    let sd = delta.sqrt();
    if a / sd < -20.0 {
        // the literal bracket cancels catastrophically here
        return Ok(p.ln_pdf(yv).exp());
    }
    let num = b * (g2 + 1.0) * sd * arctan2_bracket(sd, a) + 2.0 * a * delta;
    Ok(num / (4.0 * PI * PI * p.ln_det.exp().sqrt() * b * delta * delta))
}

/// Isotropic SPC with location μ ∈ ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SipcParams {
    pub mu: Vector3<f64>,
}

impl SipcParams {
    pub fn new(mu: Vector3<f64>) -> Result<Self> {
        check_finite3("mu", &mu)?;
        Ok(SipcParams { mu })
    }

    pub fn gamma(&self) -> f64 {
        self.mu.norm()
    }

    pub fn ln_pdf(&self, y: &Vector3<f64>) -> f64 {
        let alpha = y.dot(&self.mu);
        // δ = γ² + 1 − α² = 1 + ‖y × μ‖²
        let delta = 1.0 + y.cross(&self.mu).norm_squared();
        cauchy_ln_pdf(alpha, 1.0, delta, 0.0)
    }
}

pub fn sipc_density(y: &UnitVector3, p: &SipcParams) -> f64 {
    let y = y.as_vector();
    let delta = 1.0 + y.cross(&p.mu).norm_squared();
    let sd = delta.sqrt();
    cauchy_sphere_factor(y.dot(&p.mu) / sd) / (2.0 * PI * PI * sd)
}

fn check_finite3(name: &'static str, v: &Vector3<f64>) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v.norm(),
            reason: "vector must be finite",
        })
    }
}

/// Elliptically symmetric SPC: Σμ = μ, |Σ| = 1, shape (θ₁, θ₂) on the ξ̃-frame of μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SespcParams {
    pub mu: Vector3<f64>,
    pub theta: Vector2<f64>,
}

impl SespcParams {
    /// Fails when θ ≠ 0 and μ has no ξ̃-frame (μ = 0 or μ on the first axis).
    pub fn new(mu: Vector3<f64>, theta: Vector2<f64>) -> Result<Self> {
        check_finite3("mu", &mu)?;
        if !(theta[0].is_finite() && theta[1].is_finite()) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta.norm(),
                reason: "shape parameters must be finite",
            });
        }
        if theta != Vector2::zeros() {
            tangent_frame(&mu)?;
        }
        Ok(SespcParams { mu, theta })
    }

    pub fn gamma(&self) -> f64 {
        self.mu.norm()
    }

    /// Pre-computes the frame so repeated evaluations are cheap.
    pub fn prepared(&self) -> PreparedShape {
        PreparedShape::new(&self.mu, &self.theta)
    }

    pub fn ln_pdf(&self, y: &Vector3<f64>) -> f64 {
        self.prepared().sespc_ln_pdf(y)
    }

    pub fn rho_psi(&self) -> (f64, f64) {
        rho_psi_from_theta(self.theta[0], self.theta[1])
    }
}

/// The ξ̃-frame of μ together with the quadratic-form coefficients of a
/// (θ₁, θ₂)-shaped inverse scatter. Shared by SESPC and ESAG.
#[derive(Debug, Clone, Copy)]
pub struct PreparedShape {
    mu: Vector3<f64>,
    gamma: f64,
    frame: Option<TangentFrame3>,
    theta: Vector2<f64>,
    root: f64,
}

impl PreparedShape {
    /// A nonzero shape on a location without a ξ̃-frame falls back to isotropy;
    /// the parameter constructors reject that case up front.
    pub fn new(mu: &Vector3<f64>, theta: &Vector2<f64>) -> Self {
        let isotropic = *theta == Vector2::zeros();
        let frame = if isotropic { None } else { tangent_frame(mu).ok() };
        PreparedShape {
            mu: *mu,
            gamma: mu.norm(),
            frame,
            theta: *theta,
            root: (theta.norm_squared() + 1.0).sqrt(),
        }
    }

    /// Like [`PreparedShape::new`] but fails when a nonzero shape has no frame.
    pub fn try_new(mu: &Vector3<f64>, theta: &Vector2<f64>) -> Result<Self> {
        if *theta != Vector2::zeros() {
            tangent_frame(mu)?;
        }
        Ok(PreparedShape::new(mu, theta))
    }

    /// Returns (yᵀΣ⁻¹y, α = yᵀμ, tangential part yᵀΣ⁻¹y − (yᵀξ₃)²).
    #[inline]
    fn forms(&self, y: &Vector3<f64>) -> (f64, f64, f64) {
        let alpha = y.dot(&self.mu);
        match &self.frame {
            Some(f) => {
                let a1 = y.dot(&f.xi1_tilde);
                let a2 = y.dot(&f.xi2_tilde);
                let a3 = y.dot(&f.xi3);
                let bt = self.root * (a1 * a1 + a2 * a2)
                    + self.theta[0] * (a1 * a1 - a2 * a2)
                    + 2.0 * self.theta[1] * a1 * a2;
                (a3 * a3 + bt, alpha, bt)
            }
            None => {
                let b = y.norm_squared();
                let bt = if self.gamma > 0.0 {
                    y.cross(&self.mu).norm_squared() / (self.gamma * self.gamma)
                } else {
                    b
                };
                (b, alpha, bt)
            }
        }
    }

    pub fn sespc_ln_pdf(&self, y: &Vector3<f64>) -> f64 {
        let (b, alpha, bt) = self.forms(y);
        // E = Bγ² + B − α² = B + γ²·(tangential part)
        let e = b + self.gamma * self.gamma * bt;
        cauchy_ln_pdf(alpha, b, e, 0.0)
    }

    pub fn esag_ln_pdf(&self, y: &Vector3<f64>) -> f64 {
        let (b, alpha, _) = self.forms(y);
        let t = alpha / b.sqrt();
        -LN_2PI - 1.5 * b.ln() - 0.5 * self.gamma * self.gamma + ln_esag_factor(t)
    }
}

/// Σ⁻¹ = I + θ₁(ξ̃₁ξ̃₁ᵀ − ξ̃₂ξ̃₂ᵀ) + θ₂(ξ̃₁ξ̃₂ᵀ + ξ̃₂ξ̃₁ᵀ) + (√(θ₁²+θ₂²+1) − 1)(ξ̃₁ξ̃₁ᵀ + ξ̃₂ξ̃₂ᵀ).
pub fn shape_inverse_scatter(mu: &Vector3<f64>, theta: &Vector2<f64>) -> Result<Matrix3<f64>> {
    if *theta == Vector2::zeros() {
        return Ok(Matrix3::identity());
    }
    let f = tangent_frame(mu)?;
    let (x1, x2) = (f.xi1_tilde, f.xi2_tilde);
    let p11 = x1 * x1.transpose();
    let p22 = x2 * x2.transpose();
    let p12 = x1 * x2.transpose() + x2 * x1.transpose();
    let root = (theta.norm_squared() + 1.0).sqrt();
    Ok(Matrix3::identity() + theta[0] * (p11 - p22) + theta[1] * p12 + (root - 1.0) * (p11 + p22))
}

pub fn sespc_inverse_scatter(p: &SespcParams) -> Result<Matrix3<f64>> {
    shape_inverse_scatter(&p.mu, &p.theta)
}

/// (θ₁, θ₂) = ½(ρ⁻¹ − ρ)(cos 2ψ, sin 2ψ) for ρ ∈ (0, 1].
pub fn theta_from_rho_psi(rho: f64, psi: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "rho must lie in (0, 1]",
        });
    }
    let k = 0.5 * (1.0 / rho - rho);
    let (s, c) = (2.0 * psi).sin_cos();
    Ok((k * c, k * s))
}

/// Inverse of [`theta_from_rho_psi`]; ψ is returned in (−π/2, π/2] and is 0 when θ = 0.
pub fn rho_psi_from_theta(theta1: f64, theta2: f64) -> (f64, f64) {
    let t = theta1.hypot(theta2);
    // ρ solves ½(1/ρ − ρ) = t; written as 1/(√(t²+1) + t) to avoid cancellation
    let rho = 1.0 / ((t * t + 1.0).sqrt() + t);
    let psi = if t == 0.0 {
        0.0
    } else {
        let half = 0.5 * theta2.atan2(theta1);
        if half <= -PI / 2.0 {
            half + PI
        } else {
            half
        }
    };
    (rho, psi)
}

pub fn sespc_density(y: &UnitVector3, p: &SespcParams) -> f64 {
    p.ln_pdf(y.as_vector()).exp()
}

/// Spherical Cauchy with mean direction μ ∈ S² and concentration λ ∈ [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScParams {
    pub mu: Vector3<f64>,
    pub lambda: f64,
}

impl ScParams {
    pub fn new(mu: UnitVector3, lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "lambda must lie in [0, 1)",
            });
        }
        Ok(ScParams {
            mu: mu.into_inner(),
            lambda,
        })
    }

    /// log of ((1−λ²)/(1+λ²−2λyᵀμ))²/(4π).
    pub fn ln_pdf(&self, y: &Vector3<f64>) -> f64 {
        let l = self.lambda;
        let t = y.dot(&self.mu);
        2.0 * ((1.0 - l * l) / (1.0 + l * l - 2.0 * l * t)).ln() - (4.0 * PI).ln()
    }
}

pub fn sc_density(y: &UnitVector3, p: &ScParams) -> f64 {
    p.ln_pdf(y.as_vector()).exp()
}

/// The SC kernel with the λ dropped from the cross term, ((1−λ²)/(1+λ²−2yᵀμ))²/(4π).
/// Kept only so the normalization self-test can show it is not a density.
pub fn sc_density_unscaled_kernel(y: &Vector3<f64>, mu: &Vector3<f64>, lambda: f64) -> f64 {
    let l = lambda;
    let r = (1.0 - l * l) / (1.0 + l * l - 2.0 * y.dot(mu));
    r * r / (4.0 * PI)
}

/// ESAG with mean μ and shape (γ₁, γ₂); V⁻¹ is built like the SESPC Σ⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsagParams {
    pub mu: Vector3<f64>,
    pub gamma: Vector2<f64>,
}

impl EsagParams {
    pub fn new(mu: Vector3<f64>, gamma: Vector2<f64>) -> Result<Self> {
        let s = SespcParams::new(mu, gamma)?;
        Ok(EsagParams {
            mu: s.mu,
            gamma: s.theta,
        })
    }

    pub fn iag(mu: Vector3<f64>) -> Result<Self> {
        EsagParams::new(mu, Vector2::zeros())
    }

    pub fn prepared(&self) -> PreparedShape {
        PreparedShape::new(&self.mu, &self.gamma)
    }

    pub fn ln_pdf(&self, y: &Vector3<f64>) -> f64 {
        self.prepared().esag_ln_pdf(y)
    }
}

pub fn esag_density(y: &UnitVector3, p: &EsagParams) -> f64 {
    p.ln_pdf(y.as_vector()).exp()
}

/// IAG density: ESAG with γ = (0, 0).
pub fn iag_density(y: &UnitVector3, mu: &Vector3<f64>) -> f64 {
    let g2 = mu.norm_squared();
    let t = y.as_vector().dot(mu);
    (-LN_2PI - 0.5 * g2 + ln_esag_factor(t)).exp()
}

fn normal3<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    Vector3::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

fn normalize_or_redraw<R: Rng + ?Sized, F: FnMut(&mut R) -> Vector3<f64>>(rng: &mut R, mut draw: F) -> Vector3<f64> {
    loop {
        let x = draw(rng);
        let n = x.norm();
        if n > 0.0 && n.is_finite() {
            return x / n;
        }
    }
}

fn cholesky_of_inverse(sinv: &Matrix3<f64>) -> Matrix3<f64> {
    let sigma = sinv.try_inverse().expect("shape matrix is invertible");
    let sigma = 0.5 * (sigma + sigma.transpose());
    sigma.cholesky().expect("shape matrix is positive definite").l()
}

/// Projects trivariate Cauchy draws μ + Lz/|g| (LLᵀ = Σ) onto S².
pub fn sample_spc<R: Rng + ?Sized>(p: &SpcParams, n: usize, rng: &mut R) -> Vec<Vector3<f64>> {
    let l = p.sigma.cholesky().expect("validated").l();
    (0..n)
        .map(|_| {
            normalize_or_redraw(rng, |r| {
                let g: f64 = r.sample(StandardNormal);
                p.mu + l * normal3(r) / g.abs()
            })
        })
        .collect()
}

pub fn sample_sipc<R: Rng + ?Sized>(p: &SipcParams, n: usize, rng: &mut R) -> Vec<Vector3<f64>> {
    (0..n)
        .map(|_| {
            normalize_or_redraw(rng, |r| {
                let g: f64 = r.sample(StandardNormal);
                p.mu + normal3(r) / g.abs()
            })
        })
        .collect()
}

pub fn sample_sespc<R: Rng + ?Sized>(p: &SespcParams, n: usize, rng: &mut R) -> Vec<Vector3<f64>> {
    let l = cholesky_of_inverse(&sespc_inverse_scatter(p).expect("validated"));
    (0..n)
        .map(|_| {
            normalize_or_redraw(rng, |r| {
                let g: f64 = r.sample(StandardNormal);
                p.mu + l * normal3(r) / g.abs()
            })
        })
        .collect()
}

pub fn sample_esag<R: Rng + ?Sized>(p: &EsagParams, n: usize, rng: &mut R) -> Vec<Vector3<f64>> {
    let l = cholesky_of_inverse(&shape_inverse_scatter(&p.mu, &p.gamma).expect("validated"));
    (0..n)
        .map(|_| normalize_or_redraw(rng, |r| p.mu + l * normal3(r)))
        .collect()
}

/// Inverse of the marginal CDF of t = yᵀμ under SC,
/// F(t) = (1−λ²)²/(4λ)·[1/(1+λ²−2λt) − 1/(1+λ)²], solved for t.
pub fn sc_marginal_quantile(u: f64, lambda: f64) -> f64 {
    let l = lambda;
    let t = 2.0 * u * (1.0 + l) * (1.0 + l) / (4.0 * l * u + (1.0 - l) * (1.0 - l)) - 1.0;
    t.clamp(-1.0, 1.0)
}

/// Tangent-normal construction: t from the marginal quantile, azimuth uniform.
pub fn sample_sc<R: Rng + ?Sized>(p: &ScParams, n: usize, rng: &mut R) -> Vec<Vector3<f64>> {
    let (e1, e2) = orthonormal_complement(&p.mu);
    (0..n)
        .map(|_| {
            let t = sc_marginal_quantile(rng.random::<f64>(), p.lambda);
            let phi = 2.0 * PI * rng.random::<f64>();
            let s = (1.0 - t * t).max(0.0).sqrt();
            let y = p.mu * t + (e1 * phi.cos() + e2 * phi.sin()) * s;
            y / y.norm()
        })
        .collect()
}

/// Two unit vectors completing `m` (unit) to a right-handed orthonormal basis.
pub fn orthonormal_complement(m: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if m[0].abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (helper - m * m.dot(&helper)).normalize();
    let e2 = m.cross(&e1);
    (e1, e2)
}

/// Counts local maxima of a spherical density on a colatitude × longitude grid whose
/// pole is placed at `pole`. A numeric diagnostic only.
pub fn grid_mode_count<F: Fn(&Vector3<f64>) -> f64>(f: F, pole: &Vector3<f64>, n_colat: usize, n_lon: usize) -> usize {
    let rot = crate::geometry::rotation_from_pole(pole);
    let point = |i: usize, j: usize| {
        let colat = PI * (i as f64 + 0.5) / n_colat as f64;
        let lon = 2.0 * PI * j as f64 / n_lon as f64;
        rot * crate::geometry::sphere_point(colat, lon)
    };
    let mut vals = vec![0.0; n_colat * n_lon];
    for i in 0..n_colat {
        for j in 0..n_lon {
            vals[i * n_lon + j] = f(&point(i, j));
        }
    }
    let mut count = 0;
    for i in 0..n_colat {
        for j in 0..n_lon {
            let v = vals[i * n_lon + j];
            let mut is_max = true;
            'nb: for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ii = i as i64 + di;
                    let (ii, jj) = if ii < 0 || ii >= n_colat as i64 {
                        // across the pole: same ring, opposite longitude
                        (i as i64, (j as i64 + dj + n_lon as i64 / 2).rem_euclid(n_lon as i64))
                    } else {
                        (ii, (j as i64 + dj).rem_euclid(n_lon as i64))
                    };
                    let k = ii as usize * n_lon + jj as usize;
                    // ties go to the lower index so a flat top counts once
                    if vals[k] > v || (vals[k] == v && k < i * n_lon + j) {
                        is_max = false;
                        break 'nb;
                    }
                }
            }
            if is_max {
                count += 1;
            }
        }
    }
    count
}

/// Tagged parameter set for one of the spherical models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum SphericalModel {
    Sipc(SipcParams),
    Sespc(SespcParams),
    Sc(ScParams),
    Esag(EsagParams),
    Iag { mu: Vector3<f64> },
}

impl SphericalModel {
    pub fn ln_pdf(&self, y: &Vector3<f64>) -> f64 {
        match self {
            SphericalModel::Sipc(p) => p.ln_pdf(y),
            SphericalModel::Sespc(p) => p.ln_pdf(y),
            SphericalModel::Sc(p) => p.ln_pdf(y),
            SphericalModel::Esag(p) => p.ln_pdf(y),
            SphericalModel::Iag { mu } => -LN_2PI - 0.5 * mu.norm_squared() + ln_esag_factor(y.dot(mu)),
        }
    }

    pub fn pdf(&self, y: &Vector3<f64>) -> f64 {
        self.ln_pdf(y).exp()
    }

    /// A log-density closure with any per-parameter work done once.
    pub fn ln_pdf_fn(&self) -> Box<dyn Fn(&Vector3<f64>) -> f64 + Send + Sync> {
        match *self {
            SphericalModel::Sespc(p) => {
                let s = p.prepared();
                Box::new(move |y| s.sespc_ln_pdf(y))
            }
            SphericalModel::Esag(p) => {
                let s = p.prepared();
                Box::new(move |y| s.esag_ln_pdf(y))
            }
            m => Box::new(move |y| m.ln_pdf(y)),
        }
    }

    /// Location vector (unit for SC), used as the pole of integration grids.
    pub fn location(&self) -> Vector3<f64> {
        match self {
            SphericalModel::Sipc(p) => p.mu,
            SphericalModel::Sespc(p) => p.mu,
            SphericalModel::Sc(p) => p.mu,
            SphericalModel::Esag(p) => p.mu,
            SphericalModel::Iag { mu } => *mu,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vector3<f64>> {
        match self {
            SphericalModel::Sipc(p) => sample_sipc(p, n, rng),
            SphericalModel::Sespc(p) => sample_sespc(p, n, rng),
            SphericalModel::Sc(p) => sample_sc(p, n, rng),
            SphericalModel::Esag(p) => sample_esag(p, n, rng),
            SphericalModel::Iag { mu } => {
                let p = EsagParams::iag(*mu).expect("finite");
                sample_esag(&p, n, rng)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SphericalModel::Sipc(_) => "sipc",
            SphericalModel::Sespc(_) => "sespc",
            SphericalModel::Sc(_) => "sc",
            SphericalModel::Esag(_) => "esag",
            SphericalModel::Iag { .. } => "iag",
        }
    }
}
