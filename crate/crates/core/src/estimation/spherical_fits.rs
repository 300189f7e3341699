//! Spherical model fits: SIPC, SESPC, IAG, ESAG and SC.

use nalgebra::{DMatrix, Vector2, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::optim::{nelder_mead, OptimizerConfig};
use super::{inverse_information, names, standard_errors, FitResult, FittedModel};
use crate::error::{Error, Result};
use crate::geometry::UnitVector3;
use crate::special::{ln_esag_factor, LN_2PI};
use crate::spherical::{EsagParams, PreparedShape, ScParams, SespcParams, SipcParams, SphericalModel};

fn check_points(data: &[Vector3<f64>], needed: usize) -> Result<()> {
    if data.len() < needed {
        return Err(Error::TooFewObservations {
            needed,
            got: data.len(),
        });
    }
    for y in data {
        if !y.iter().all(|v| v.is_finite()) || (y.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Input(format!("not a unit vector: {y:?}")));
        }
    }
    Ok(())
}

/// Normalised sample mean and mean resultant length; the mean direction is +z when
/// the resultant vanishes.
pub fn spherical_mean(data: &[Vector3<f64>]) -> (Vector3<f64>, f64) {
    let s: Vector3<f64> = data.iter().sum();
    let r = s.norm();
    let n = data.len().max(1) as f64;
    if r > 0.0 {
        (s / r, r / n)
    } else {
        (Vector3::z(), 0.0)
    }
}

pub fn sipc_loglik(data: &[Vector3<f64>], mu: &Vector3<f64>) -> f64 {
    let p = SipcParams { mu: *mu };
    data.iter().map(|y| p.ln_pdf(y)).sum()
}

/// SESPC log-likelihood; −∞ when a nonzero shape sits on a location without a frame.
pub fn sespc_loglik(data: &[Vector3<f64>], mu: &Vector3<f64>, theta: &Vector2<f64>) -> f64 {
    match PreparedShape::try_new(mu, theta) {
        Ok(s) => data.iter().map(|y| s.sespc_ln_pdf(y)).sum(),
        Err(_) => f64::NEG_INFINITY,
    }
}

pub fn esag_loglik(data: &[Vector3<f64>], mu: &Vector3<f64>, gamma: &Vector2<f64>) -> f64 {
    match PreparedShape::try_new(mu, gamma) {
        Ok(s) => data.iter().map(|y| s.esag_ln_pdf(y)).sum(),
        Err(_) => f64::NEG_INFINITY,
    }
}

pub fn iag_loglik(data: &[Vector3<f64>], mu: &Vector3<f64>) -> f64 {
    let g2 = mu.norm_squared();
    data.iter()
        .map(|y| -LN_2PI - 0.5 * g2 + ln_esag_factor(y.dot(mu)))
        .sum()
}

pub fn sc_loglik(data: &[Vector3<f64>], mean: &Vector3<f64>, lambda: f64) -> f64 {
    if !(0.0..1.0).contains(&lambda) {
        return f64::NEG_INFINITY;
    }
    let p = ScParams { mu: *mean, lambda };
    data.iter().map(|y| p.ln_pdf(y)).sum()
}

fn v3(x: &[f64]) -> Vector3<f64> {
    Vector3::new(x[0], x[1], x[2])
}

fn fit_location<F: Fn(&Vector3<f64>) -> f64>(
    loglik: F,
    starts: &[Vector3<f64>],
    cfg: &OptimizerConfig,
) -> Result<(Vector3<f64>, f64, bool, usize)> {
    let mut best: Option<(Vector3<f64>, f64, bool)> = None;
    let mut iterations = 0;
    for s in starts {
        let m = nelder_mead(|x| -loglik(&v3(x)), s.as_slice(), cfg)?;
        iterations += m.iterations;
        if best.as_ref().is_none_or(|b| -m.value > b.1) {
            best = Some((v3(&m.x), -m.value, m.converged));
        }
    }
    let (mu, ll, ok) = best.expect("at least one start");
    Ok((mu, ll, ok, iterations))
}

fn location_fit_result(
    model: SphericalModel,
    mu: Vector3<f64>,
    ll: f64,
    converged: bool,
    iterations: usize,
    starts: usize,
    loglik: impl Fn(&Vector3<f64>) -> f64,
) -> FitResult {
    let mut fit = FitResult {
        model: FittedModel::Spherical(model),
        names: names(&["mu1", "mu2", "mu3"]),
        estimates: vec![mu[0], mu[1], mu[2]],
        std_errors: None,
        loglik: ll,
        converged,
        iterations,
        starts_used: starts,
        diagnostics: vec![],
    };
    match standard_errors(|x| loglik(&v3(x)), mu.as_slice()) {
        Ok(se) => fit.std_errors = Some(se),
        Err(e) => fit.diagnostics.push(e),
    }
    fit
}

/// SIPC fit over μ ∈ ℝ³ started at the sample mean direction with unit norm.
pub fn fit_sipc(data: &[Vector3<f64>], cfg: &OptimizerConfig) -> Result<FitResult> {
    check_points(data, 3)?;
    let (m, _) = spherical_mean(data);
    let ll = |mu: &Vector3<f64>| sipc_loglik(data, mu);
    let (mu, l, ok, it) = fit_location(ll, &[m], cfg)?;
    Ok(location_fit_result(
        SphericalModel::Sipc(SipcParams::new(mu)?),
        mu,
        l,
        ok,
        it,
        1,
        ll,
    ))
}

/// IAG fit over μ ∈ ℝ³.
pub fn fit_iag(data: &[Vector3<f64>], cfg: &OptimizerConfig) -> Result<FitResult> {
    check_points(data, 3)?;
    let (m, _) = spherical_mean(data);
    let ll = |mu: &Vector3<f64>| iag_loglik(data, mu);
    let (mu, l, ok, it) = fit_location(ll, &[m], cfg)?;
    Ok(location_fit_result(SphericalModel::Iag { mu }, mu, l, ok, it, 1, ll))
}

/// Shared driver for the five-parameter (μ, shape) models. Starts: the isotropic fit
/// with zero shape, the mean direction with zero shape, and `restarts − 1` random
/// shapes at the isotropic location; the three best by log-likelihood are refined.
fn fit_shaped<L: Fn(&Vector3<f64>, &Vector2<f64>) -> f64>(
    loglik: L,
    iso_mu: Vector3<f64>,
    mean_dir: Vector3<f64>,
    cfg: &OptimizerConfig,
) -> Result<(Vec<f64>, f64, bool, usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut starts: Vec<[f64; 5]> = vec![
        [iso_mu[0], iso_mu[1], iso_mu[2], 0.0, 0.0],
        [mean_dir[0], mean_dir[1], mean_dir[2], 0.0, 0.0],
    ];
    for _ in 1..cfg.restarts {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        starts.push([iso_mu[0], iso_mu[1], iso_mu[2], a, b]);
    }
    let obj = |x: &[f64]| -loglik(&v3(x), &Vector2::new(x[3], x[4]));
    let mut scored: Vec<(f64, usize)> = starts.iter().enumerate().map(|(i, s)| (obj(s), i)).collect();
    scored.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut iterations = 0;
    let mut used = 0;
    // the isotropic start is always refined so the nested fit can never lose
    let mut chosen: Vec<usize> = scored.iter().filter(|s| s.0.is_finite()).take(3).map(|s| s.1).collect();
    if !chosen.contains(&0) {
        chosen.push(0);
    }
    for i in chosen {
        let m = nelder_mead(obj, &starts[i], cfg)?;
        used += 1;
        iterations += m.iterations;
        if best.as_ref().is_none_or(|b| m.value < b.1) {
            best = Some((m.x, m.value, m.converged));
        }
    }
    let (x, v, ok) = best.expect("isotropic start is refined");
    Ok((x, -v, ok, iterations, used.max(cfg.restarts)))
}

fn shaped_result(
    model: SphericalModel,
    shape_names: [&str; 2],
    x: &[f64],
    ll: f64,
    converged: bool,
    iterations: usize,
    starts: usize,
    loglik: impl Fn(&Vector3<f64>, &Vector2<f64>) -> f64,
) -> FitResult {
    let mut fit = FitResult {
        model: FittedModel::Spherical(model),
        names: names(&["mu1", "mu2", "mu3", shape_names[0], shape_names[1]]),
        estimates: x.to_vec(),
        std_errors: None,
        loglik: ll,
        converged,
        iterations,
        starts_used: starts,
        diagnostics: vec![],
    };
    match standard_errors(|p| loglik(&v3(p), &Vector2::new(p[3], p[4])), x) {
        Ok(se) => fit.std_errors = Some(se),
        Err(e) => fit.diagnostics.push(e),
    }
    fit
}

/// SESPC fit over unconstrained (μ, θ₁, θ₂).
pub fn fit_sespc(data: &[Vector3<f64>], cfg: &OptimizerConfig) -> Result<FitResult> {
    check_points(data, 5)?;
    cfg.validate()?;
    let iso = fit_sipc(data, cfg)?;
    let (m, _) = spherical_mean(data);
    let ll = |mu: &Vector3<f64>, th: &Vector2<f64>| sespc_loglik(data, mu, th);
    let (x, l, ok, it, used) = fit_shaped(ll, v3(&iso.estimates), m, cfg)?;
    let p = SespcParams::new(v3(&x), Vector2::new(x[3], x[4]))?;
    let mut fit = shaped_result(
        SphericalModel::Sespc(p),
        ["theta1", "theta2"],
        &x,
        l,
        ok,
        it + iso.iterations,
        used,
        ll,
    );
    let (rho, psi) = p.rho_psi();
    fit.diagnostics.push(format!("rho = {rho:.6}, psi = {psi:.6}"));
    Ok(fit)
}

/// ESAG fit over unconstrained (μ, γ₁, γ₂).
pub fn fit_esag(data: &[Vector3<f64>], cfg: &OptimizerConfig) -> Result<FitResult> {
    check_points(data, 5)?;
    cfg.validate()?;
    let iso = fit_iag(data, cfg)?;
    let (m, _) = spherical_mean(data);
    let ll = |mu: &Vector3<f64>, g: &Vector2<f64>| esag_loglik(data, mu, g);
    let (x, l, ok, it, used) = fit_shaped(ll, v3(&iso.estimates), m, cfg)?;
    let p = EsagParams::new(v3(&x), Vector2::new(x[3], x[4]))?;
    Ok(shaped_result(
        SphericalModel::Esag(p),
        ["gamma1", "gamma2"],
        &x,
        l,
        ok,
        it + iso.iterations,
        used,
        ll,
    ))
}

/// Maps w ∈ ℝ³ into the open unit ball, v = w·tanh‖w‖/‖w‖.
fn to_ball(w: &[f64]) -> Vector3<f64> {
    let v = v3(w);
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        v * (n.tanh() / n)
    }
}

/// SC fit over v = λm in the open unit ball. Standard errors for (m, λ) come from the
/// delta method applied to the inverse information of v.
pub fn fit_sc(data: &[Vector3<f64>], cfg: &OptimizerConfig) -> Result<FitResult> {
    check_points(data, 3)?;
    let (m0, rbar) = spherical_mean(data);
    let l0 = rbar.clamp(0.05, 0.95);
    let w0 = m0 * l0.atanh();
    let ll_v = |v: &Vector3<f64>| {
        let l = v.norm();
        if !(l < 1.0) {
            return f64::NEG_INFINITY;
        }
        let m = if l > 0.0 { v / l } else { Vector3::z() };
        sc_loglik(data, &m, l)
    };
    let m = nelder_mead(|x| -ll_v(&to_ball(x)), w0.as_slice(), cfg)?;
    let v = to_ball(&m.x);
    let lambda = v.norm();
    let mean = if lambda > 0.0 { v / lambda } else { Vector3::z() };
    let p = ScParams::new(UnitVector3::normalize(mean)?, lambda)?;
    let mut fit = FitResult {
        model: FittedModel::Spherical(SphericalModel::Sc(p)),
        names: names(&["m1", "m2", "m3", "lambda"]),
        estimates: vec![mean[0], mean[1], mean[2], lambda],
        std_errors: None,
        loglik: -m.value,
        converged: m.converged,
        iterations: m.iterations,
        starts_used: 1,
        diagnostics: vec![],
    };
    match inverse_information(|x| ll_v(&v3(x)), v.as_slice()) {
        Ok(cov_v) => {
            // d m/dv = (I − mmᵀ)/λ, dλ/dv = mᵀ
            let dm = (nalgebra::Matrix3::identity() - mean * mean.transpose()) / lambda;
            let j = DMatrix::from_fn(4, 3, |r, c| if r < 3 { dm[(r, c)] } else { mean[c] });
            let cov = &j * cov_v * j.transpose();
            fit.std_errors = Some((0..4).map(|i| cov[(i, i)].max(0.0).sqrt()).collect());
        }
        Err(e) => fit.diagnostics.push(e),
    }
    Ok(fit)
}

/// Dispatch by model name: `sipc`, `sespc`, `iag`, `esag` or `sc`.
pub fn fit_spherical(model: &str, data: &[Vector3<f64>], cfg: &OptimizerConfig) -> Result<FitResult> {
    match model {
        "sipc" => fit_sipc(data, cfg),
        "sespc" => fit_sespc(data, cfg),
        "iag" => fit_iag(data, cfg),
        "esag" => fit_esag(data, cfg),
        "sc" => fit_sc(data, cfg),
        other => Err(Error::Input(format!("unknown spherical model '{other}'"))),
    }
}
