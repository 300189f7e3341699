//! Circular model fits: CIPC (Newton–Raphson), GCPC (profile then joint simplex),
//! wrapped Cauchy and projected normal.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::derivatives::cipc_mu_derivs;
use super::optim::{brent_minimize, nelder_mead, OptimizerConfig};
use super::{attach_std_errors, names, FitResult, FittedModel};
use crate::circular::{
    cipc_denominator, gcpc_ln_denominator, pn_ln_pdf_vec, CipcParams, CircularModel, GcpcParams, PnParams, WcParams,
};
use crate::error::{Error, Result};
use crate::special::LN_2PI;

fn check_angles(data: &[f64], needed: usize) -> Result<()> {
    if data.len() < needed {
        return Err(Error::TooFewObservations {
            needed,
            got: data.len(),
        });
    }
    if data.iter().any(|t| !t.is_finite()) {
        return Err(Error::Input("angles must be finite".into()));
    }
    Ok(())
}

pub(crate) fn unit_pairs(data: &[f64]) -> Vec<Vector2<f64>> {
    data.iter().map(|t| Vector2::new(t.cos(), t.sin())).collect()
}

/// Sample mean direction (radians) and mean resultant length.
pub fn circular_mean(data: &[f64]) -> (f64, f64) {
    let (s, c) = data.iter().fold((0.0, 0.0), |(s, c), t| (s + t.sin(), c + t.cos()));
    let n = data.len().max(1) as f64;
    (s.atan2(c), (s * s + c * c).sqrt() / n)
}

pub fn cipc_loglik(data: &[f64], mu: &Vector2<f64>) -> f64 {
    cipc_loglik_units(&unit_pairs(data), mu)
}

pub(crate) fn cipc_loglik_units(ys: &[Vector2<f64>], mu: &Vector2<f64>) -> f64 {
    -ys.iter().map(|y| cipc_denominator(*mu, *y).ln()).sum::<f64>() - ys.len() as f64 * LN_2PI
}

pub fn gcpc_loglik(data: &[f64], p: &GcpcParams) -> f64 {
    gcpc_loglik_units(&unit_pairs(data), &p.mu, p.rho)
}

/// GCPC log-likelihood from (cos θᵢ, sin θᵢ); −∞ outside the parameter space.
pub(crate) fn gcpc_loglik_units(ys: &[Vector2<f64>], mu: &Vector2<f64>, rho: f64) -> f64 {
    let g = mu.norm();
    if !(g > 0.0 && rho > 0.0 && g.is_finite() && rho.is_finite()) {
        return f64::NEG_INFINITY;
    }
    let (cw, sw) = (mu[0] / g, mu[1] / g);
    let mut sum = 0.0;
    for y in ys {
        let c = y[0] * cw + y[1] * sw;
        let s = y[1] * cw - y[0] * sw;
        sum += gcpc_ln_denominator(g, c, s, rho);
    }
    let n = ys.len() as f64;
    -n * LN_2PI - 0.5 * n * rho.ln() - sum
}

pub fn wc_loglik(data: &[f64], p: &WcParams) -> f64 {
    data.iter().map(|&t| p.ln_pdf(t)).sum()
}

pub fn pn_loglik(data: &[f64], mu: &Vector2<f64>) -> f64 {
    unit_pairs(data).iter().map(|y| pn_ln_pdf_vec(mu, y)).sum()
}

/// Newton–Raphson for the CIPC location vector using the analytic gradient and Hessian,
/// with step halving. Where the Hessian is not negative definite it is shifted by a
/// multiple of the identity. Falls back to the simplex if the iteration stalls.
pub fn newton_raphson_cipc(data: &[f64], start: Vector2<f64>) -> Result<FitResult> {
    check_angles(data, 2)?;
    let ys = unit_pairs(data);
    let mut mu = start;
    let mut d = cipc_mu_derivs(data, &mu);
    let mut diagnostics = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let grad_tol = 1e-8;
    let mut damped_steps = 0;
    for it in 0..200 {
        iterations = it;
        let prev_grad = d.gradient.norm();
        if d.gradient.norm() < grad_tol {
            converged = true;
            break;
        }
        // damp the Hessian towards a multiple of the identity until it is negative definite
        let neg_h: Matrix2<f64> = -d.hessian;
        let mut tau = 0.0;
        let scale = neg_h.abs().max().max(1e-12);
        let step = loop {
            if let Some(ch) = (neg_h + Matrix2::identity() * tau).cholesky() {
                break Some(ch.solve(&d.gradient));
            }
            tau = if tau == 0.0 { 1e-6 * scale } else { tau * 4.0 };
            if tau > 1e12 * scale {
                break None;
            }
        };
        if tau > 0.0 && damped_steps == 0 {
            diagnostics.push("indefinite Hessian on the Newton path; damped steps used".to_string());
        }
        if tau > 0.0 {
            damped_steps += 1;
        }
        let Some(step) = step else {
            break;
        };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let cand = mu + step * t;
            let ll = cipc_loglik_units(&ys, &cand);
            // near the optimum the change in ℓ drops below its rounding noise
            if ll >= d.loglik - 64.0 * f64::EPSILON * d.loglik.abs() {
                mu = cand;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        d = cipc_mu_derivs(data, &mu);
        if moved && d.gradient.norm() >= prev_grad && t < 1.0 {
            converged = d.gradient.norm() < 1e-6 * data.len() as f64;
            break;
        }
        if !moved {
            // no ascent at machine resolution
            converged = d.gradient.norm() < 1e-6 * data.len() as f64;
            break;
        }
    }
    if !converged {
        diagnostics.push("Newton–Raphson did not converge; simplex fallback used".to_string());
        let cfg = OptimizerConfig {
            tolerance: 1e-12,
            ..Default::default()
        };
        let m = nelder_mead(
            |x| -cipc_loglik_units(&ys, &Vector2::new(x[0], x[1])),
            &[mu[0], mu[1]],
            &cfg,
        )?;
        mu = Vector2::new(m.x[0], m.x[1]);
        iterations += m.iterations;
        converged = m.converged;
        d = cipc_mu_derivs(data, &mu);
    }
    let mut fit = FitResult {
        model: FittedModel::Circular(CircularModel::Cipc(CipcParams::new(mu)?)),
        names: names(&["mu1", "mu2"]),
        estimates: vec![mu[0], mu[1]],
        std_errors: None,
        loglik: d.loglik,
        converged,
        iterations,
        starts_used: 1,
        diagnostics,
    };
    attach_std_errors(
        &mut fit,
        |x| cipc_loglik_units(&ys, &Vector2::new(x[0], x[1])),
        &[mu[0], mu[1]],
    );
    Ok(fit)
}

/// CIPC fit started from the sample mean direction with unit concentration.
pub fn fit_cipc(data: &[f64], _cfg: &OptimizerConfig) -> Result<FitResult> {
    check_angles(data, 2)?;
    let (w, _) = circular_mean(data);
    newton_raphson_cipc(data, Vector2::new(w.cos(), w.sin()))
}

/// CIPC fit by the simplex only, in the location-vector parameterisation.
pub fn fit_cipc_simplex(data: &[f64], cfg: &OptimizerConfig) -> Result<FitResult> {
    check_angles(data, 2)?;
    let ys = unit_pairs(data);
    let (w, _) = circular_mean(data);
    let m = nelder_mead(
        |x| -cipc_loglik_units(&ys, &Vector2::new(x[0], x[1])),
        &[w.cos(), w.sin()],
        cfg,
    )?;
    let mu = Vector2::new(m.x[0], m.x[1]);
    Ok(FitResult {
        model: FittedModel::Circular(CircularModel::Cipc(CipcParams::new(mu)?)),
        names: names(&["mu1", "mu2"]),
        estimates: m.x.clone(),
        std_errors: None,
        loglik: -m.value,
        converged: m.converged,
        iterations: m.iterations,
        starts_used: 1,
        diagnostics: vec![],
    })
}

/// Profile log-likelihood of the GCPC at a fixed ρ, maximised over μ.
struct GcpcProfile<'a> {
    ys: &'a [Vector2<f64>],
    candidates: Vec<Vector2<f64>>,
    inner: OptimizerConfig,
    evaluations: usize,
}

impl GcpcProfile<'_> {
    fn maximise(&mut self, rho: f64, warm: &Vector2<f64>) -> (f64, Vector2<f64>) {
        let ys = self.ys;
        let mut best = *warm;
        let mut best_ll = gcpc_loglik_units(ys, warm, rho);
        for c in &self.candidates {
            let ll = gcpc_loglik_units(ys, c, rho);
            if ll > best_ll {
                best_ll = ll;
                best = *c;
            }
        }
        let obj = |x: &[f64]| -gcpc_loglik_units(ys, &Vector2::new(x[0], x[1]), rho);
        match nelder_mead(obj, &[best[0], best[1]], &self.inner) {
            Ok(m) => {
                self.evaluations += m.iterations;
                if -m.value >= best_ll {
                    (-m.value, Vector2::new(m.x[0], m.x[1]))
                } else {
                    (best_ll, best)
                }
            }
            Err(_) => (best_ll, best),
        }
    }
}

/// GCPC fit. Stage 1 maximises the profile log-likelihood over log ρ, where each profile
/// point screens `cfg.restarts` random location vectors together with warm and CIPC starts.
/// Stage 2 refines (μ₁, μ₂, log ρ) jointly from the profile optimum.
pub fn fit_gcpc(data: &[f64], cfg: &OptimizerConfig) -> Result<FitResult> {
    fit_gcpc_range(data, cfg, RhoRange::AtMostOne)
}

/// Admissible range of the GCPC scale ratio during fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RhoRange {
    /// 0 < ρ ≤ 1, so ρ = 1 sits on the boundary
    AtMostOne,
    /// 0 < ρ < ∞
    Positive,
}

impl RhoRange {
    pub(crate) fn log_grid(self) -> (Vec<f64>, usize) {
        match self {
            RhoRange::AtMostOne => ((-10..=0).map(|k| 0.5 * k as f64).collect(), 10),
            RhoRange::Positive => ((-10..=10).map(|k| 0.5 * k as f64).collect(), 10),
        }
    }

    /// Maps an unconstrained coordinate to log ρ.
    pub(crate) fn to_log(self, x: f64) -> f64 {
        match self {
            RhoRange::AtMostOne => x.min(0.0),
            RhoRange::Positive => x,
        }
    }
}

pub fn fit_gcpc_range(data: &[f64], cfg: &OptimizerConfig, range: RhoRange) -> Result<FitResult> {
    check_angles(data, 3)?;
    cfg.validate()?;
    let ys = unit_pairs(data);
    let cipc = fit_cipc(data, cfg)?;
    let mut mu_c = Vector2::new(cipc.estimates[0], cipc.estimates[1]);
    if mu_c.norm() < 1e-8 {
        mu_c = Vector2::new(1e-3, 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g0 = mu_c.norm().max(0.5);
    let mut candidates = vec![mu_c];
    for _ in 1..cfg.restarts {
        let a = rng.random::<f64>() * 2.0 * PI;
        let r = g0 * (rng.random::<f64>() * 3.0 - 1.5).exp();
        candidates.push(Vector2::new(r * a.cos(), r * a.sin()));
    }
    let mut prof = GcpcProfile {
        ys: &ys,
        candidates,
        inner: OptimizerConfig {
            tolerance: cfg.tolerance.max(1e-10),
            ..*cfg
        },
        evaluations: 0,
    };
    // coarse grid walked outward from ρ = 1 so warm starts follow the ridge
    let (grid, centre) = range.log_grid();
    let mut values = vec![(f64::NEG_INFINITY, mu_c); grid.len()];
    values[centre] = prof.maximise(1.0, &mu_c);
    for k in (0..centre).rev() {
        let warm = values[k + 1].1;
        values[k] = prof.maximise(grid[k].exp(), &warm);
    }
    for k in centre + 1..grid.len() {
        let warm = values[k - 1].1;
        values[k] = prof.maximise(grid[k].exp(), &warm);
    }
    let kbest = (0..grid.len())
        .max_by(|&a, &b| {
            values[a]
                .0
                .partial_cmp(&values[b].0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.cmp(&a))
        })
        .unwrap_or(centre);
    let lo = grid[kbest.saturating_sub(1)];
    let hi = grid[(kbest + 1).min(grid.len() - 1)];
    let mut warm = values[kbest].1;
    let (lr, _) = brent_minimize(
        |lr| {
            let (ll, m) = prof.maximise(lr.exp(), &warm);
            warm = m;
            -ll
        },
        lo,
        hi,
        1e-7,
        100,
    );
    let (mut best_ll, mut best_mu) = prof.maximise(lr.exp(), &warm);
    let mut best_lr = lr;
    if values[kbest].0 > best_ll {
        best_ll = values[kbest].0;
        best_mu = values[kbest].1;
        best_lr = grid[kbest];
    }
    let joint = |x: &[f64]| {
        let lr = range.to_log(x[2]);
        let pen = (x[2] - lr).powi(2);
        -gcpc_loglik_units(&ys, &Vector2::new(x[0], x[1]), lr.exp()) + pen
    };
    let m = nelder_mead(joint, &[best_mu[0], best_mu[1], best_lr], cfg)?;
    let mut diagnostics = vec![format!("profile optimum log(rho) = {best_lr:.6}")];
    let m_lr = range.to_log(m.x[2]);
    let m_ll = gcpc_loglik_units(&ys, &Vector2::new(m.x[0], m.x[1]), m_lr.exp());
    let (mu, rho, ll, converged) = if m_ll >= best_ll {
        (Vector2::new(m.x[0], m.x[1]), m_lr.exp(), m_ll, m.converged)
    } else {
        diagnostics.push("joint refinement did not improve on the profile optimum".into());
        (best_mu, best_lr.exp(), best_ll, m.converged)
    };
    let p = GcpcParams::new(mu, rho)?;
    let mut fit = FitResult {
        model: FittedModel::Circular(CircularModel::Gcpc(p)),
        names: names(&["mu1", "mu2", "rho"]),
        estimates: vec![mu[0], mu[1], rho],
        std_errors: None,
        loglik: ll,
        converged,
        iterations: m.iterations + prof.evaluations,
        starts_used: cfg.restarts,
        diagnostics,
    };
    attach_std_errors(
        &mut fit,
        |x| gcpc_loglik_units(&ys, &Vector2::new(x[0], x[1]), x[2]),
        &[mu[0], mu[1], rho],
    );
    Ok(fit)
}

/// Maps w ∈ ℝ² into the open unit disc, v = w·tanh‖w‖/‖w‖.
pub(crate) fn to_disc2(w: &[f64]) -> Vector2<f64> {
    let v = Vector2::new(w[0], w[1]);
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        v * (n.tanh() / n)
    }
}

/// Wrapped Cauchy fit over v = λ(cos ω, sin ω) in the open unit disc.
pub fn fit_wc(data: &[f64], cfg: &OptimizerConfig) -> Result<FitResult> {
    check_angles(data, 2)?;
    let (w, rbar) = circular_mean(data);
    let l0 = rbar.clamp(0.05, 0.95);
    let a0 = l0.atanh();
    let obj = |x: &[f64]| {
        let v = to_disc2(x);
        let (l, o) = (v.norm(), v[1].atan2(v[0]));
        match WcParams::new(o, l) {
            Ok(p) => -wc_loglik(data, &p),
            Err(_) => f64::INFINITY,
        }
    };
    let tight = OptimizerConfig {
        tolerance: cfg.tolerance.min(1e-12),
        ..*cfg
    };
    let m = nelder_mead(obj, &[a0 * w.cos(), a0 * w.sin()], &tight)?;
    let v = to_disc2(&m.x);
    let p = WcParams::new(v[1].atan2(v[0]), v.norm())?;
    let mut fit = FitResult {
        model: FittedModel::Circular(CircularModel::Wc(p)),
        names: names(&["omega", "lambda"]),
        estimates: vec![p.omega, p.lambda],
        std_errors: None,
        loglik: -m.value,
        converged: m.converged,
        iterations: m.iterations,
        starts_used: 1,
        diagnostics: vec![],
    };
    attach_std_errors(
        &mut fit,
        |x| match WcParams::new(x[0], x[1]) {
            Ok(p) => wc_loglik(data, &p),
            Err(_) => f64::NEG_INFINITY,
        },
        &[p.omega, p.lambda],
    );
    Ok(fit)
}

/// Projected normal (identity covariance) fit over μ ∈ ℝ².
pub fn fit_pn(data: &[f64], cfg: &OptimizerConfig) -> Result<FitResult> {
    check_angles(data, 2)?;
    let ys = unit_pairs(data);
    let ll = |x: &[f64]| {
        let mu = Vector2::new(x[0], x[1]);
        ys.iter().map(|y| pn_ln_pdf_vec(&mu, y)).sum::<f64>()
    };
    let (w, _) = circular_mean(data);
    let m = nelder_mead(|x| -ll(x), &[w.cos(), w.sin()], cfg)?;
    let mu = Vector2::new(m.x[0], m.x[1]);
    let mut fit = FitResult {
        model: FittedModel::Circular(CircularModel::Pn(PnParams::new(mu)?)),
        names: names(&["mu1", "mu2"]),
        estimates: m.x.clone(),
        std_errors: None,
        loglik: -m.value,
        converged: m.converged,
        iterations: m.iterations,
        starts_used: 1,
        diagnostics: vec![],
    };
    attach_std_errors(&mut fit, ll, &[mu[0], mu[1]]);
    Ok(fit)
}

/// Dispatch by model name: `cipc`, `gcpc`, `wc` or `pn`.
pub fn fit_circular(model: &str, data: &[f64], cfg: &OptimizerConfig) -> Result<FitResult> {
    match model {
        "cipc" => fit_cipc(data, cfg),
        "gcpc" => fit_gcpc(data, cfg),
        "wc" => fit_wc(data, cfg),
        "pn" | "spml" => fit_pn(data, cfg),
        other => Err(Error::Input(format!("unknown circular model '{other}'"))),
    }
}
