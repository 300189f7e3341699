//! SPML, CIPC and GCPC regression for angular responses.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{
    check_rows, coefficient_names, dvec, ols, regression_std_errors, unpack, DesignMatrix, Nuisance, RegressionFit,
    Standardized,
};
use crate::circular::{
    cipc_denominator, gcpc_ln_denominator, pn_ln_pdf_vec, sample_cipc, sample_gcpc, sample_pn, CipcParams, GcpcParams,
    PnParams,
};
use crate::error::{Error, Result};
use crate::estimation::{brent_minimize, nelder_mead, newton_ascent, OptimizerConfig, RhoRange};
use crate::geometry::Rotation3;
use crate::special::LN_2PI;

fn units(y: &[f64]) -> Result<Vec<Vector2<f64>>> {
    if y.iter().any(|t| !t.is_finite()) {
        return Err(Error::Input("angles must be finite".into()));
    }
    Ok(y.iter().map(|t| Vector2::new(t.cos(), t.sin())).collect())
}

#[inline]
fn row2(m: &DMatrix<f64>, i: usize) -> Vector2<f64> {
    Vector2::new(m[(i, 0)], m[(i, 1)])
}

fn spml_ll(ys: &[Vector2<f64>], mus: &DMatrix<f64>) -> f64 {
    ys.iter()
        .enumerate()
        .map(|(i, y)| pn_ln_pdf_vec(&row2(mus, i), y))
        .sum()
}

fn cipc_ll(ys: &[Vector2<f64>], mus: &DMatrix<f64>) -> f64 {
    -ys.iter()
        .enumerate()
        .map(|(i, y)| cipc_denominator(row2(mus, i), *y).ln())
        .sum::<f64>()
        - ys.len() as f64 * LN_2PI
}

/// Observations whose location underflows (γᵢ < 1e−12) contribute the uniform density.
fn gcpc_ll(ys: &[Vector2<f64>], mus: &DMatrix<f64>, rho: f64) -> f64 {
    if !(rho > 0.0 && rho.is_finite()) {
        return f64::NEG_INFINITY;
    }
    let half_ln_rho = 0.5 * rho.ln();
    let mut sum = 0.0;
    for (i, y) in ys.iter().enumerate() {
        let mu = row2(mus, i);
        let g = mu.norm();
        if !(g >= 1e-12) {
            sum -= LN_2PI;
            continue;
        }
        let (cw, sw) = (mu[0] / g, mu[1] / g);
        let c = y[0] * cw + y[1] * sw;
        let s = y[1] * cw - y[0] * sw;
        sum -= LN_2PI + half_ln_rho + gcpc_ln_denominator(g, c, s, rho);
    }
    sum
}

/// SPML (projected normal) regression log-likelihood at coefficients `b` (p×2).
pub fn spml_reg_loglik(y: &[f64], design: &DesignMatrix, b: &DMatrix<f64>) -> Result<f64> {
    Ok(spml_ll(&units(y)?, &design.locations(b)))
}

/// −Σ log(√(μᵢᵀμᵢ+1) − yᵢᵀμᵢ) − n log 2π.
pub fn cipc_reg_loglik(y: &[f64], design: &DesignMatrix, b: &DMatrix<f64>) -> Result<f64> {
    Ok(cipc_ll(&units(y)?, &design.locations(b)))
}

/// GCPC regression log-likelihood; each observation uses the GCPC density with its own
/// location Bᵀxᵢ and the common ρ.
pub fn gcpc_reg_loglik(y: &[f64], design: &DesignMatrix, b: &DMatrix<f64>, rho: f64) -> Result<f64> {
    Ok(gcpc_ll(&units(y)?, &design.locations(b), rho))
}

/// OLS of (cos, sin) on Z, rescaled by whichever factor gives the best log-likelihood.
fn scaled_ols_start<F: Fn(&DMatrix<f64>) -> f64>(z: &DMatrix<f64>, ys: &[Vector2<f64>], ll: F) -> DMatrix<f64> {
    let y = DMatrix::from_fn(ys.len(), 2, |i, j| ys[i][j]);
    let b0 = ols(z, &y);
    let mut best = (f64::NEG_INFINITY, b0.clone());
    for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let b = &b0 * k;
        let v = ll(&b);
        if v > best.0 {
            best = (v, b);
        }
    }
    best.1
}

fn simplex_coefficients<F: Fn(&DMatrix<f64>) -> f64>(
    ll: F,
    start: &DMatrix<f64>,
    cfg: &OptimizerConfig,
) -> Result<(DMatrix<f64>, f64, bool, usize)> {
    let (p, k) = (start.nrows(), start.ncols());
    let m = nelder_mead(|x| -ll(&unpack(x, p, k)), start.as_slice(), cfg)?;
    Ok((unpack(&m.x, p, k), -m.value, m.converged, m.iterations))
}

fn finish(
    model: &str,
    b: DMatrix<f64>,
    nuisance: Nuisance,
    loglik: f64,
    converged: bool,
    iterations: usize,
    diagnostics: Vec<String>,
    se_loglik: impl Fn(&DMatrix<f64>, &[f64]) -> f64,
) -> RegressionFit {
    let (p, k) = (b.nrows(), b.ncols());
    let mut names = coefficient_names(p, k);
    if let Nuisance::Rho { .. } = nuisance {
        names.push("rho".into());
    }
    let mut fit = RegressionFit {
        model: model.to_string(),
        coefficients: b,
        nuisance,
        rotation: Rotation3::identity(),
        loglik,
        parameter_names: names,
        std_errors: None,
        converged,
        iterations,
        diagnostics,
    };
    match regression_std_errors(se_loglik, &fit.coefficients, &nuisance.values()) {
        Ok(se) => fit.std_errors = Some(se),
        Err(e) => fit.diagnostics.push(e),
    }
    fit
}

/// SPML regression: maximises the projected normal log-likelihood over B.
pub fn fit_spml_reg(y: &[f64], design: &DesignMatrix, cfg: &OptimizerConfig) -> Result<RegressionFit> {
    let ys = units(y)?;
    check_rows(design, ys.len(), 2 * design.ncols())?;
    cfg.validate()?;
    let st = Standardized::new(design);
    let ll_z = |bz: &DMatrix<f64>| spml_ll(&ys, &(&st.z * bz));
    let start = scaled_ols_start(&st.z, &ys, ll_z);
    let (bz, ll, ok, it) = simplex_coefficients(ll_z, &start, cfg)?;
    let x = design.matrix();
    Ok(finish(
        "spml",
        st.to_original(&bz),
        Nuisance::None,
        ll,
        ok,
        it,
        vec![],
        |b, _| spml_ll(&ys, &(x * b)),
    ))
}

/// Analytic log-likelihood, gradient and Hessian of the CIPC regression in vec(B)
/// (column-major) for the design `z`.
fn cipc_reg_derivs(ys: &[Vector2<f64>], z: &DMatrix<f64>, b: &DMatrix<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
    let p = z.ncols();
    let mus = z * b;
    let mut ll = -(ys.len() as f64) * LN_2PI;
    let mut grad = DVector::zeros(2 * p);
    let mut hess = DMatrix::zeros(2 * p, 2 * p);
    for (i, y) in ys.iter().enumerate() {
        let mu = row2(&mus, i);
        let g2 = mu.norm_squared();
        let r = (g2 + 1.0).sqrt();
        let d = cipc_denominator(mu, *y);
        let v = mu / r - y;
        let d2 = (Matrix2::identity() * r - mu * mu.transpose() / r) / (g2 + 1.0);
        let gi = -v / d;
        let hi = -(d2 * d - v * v.transpose()) / (d * d);
        ll -= d.ln();
        for j in 0..2 {
            for a in 0..p {
                let za = z[(i, a)];
                grad[j * p + a] += za * gi[j];
                for k in 0..2 {
                    for c in 0..p {
                        hess[(j * p + a, k * p + c)] += za * z[(i, c)] * hi[(j, k)];
                    }
                }
            }
        }
    }
    (ll, grad, hess)
}

/// Gradient of the CIPC regression log-likelihood with respect to vec(B) (column-major).
pub fn cipc_reg_gradient(y: &[f64], design: &DesignMatrix, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (_, g, _) = cipc_reg_derivs(&units(y)?, design.matrix(), b);
    Ok(g.iter().cloned().collect())
}

/// CIPC regression: simplex from a scaled OLS start, polished by Newton–Raphson with the
/// analytic derivatives.
pub fn fit_cipc_reg(y: &[f64], design: &DesignMatrix, cfg: &OptimizerConfig) -> Result<RegressionFit> {
    let ys = units(y)?;
    check_rows(design, ys.len(), 2 * design.ncols())?;
    cfg.validate()?;
    let st = Standardized::new(design);
    let p = design.ncols();
    let ll_z = |bz: &DMatrix<f64>| cipc_ll(&ys, &(&st.z * bz));
    let start = scaled_ols_start(&st.z, &ys, ll_z);
    let (bz, ll, ok, it) = simplex_coefficients(ll_z, &start, cfg)?;
    let mut diagnostics = vec![];
    let (x, v, gn, newton_ok, nit) = newton_ascent(
        |v| cipc_reg_derivs(&ys, &st.z, &unpack(v.as_slice(), p, 2)),
        dvec(bz.as_slice()),
        1e-9,
        100,
    );
    let (bz, ll, converged) = if v >= ll {
        (unpack(x.as_slice(), p, 2), v, newton_ok || ok)
    } else {
        diagnostics.push("Newton polish did not improve on the simplex".to_string());
        (bz, ll, ok)
    };
    if !newton_ok {
        diagnostics.push(format!("Newton polish stopped with gradient norm {gn:.3e}"));
    }
    let xm = design.matrix();
    Ok(finish(
        "cipc",
        st.to_original(&bz),
        Nuisance::None,
        ll,
        converged,
        it + nit,
        diagnostics,
        |b, _| cipc_ll(&ys, &(xm * b)),
    ))
}

struct RegProfile<'a> {
    ys: &'a [Vector2<f64>],
    z: &'a DMatrix<f64>,
    candidates: Vec<DMatrix<f64>>,
    inner: OptimizerConfig,
    iterations: usize,
}

impl RegProfile<'_> {
    fn ll(&self, bz: &DMatrix<f64>, rho: f64) -> f64 {
        gcpc_ll(self.ys, &(self.z * bz), rho)
    }

    fn maximise(&mut self, rho: f64, warm: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
        let mut best = warm.clone();
        let mut best_ll = self.ll(warm, rho);
        for c in &self.candidates {
            let v = self.ll(c, rho);
            if v > best_ll {
                best_ll = v;
                best = c.clone();
            }
        }
        match simplex_coefficients(|b| self.ll(b, rho), &best, &self.inner) {
            Ok((b, v, _, it)) => {
                self.iterations += it;
                if v >= best_ll {
                    (v, b)
                } else {
                    (best_ll, best)
                }
            }
            Err(_) => (best_ll, best),
        }
    }
}

/// GCPC regression. Stage 1 maximises the profile log-likelihood of log ρ on a grid
/// walked outward from ρ = 1 and then by Brent's method, each profile point screening
/// `cfg.restarts` perturbed coefficient matrices around the CIPC fit. Stage 2 refines
/// (B, log ρ) jointly.
pub fn fit_gcpc_reg(y: &[f64], design: &DesignMatrix, cfg: &OptimizerConfig) -> Result<RegressionFit> {
    fit_gcpc_reg_range(y, design, cfg, RhoRange::AtMostOne)
}

pub fn fit_gcpc_reg_range(
    y: &[f64],
    design: &DesignMatrix,
    cfg: &OptimizerConfig,
    range: RhoRange,
) -> Result<RegressionFit> {
    let ys = units(y)?;
    let p = design.ncols();
    check_rows(design, ys.len(), 2 * p + 1)?;
    cfg.validate()?;
    let st = Standardized::new(design);
    let cipc = fit_cipc_reg(y, design, cfg)?;
    let bz_c = st.to_standard(&cipc.coefficients);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spread = bz_c.amax().max(0.1);
    let mut candidates = vec![bz_c.clone()];
    for _ in 1..cfg.restarts {
        let e1: f64 = StandardNormal.sample(&mut rng);
        let e2: f64 = StandardNormal.sample(&mut rng);
        let scale = (0.5 * e1).exp();
        let phi = 0.5 * e2;
        let (s, c) = phi.sin_cos();
        // rotating every μᵢ by φ is B ↦ B·Rᵀ
        let rt = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        let noise = DMatrix::from_fn(p, 2, |_, _| {
            let e: f64 = StandardNormal.sample(&mut rng);
            0.1 * spread * e
        });
        candidates.push(&bz_c * rt * scale + noise);
    }
    let mut prof = RegProfile {
        ys: &ys,
        z: &st.z,
        candidates,
        inner: OptimizerConfig {
            tolerance: cfg.tolerance.max(1e-10),
            ..*cfg
        },
        iterations: 0,
    };
    let (grid, centre) = range.log_grid();
    let mut values = vec![(f64::NEG_INFINITY, bz_c.clone()); grid.len()];
    values[centre] = prof.maximise(1.0, &bz_c);
    for k in (0..centre).rev() {
        let warm = values[k + 1].1.clone();
        values[k] = prof.maximise(grid[k].exp(), &warm);
    }
    for k in centre + 1..grid.len() {
        let warm = values[k - 1].1.clone();
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
    let mut warm = values[kbest].1.clone();
    let (lr, _) = brent_minimize(
        |lr| {
            let (v, b) = prof.maximise(lr.exp(), &warm);
            warm = b;
            -v
        },
        lo,
        hi,
        1e-6,
        60,
    );
    let (mut best_ll, mut best_b) = prof.maximise(lr.exp(), &warm);
    let mut best_lr = lr;
    if values[kbest].0 > best_ll {
        best_ll = values[kbest].0;
        best_b = values[kbest].1.clone();
        best_lr = grid[kbest];
    }
    let mut x0: Vec<f64> = best_b.as_slice().to_vec();
    x0.push(best_lr);
    let joint = |x: &[f64]| {
        let lr = range.to_log(x[2 * p]);
        -gcpc_ll(&ys, &(&st.z * unpack(x, p, 2)), lr.exp()) + (x[2 * p] - lr).powi(2)
    };
    let m = nelder_mead(joint, &x0, cfg)?;
    let mut diagnostics = vec![format!("profile optimum log(rho) = {best_lr:.6}")];
    let m_lr = range.to_log(m.x[2 * p]);
    let m_ll = gcpc_ll(&ys, &(&st.z * unpack(&m.x, p, 2)), m_lr.exp());
    let (bz, rho, ll) = if m_ll >= best_ll {
        (unpack(&m.x, p, 2), m_lr.exp(), m_ll)
    } else {
        diagnostics.push("joint refinement did not improve on the profile optimum".into());
        (best_b, best_lr.exp(), best_ll)
    };
    if ll < cipc.loglik {
        diagnostics.push("GCPC optimum fell below the nested CIPC fit; CIPC solution returned with rho = 1".into());
    }
    let (bz, rho, ll) = if ll < cipc.loglik {
        (bz_c, 1.0, cipc.loglik)
    } else {
        (bz, rho, ll)
    };
    let xm = design.matrix();
    Ok(finish(
        "gcpc",
        st.to_original(&bz),
        Nuisance::Rho { rho },
        ll,
        m.converged,
        m.iterations + prof.iterations + cipc.iterations,
        diagnostics,
        |b, nu| gcpc_ll(&ys, &(xm * b), nu[0]),
    ))
}

/// Dispatch by model name: `spml`/`pn`, `cipc` or `gcpc`.
pub fn fit_circular_regression(
    model: &str,
    y: &[f64],
    design: &DesignMatrix,
    cfg: &OptimizerConfig,
) -> Result<RegressionFit> {
    match model {
        "spml" | "pn" => fit_spml_reg(y, design, cfg),
        "cipc" => fit_cipc_reg(y, design, cfg),
        "gcpc" => fit_gcpc_reg(y, design, cfg),
        other => Err(Error::Input(format!("unknown circular regression model '{other}'"))),
    }
}

/// Draws one angle per design row from `model` (`cipc`, `gcpc` or `pn`) with location
/// Bᵀxᵢ. Rows with a zero location are drawn uniformly.
pub fn sample_circular_regression<R: Rng + ?Sized>(
    model: &str,
    design: &DesignMatrix,
    b: &DMatrix<f64>,
    rho: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if b.nrows() != design.ncols() || b.ncols() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "coefficients {:?} for {} covariates",
            b.shape(),
            design.ncols()
        )));
    }
    let mus = design.locations(b);
    let mut out = Vec::with_capacity(mus.nrows());
    for i in 0..mus.nrows() {
        let mu = row2(&mus, i);
        let t = match model {
            "cipc" => sample_cipc(&CipcParams::new(mu)?, 1, rng)[0],
            "pn" | "spml" => sample_pn(&PnParams::new(mu)?, 1, rng)[0],
            "gcpc" => {
                if mu.norm() == 0.0 {
                    rng.random::<f64>() * 2.0 * PI - PI
                } else {
                    sample_gcpc(&GcpcParams::new(mu, rho)?, 1, rng)[0]
                }
            }
            other => return Err(Error::Input(format!("unknown circular regression model '{other}'"))),
        };
        out.push(t);
    }
    Ok(out)
}
