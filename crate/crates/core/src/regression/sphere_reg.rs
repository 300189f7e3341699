//! Spherical regression: SIPC, SESPC, IAG and ESAG with Qyᵢ following the model at
//! location Bᵀxᵢ for a rotation or reflection Q ∈ O(3).

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    check_rows, coefficient_names, ols, regression_std_errors, unpack, DesignMatrix, Nuisance, RegressionFit,
    Standardized,
};
use crate::error::{Error, Result};
use crate::estimation::{nelder_mead, OptimizerConfig};
use crate::geometry::{euler_to_rotation, Rotation3};
use crate::special::{ln_esag_factor, LN_2PI};
use crate::spherical::{sample_esag, sample_sespc, sample_sipc, EsagParams, PreparedShape, SespcParams, SipcParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereRegModel {
    Sipc,
    Sespc,
    Iag,
    Esag,
}

impl SphereRegModel {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "sipc" => Ok(SphereRegModel::Sipc),
            "sespc" => Ok(SphereRegModel::Sespc),
            "iag" => Ok(SphereRegModel::Iag),
            "esag" => Ok(SphereRegModel::Esag),
            other => Err(Error::Input(format!("unknown spherical regression model '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SphereRegModel::Sipc => "sipc",
            SphereRegModel::Sespc => "sespc",
            SphereRegModel::Iag => "iag",
            SphereRegModel::Esag => "esag",
        }
    }

    fn shaped(self) -> bool {
        matches!(self, SphereRegModel::Sespc | SphereRegModel::Esag)
    }

    fn isotropic(self) -> SphereRegModel {
        match self {
            SphereRegModel::Sipc | SphereRegModel::Sespc => SphereRegModel::Sipc,
            SphereRegModel::Iag | SphereRegModel::Esag => SphereRegModel::Iag,
        }
    }
}

/// Z-Y-Z Euler grid over O(3): α, γ on 2πk/n and β on πk/n, optionally doubled by the
/// reflection diag(1, 1, −1). Doubling every count keeps the old nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationGrid {
    pub n_alpha: usize,
    pub n_beta: usize,
    pub n_gamma: usize,
    pub reflections: bool,
    /// Simplex refinement of the best cell's Euler angles jointly with B and the shape.
    pub refine: bool,
    /// Cells fully refitted after screening; `None` refits every cell.
    pub keep: Option<usize>,
}

impl Default for RotationGrid {
    fn default() -> Self {
        RotationGrid {
            n_alpha: 12,
            n_beta: 6,
            n_gamma: 12,
            reflections: true,
            refine: true,
            keep: None,
        }
    }
}

impl RotationGrid {
    fn cells(&self) -> Vec<(f64, f64, f64, bool)> {
        let mut out = Vec::new();
        let refl: &[bool] = if self.reflections { &[false, true] } else { &[false] };
        for &r in refl {
            for i in 0..self.n_alpha {
                for j in 0..self.n_beta {
                    for k in 0..self.n_gamma {
                        out.push((
                            2.0 * PI * i as f64 / self.n_alpha as f64,
                            PI * j as f64 / self.n_beta as f64,
                            2.0 * PI * k as f64 / self.n_gamma as f64,
                            r,
                        ));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SphereRegConfig {
    pub optimizer: OptimizerConfig,
    /// `None` fits with Q = I.
    pub rotation: Option<RotationGrid>,
}

fn row3(m: &DMatrix<f64>, i: usize) -> Vector3<f64> {
    Vector3::new(m[(i, 0)], m[(i, 1)], m[(i, 2)])
}

fn model_ll(model: SphereRegModel, ys: &[Vector3<f64>], mus: &DMatrix<f64>, shape: &Vector2<f64>) -> f64 {
    let mut sum = 0.0;
    for (i, y) in ys.iter().enumerate() {
        let mu = row3(mus, i);
        sum += match model {
            SphereRegModel::Sipc => SipcParams { mu }.ln_pdf(y),
            SphereRegModel::Sespc => PreparedShape::new(&mu, shape).sespc_ln_pdf(y),
            SphereRegModel::Iag => -LN_2PI - 0.5 * mu.norm_squared() + ln_esag_factor(y.dot(&mu)),
            SphereRegModel::Esag => PreparedShape::new(&mu, shape).esag_ln_pdf(y),
        };
    }
    sum
}

/// Regression log-likelihood with responses rotated by `q` before evaluation.
pub fn sphere_reg_loglik(
    model: SphereRegModel,
    y: &[Vector3<f64>],
    design: &DesignMatrix,
    b: &DMatrix<f64>,
    shape: &Vector2<f64>,
    q: &Rotation3,
) -> f64 {
    let rys: Vec<Vector3<f64>> = y.iter().map(|v| q.apply(v)).collect();
    model_ll(model, &rys, &design.locations(b), shape)
}

fn check_units(y: &[Vector3<f64>]) -> Result<()> {
    for (i, v) in y.iter().enumerate() {
        if !v.iter().all(|c| c.is_finite()) || (v.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::Input(format!("response {i} is not a unit vector")));
        }
    }
    Ok(())
}

struct Problem<'a> {
    model: SphereRegModel,
    z: &'a DMatrix<f64>,
    p: usize,
    cfg: OptimizerConfig,
}

impl Problem<'_> {
    fn ll(&self, model: SphereRegModel, ys: &[Vector3<f64>], x: &[f64]) -> f64 {
        let b = unpack(x, self.p, 3);
        let shape = if model.shaped() {
            Vector2::new(x[3 * self.p], x[3 * self.p + 1])
        } else {
            Vector2::zeros()
        };
        model_ll(model, ys, &(self.z * b), &shape)
    }

    /// Isotropic fit from a scaled OLS start; returns (vec B_z, loglik, converged, iterations).
    fn isotropic(&self, ys: &[Vector3<f64>]) -> Result<(Vec<f64>, f64, bool, usize)> {
        let iso = self.model.isotropic();
        let y = DMatrix::from_fn(ys.len(), 3, |i, j| ys[i][j]);
        let b0 = ols(self.z, &y);
        let mut start = (f64::NEG_INFINITY, b0.as_slice().to_vec());
        for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
            let x: Vec<f64> = b0.iter().map(|v| v * k).collect();
            let v = self.ll(iso, ys, &x);
            if v > start.0 {
                start = (v, x);
            }
        }
        let m = nelder_mead(|x| -self.ll(iso, ys, x), &start.1, &self.cfg)?;
        Ok((m.x, -m.value, m.converged, m.iterations))
    }

    /// Shaped fit from the isotropic coefficients: zero shape plus `restarts − 1` random
    /// shapes are screened and the best three (always including zero shape) refined.
    fn shaped(&self, ys: &[Vector3<f64>], iso: &[f64], rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, f64, bool, usize)> {
        let mut starts = Vec::new();
        let mut base = iso.to_vec();
        base.extend_from_slice(&[0.0, 0.0]);
        starts.push(base.clone());
        for _ in 1..self.cfg.restarts {
            let mut s = base.clone();
            let n = s.len();
            s[n - 2] = StandardNormal.sample(rng);
            s[n - 1] = StandardNormal.sample(rng);
            starts.push(s);
        }
        self.refine_starts(ys, starts, 3)
    }

    fn refine_starts(
        &self,
        ys: &[Vector3<f64>],
        starts: Vec<Vec<f64>>,
        keep: usize,
    ) -> Result<(Vec<f64>, f64, bool, usize)> {
        let obj = |x: &[f64]| -self.ll(self.model, ys, x);
        let mut scored: Vec<(f64, usize)> = starts.iter().enumerate().map(|(i, s)| (obj(s), i)).collect();
        scored.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        let mut chosen: Vec<usize> = scored
            .iter()
            .filter(|s| s.0.is_finite())
            .take(keep)
            .map(|s| s.1)
            .collect();
        if !chosen.contains(&0) {
            chosen.push(0);
        }
        let mut best: Option<(Vec<f64>, f64, bool)> = None;
        let mut iterations = 0;
        for i in chosen {
            let m = nelder_mead(obj, &starts[i], &self.cfg)?;
            iterations += m.iterations;
            if best.as_ref().is_none_or(|b| m.value < b.1) {
                best = Some((m.x, m.value, m.converged));
            }
        }
        let (x, v, ok) = best.expect("zero-shape start is always refined");
        Ok((x, -v, ok, iterations))
    }
}

fn rotate_all(q: &Rotation3, y: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    y.iter().map(|v| q.apply(v)).collect()
}

/// Spherical regression. Isotropic models are invariant under Q (B absorbs it), so they
/// are fitted with Q = I. Shaped models with a rotation grid screen every cell by
/// fitting the shape with B fixed at the rotated isotropic solution, fully refit the
/// best `keep` cells, and optionally refine the Euler angles jointly with B and the shape.
pub fn fit_sphere_reg(
    model: SphereRegModel,
    y: &[Vector3<f64>],
    design: &DesignMatrix,
    cfg: &SphereRegConfig,
) -> Result<RegressionFit> {
    check_units(y)?;
    let p = design.ncols();
    check_rows(design, y.len(), 3 * p)?;
    cfg.optimizer.validate()?;
    let st = Standardized::new(design);
    let prob = Problem {
        model,
        z: &st.z,
        p,
        cfg: cfg.optimizer,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.optimizer.seed);
    let mut diagnostics = Vec::new();
    let (iso_x, iso_ll, iso_ok, iso_it) = prob.isotropic(y)?;
    let (x, ll, ok, iterations, rotation) = if !model.shaped() {
        if cfg.rotation.is_some() {
            diagnostics.push("isotropic model: Q is absorbed by B and fixed at the identity".to_string());
        }
        (iso_x, iso_ll, iso_ok, iso_it, Rotation3::identity())
    } else {
        match cfg.rotation {
            None => {
                let (x, ll, ok, it) = prob.shaped(y, &iso_x, &mut rng)?;
                (x, ll, ok, it + iso_it, Rotation3::identity())
            }
            Some(grid) => {
                let (x, ll, ok, it, q) = grid_search(&prob, y, &iso_x, &grid, &mut diagnostics)?;
                (x, ll, ok, it + iso_it, q)
            }
        }
    };
    let bz = unpack(&x, p, 3);
    let b = st.to_original(&bz);
    let nuisance = match model {
        SphereRegModel::Sespc => Nuisance::Shape {
            theta1: x[3 * p],
            theta2: x[3 * p + 1],
        },
        SphereRegModel::Esag => Nuisance::EsagShape {
            gamma1: x[3 * p],
            gamma2: x[3 * p + 1],
        },
        _ => Nuisance::None,
    };
    let mut names = coefficient_names(p, 3);
    match nuisance {
        Nuisance::Shape { .. } => names.extend(["theta1".to_string(), "theta2".to_string()]),
        Nuisance::EsagShape { .. } => names.extend(["gamma1".to_string(), "gamma2".to_string()]),
        _ => {}
    }
    let rys = rotate_all(&rotation, y);
    let xm = design.matrix();
    let mut fit = RegressionFit {
        model: model.name().to_string(),
        coefficients: b,
        nuisance,
        rotation,
        loglik: ll,
        parameter_names: names,
        std_errors: None,
        converged: ok,
        iterations,
        diagnostics,
    };
    let se = regression_std_errors(
        |b, nu| {
            let shape = if nu.len() == 2 {
                Vector2::new(nu[0], nu[1])
            } else {
                Vector2::zeros()
            };
            model_ll(model, &rys, &(xm * b), &shape)
        },
        &fit.coefficients,
        &nuisance.values(),
    );
    match se {
        Ok(se) => fit.std_errors = Some(se),
        Err(e) => fit.diagnostics.push(e),
    }
    Ok(fit)
}

type GridOutcome = (Vec<f64>, f64, bool, usize, Rotation3);

fn grid_search(
    prob: &Problem,
    y: &[Vector3<f64>],
    iso_x: &[f64],
    grid: &RotationGrid,
    diagnostics: &mut Vec<String>,
) -> Result<GridOutcome> {
    let p = prob.p;
    let iso_bz = unpack(iso_x, p, 3);
    let shape_cfg = OptimizerConfig {
        tolerance: 1e-6,
        ..prob.cfg
    };
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(Error::Input("rotation grid has no cells".into()));
    }
    // screening: the isotropic fit rotated into each cell, shape fitted alone
    let mut scored: Vec<(f64, usize, Vec<f64>)> = Vec::with_capacity(cells.len());
    for (idx, &(a, b, c, r)) in cells.iter().enumerate() {
        let q = euler_to_rotation(a, b, c, r);
        let rys = rotate_all(&q, y);
        // Qy ~ SIPC(B_Qᵀx) with B_Q = B_iso·Qᵀ reproduces the isotropic fit
        let bq = &iso_bz * q.matrix.transpose();
        let mut x: Vec<f64> = bq.as_slice().to_vec();
        x.extend_from_slice(&[0.0, 0.0]);
        let xs = x.clone();
        let shape_obj = |s: &[f64]| {
            let mut v = xs.clone();
            v[3 * p] = s[0];
            v[3 * p + 1] = s[1];
            -prob.ll(prob.model, &rys, &v)
        };
        let m = nelder_mead(shape_obj, &[0.0, 0.0], &shape_cfg)?;
        x[3 * p] = m.x[0];
        x[3 * p + 1] = m.x[1];
        scored.push((-m.value, idx, x));
    }
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    // each kept cell is refitted from deterministic starts, so a cell scores the same
    // in every grid that contains it
    let keep = grid.keep.unwrap_or(scored.len()).max(1);
    let mut refined: Vec<(Vec<f64>, f64, bool, usize)> = Vec::new();
    let mut iterations = 0;
    for (_, idx, x) in scored.iter().take(keep) {
        let (a, b, c, r) = cells[*idx];
        let rys = rotate_all(&euler_to_rotation(a, b, c, r), y);
        let mut zero = x.clone();
        zero[3 * p] = 0.0;
        zero[3 * p + 1] = 0.0;
        let (xf, ll, ok, it) = prob.refine_starts(&rys, vec![x.clone(), zero], 2)?;
        iterations += it;
        refined.push((xf, ll, ok, *idx));
    }
    refined.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.3.cmp(&b.3))
    });
    let (x, ll, ok, idx) = refined[0].clone();
    let (a, b, c, r) = cells[idx];
    diagnostics.push(format!(
        "best grid cell: alpha = {a:.6}, beta = {b:.6}, gamma = {c:.6}, reflect = {r}"
    ));
    let mut best: GridOutcome = (x, ll, ok, 0, euler_to_rotation(a, b, c, r));
    if grid.refine {
        for (x, _, _, idx) in refined.iter().take(3) {
            let (a, b, c, r) = cells[*idx];
            let joint = |v: &[f64]| {
                let q = euler_to_rotation(v[0], v[1], v[2], r);
                -prob.ll(prob.model, &rotate_all(&q, y), &v[3..])
            };
            let mut v0 = vec![a, b, c];
            v0.extend_from_slice(x);
            let m = nelder_mead(joint, &v0, &prob.cfg)?;
            iterations += m.iterations;
            if -m.value > best.1 {
                best = (
                    m.x[3..].to_vec(),
                    -m.value,
                    m.converged,
                    0,
                    euler_to_rotation(m.x[0], m.x[1], m.x[2], r),
                );
                diagnostics.push(format!(
                    "refined Euler angles: alpha = {:.6}, beta = {:.6}, gamma = {:.6}, reflect = {r}",
                    m.x[0], m.x[1], m.x[2]
                ));
            }
        }
    }
    best.3 = iterations;
    Ok(best)
}

/// Draws one response per design row from `model` at location Bᵀxᵢ with the given shape
/// (θ for SESPC, γ for ESAG; ignored otherwise). Responses are returned unrotated (Q = I).
pub fn sample_sphere_regression<R: Rng + ?Sized>(
    model: SphereRegModel,
    design: &DesignMatrix,
    b: &DMatrix<f64>,
    shape: &Vector2<f64>,
    rng: &mut R,
) -> Result<Vec<Vector3<f64>>> {
    if b.nrows() != design.ncols() || b.ncols() != 3 {
        return Err(Error::ShapeMismatch(format!(
            "coefficients {:?} for {} covariates",
            b.shape(),
            design.ncols()
        )));
    }
    let mus = design.locations(b);
    let mut out = Vec::with_capacity(mus.nrows());
    for i in 0..mus.nrows() {
        let mu = row3(&mus, i);
        let v = match model {
            SphereRegModel::Sipc => sample_sipc(&SipcParams::new(mu)?, 1, rng),
            SphereRegModel::Sespc => sample_sespc(&SespcParams::new(mu, *shape)?, 1, rng),
            SphereRegModel::Iag => sample_esag(&EsagParams::iag(mu)?, 1, rng),
            SphereRegModel::Esag => sample_esag(&EsagParams::new(mu, *shape)?, 1, rng),
        };
        out.push(v[0]);
    }
    Ok(out)
}
