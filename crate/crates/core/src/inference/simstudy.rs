//! Monte Carlo studies of estimator accuracy and test power.
//!
//! A study is a list of generator blocks crossed with sample sizes. Every cell draws
//! `replicates` datasets, fits each listed model and averages an accuracy metric; an
//! optional power row counts likelihood ratio rejections. Replicate `b` of a cell uses
//! its own ChaCha stream keyed by (seed, block, n) with stream index `b`, so any cell
//! can be rerun on its own and the result does not depend on the thread count.

use nalgebra::{DMatrix, Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use serde::{Deserialize, Serialize};

use super::lrt::{LrtKind, LrtResult};
use super::metrics::metric_euclid;
use crate::circular::{sample_gcpc, CircularModel, GcpcParams};
use crate::error::{Error, Result};
use crate::estimation::{fit_circular, fit_spherical, FitResult, OptimizerConfig};
use crate::regression::{
    fit_circular_regression, fit_sphere_reg, sample_circular_regression, sample_sphere_regression, DesignMatrix,
    SphereRegConfig, SphereRegModel,
};
use crate::spherical::{sample_esag, sample_sespc, EsagParams, SespcParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case")]
pub enum Covariate {
    /// shape and rate
    Gamma {
        shape: f64,
        rate: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
}

impl Covariate {
    fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<DMatrix<f64>> {
        let bad = |name| Error::InvalidParameter {
            name,
            value: f64::NAN,
            reason: "invalid covariate distribution",
        };
        match *self {
            Covariate::Gamma { shape, rate } => {
                let g = Gamma::new(shape, 1.0 / rate).map_err(|_| bad("gamma"))?;
                Ok(DMatrix::from_fn(n, 1, |_, _| g.sample(rng)))
            }
            Covariate::Normal { mean, sd } => {
                let g = Normal::new(mean, sd).map_err(|_| bad("normal"))?;
                Ok(DMatrix::from_fn(n, 1, |_, _| g.sample(rng)))
            }
        }
    }
}

/// Data-generating model of one block of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Generator {
    Gcpc {
        mu: [f64; 2],
        rho: f64,
    },
    Sespc {
        mu: [f64; 3],
        theta: [f64; 2],
    },
    Esag {
        mu: [f64; 3],
        gamma: [f64; 2],
    },
    /// Coefficients are given row by row, intercept first.
    GcpcRegression {
        coefficients: Vec<Vec<f64>>,
        rho: f64,
        covariate: Covariate,
    },
    SphereRegression {
        family: String,
        coefficients: Vec<Vec<f64>>,
        shape: [f64; 2],
        covariate: Covariate,
    },
}

enum SimData {
    Angles(Vec<f64>),
    Sphere(Vec<Vector3<f64>>),
    CircReg(Vec<f64>, DesignMatrix),
    SphereReg(Vec<Vector3<f64>>, DesignMatrix),
}

fn rows_to_matrix(rows: &[Vec<f64>], cols: usize) -> Result<DMatrix<f64>> {
    if rows.is_empty() || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::ShapeMismatch(format!(
            "coefficient rows must have {cols} entries"
        )));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

impl Generator {
    fn circular(&self) -> bool {
        matches!(self, Generator::Gcpc { .. } | Generator::GcpcRegression { .. })
    }

    fn regression(&self) -> bool {
        matches!(
            self,
            Generator::GcpcRegression { .. } | Generator::SphereRegression { .. }
        )
    }

    fn validate(&self) -> Result<()> {
        match self {
            Generator::Gcpc { mu, rho } => GcpcParams::new(Vector2::from(*mu), *rho).map(|_| ()),
            Generator::Sespc { mu, theta } => SespcParams::new(Vector3::from(*mu), Vector2::from(*theta)).map(|_| ()),
            Generator::Esag { mu, gamma } => EsagParams::new(Vector3::from(*mu), Vector2::from(*gamma)).map(|_| ()),
            Generator::GcpcRegression { coefficients, rho, .. } => {
                rows_to_matrix(coefficients, 2)?;
                GcpcParams::new(Vector2::new(1.0, 0.0), *rho).map(|_| ())
            }
            Generator::SphereRegression {
                family, coefficients, ..
            } => {
                rows_to_matrix(coefficients, 3)?;
                match SphereRegModel::parse(family)? {
                    SphereRegModel::Sespc | SphereRegModel::Esag => Ok(()),
                    _ => Err(Error::Input("sphere regression generator must be sespc or esag".into())),
                }
            }
        }
    }

    /// True location vector, or the coefficient matrix for regression generators.
    fn truth(&self) -> Result<DMatrix<f64>> {
        match self {
            Generator::Gcpc { mu, .. } => Ok(DMatrix::from_column_slice(2, 1, mu)),
            Generator::Sespc { mu, .. } => Ok(DMatrix::from_column_slice(3, 1, mu)),
            Generator::Esag { mu, .. } => Ok(DMatrix::from_column_slice(3, 1, mu)),
            Generator::GcpcRegression { coefficients, .. } => rows_to_matrix(coefficients, 2),
            Generator::SphereRegression { coefficients, .. } => rows_to_matrix(coefficients, 3),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<SimData> {
        match self {
            Generator::Gcpc { mu, rho } => {
                let p = GcpcParams::new(Vector2::from(*mu), *rho)?;
                Ok(SimData::Angles(sample_gcpc(&p, n, rng)))
            }
            Generator::Sespc { mu, theta } => {
                let p = SespcParams::new(Vector3::from(*mu), Vector2::from(*theta))?;
                Ok(SimData::Sphere(sample_sespc(&p, n, rng)))
            }
            Generator::Esag { mu, gamma } => {
                let p = EsagParams::new(Vector3::from(*mu), Vector2::from(*gamma))?;
                Ok(SimData::Sphere(sample_esag(&p, n, rng)))
            }
            Generator::GcpcRegression {
                coefficients,
                rho,
                covariate,
            } => {
                let b = rows_to_matrix(coefficients, 2)?;
                let d = DesignMatrix::with_intercept(&covariate.draw(n, rng)?)?;
                let y = sample_circular_regression("gcpc", &d, &b, *rho, rng)?;
                Ok(SimData::CircReg(y, d))
            }
            Generator::SphereRegression {
                family,
                coefficients,
                shape,
                covariate,
            } => {
                let b = rows_to_matrix(coefficients, 3)?;
                let d = DesignMatrix::with_intercept(&covariate.draw(n, rng)?)?;
                let y = sample_sphere_regression(SphereRegModel::parse(family)?, &d, &b, &Vector2::from(*shape), rng)?;
                Ok(SimData::SphereReg(y, d))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// mean ‖μ̂ − μ‖₂
    Euclid,
    /// mean ‖B̂ − B‖_F
    Frobenius,
    /// √(2[1 − mean(m̂ᵀm)])
    ErrorM,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyBlock {
    pub label: String,
    pub generator: Generator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStudySpec {
    pub name: String,
    pub blocks: Vec<StudyBlock>,
    pub fitted: Vec<String>,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub metric: Metric,
    /// Adds a row with the rejection rate of this test at level `alpha`.
    pub power: Option<LrtKind>,
    pub alpha: f64,
    /// Random starts handed to the multi-start fits.
    pub restarts: usize,
    /// Worker threads; 0 uses the available parallelism.
    #[serde(default)]
    pub threads: usize,
}

impl SimStudySpec {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::Input("at least one replicate is required".into()));
        }
        if self.sizes.is_empty() || self.sizes.iter().any(|&n| n < 2) {
            return Err(Error::Input("sample sizes must be at least 2".into()));
        }
        if self.blocks.is_empty() {
            return Err(Error::Input("a study needs at least one generator block".into()));
        }
        if self.fitted.is_empty() && self.power.is_none() {
            return Err(Error::Input("nothing to fit".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Input("alpha must lie in (0, 1)".into()));
        }
        for b in &self.blocks {
            b.generator.validate()?;
            let g = &b.generator;
            for m in &self.fitted {
                let ok = match (g.circular(), g.regression()) {
                    (true, false) => matches!(m.as_str(), "cipc" | "gcpc" | "wc" | "pn"),
                    (true, true) => matches!(m.as_str(), "spml" | "pn" | "cipc" | "gcpc"),
                    (false, false) => matches!(m.as_str(), "sipc" | "sespc" | "sc" | "esag" | "iag"),
                    (false, true) => SphereRegModel::parse(m).is_ok(),
                };
                if !ok {
                    return Err(Error::Input(format!(
                        "model '{m}' cannot be fitted to block '{}'",
                        b.label
                    )));
                }
            }
            if let Some(k) = self.power {
                if g.regression() || k.circular() != g.circular() {
                    return Err(Error::Input(format!(
                        "power test does not apply to block '{}'",
                        b.label
                    )));
                }
            }
            if self.metric == Metric::Frobenius && !g.regression() {
                return Err(Error::Input("the Frobenius metric needs a regression generator".into()));
            }
            if self.metric != Metric::Frobenius && g.regression() {
                return Err(Error::Input(
                    "regression generators are scored with the Frobenius metric".into(),
                ));
            }
            if self.metric == Metric::ErrorM && g.circular() {
                return Err(Error::Input("Error(m) is defined for spherical models".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub block: String,
    /// Fitted model name or `power`.
    pub row: String,
    pub n: usize,
    pub value: f64,
    pub mc_se: f64,
    pub effective_b: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub schema_version: u32,
    pub spec: SimStudySpec,
    pub cells: Vec<CellResult>,
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.c
    }
}

struct Replicate {
    /// Per fitted model: the metric contribution (distance, or m̂ᵀm for Error(m)).
    values: Vec<Option<f64>>,
    reject: Option<bool>,
}

struct FitSummary {
    loglik: f64,
    estimate: DMatrix<f64>,
}

fn location_of(fit: &FitResult) -> Result<DMatrix<f64>> {
    if let Some(m) = fit.circular() {
        let mu = match m {
            CircularModel::Cipc(p) => p.mu,
            CircularModel::Gcpc(p) => p.mu,
            CircularModel::Pn(p) => p.mu,
            CircularModel::Wc(p) => Vector2::new(p.omega.cos(), p.omega.sin()) * p.lambda,
        };
        return Ok(DMatrix::from_column_slice(2, 1, mu.as_slice()));
    }
    if let Some(m) = fit.spherical() {
        return Ok(DMatrix::from_column_slice(3, 1, m.location().as_slice()));
    }
    Err(Error::FitFailed("fit carries no model".into()))
}

fn fit_one(model: &str, data: &SimData, cfg: &OptimizerConfig) -> Result<FitSummary> {
    let (loglik, estimate) = match data {
        SimData::Angles(a) => {
            let f = fit_circular(model, a, cfg)?;
            (f.loglik, location_of(&f)?)
        }
        SimData::Sphere(s) => {
            let f = fit_spherical(model, s, cfg)?;
            (f.loglik, location_of(&f)?)
        }
        SimData::CircReg(y, d) => {
            let f = fit_circular_regression(model, y, d, cfg)?;
            (f.loglik, f.coefficients)
        }
        SimData::SphereReg(y, d) => {
            let c = SphereRegConfig {
                optimizer: *cfg,
                rotation: None,
            };
            let f = fit_sphere_reg(SphereRegModel::parse(model)?, y, d, &c)?;
            (f.loglik, f.coefficients)
        }
    };
    if !loglik.is_finite() {
        return Err(Error::FitFailed(format!("{model} log-likelihood is not finite")));
    }
    Ok(FitSummary { loglik, estimate })
}

fn contribution(metric: Metric, est: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<f64> {
    match metric {
        Metric::Euclid | Metric::Frobenius => metric_euclid(est.as_slice(), truth.as_slice()),
        Metric::ErrorM => {
            let (a, b) = (est.norm(), truth.norm());
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::ZeroLocation);
            }
            Ok(est.dot(truth) / (a * b))
        }
    }
}

fn nested_names(kind: LrtKind) -> (&'static str, &'static str) {
    if kind.circular() {
        ("cipc", "gcpc")
    } else {
        ("sipc", "sespc")
    }
}

fn run_replicate(
    spec: &SimStudySpec,
    gen: &Generator,
    truth: &DMatrix<f64>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Replicate {
    let cfg = OptimizerConfig {
        restarts: spec.restarts.max(1),
        seed: spec.seed,
        ..Default::default()
    };
    let data = match gen.draw(n, rng) {
        Ok(d) => d,
        Err(_) => {
            return Replicate {
                values: vec![None; spec.fitted.len()],
                reject: None,
            }
        }
    };
    let fits: Vec<Option<FitSummary>> = spec.fitted.iter().map(|m| fit_one(m, &data, &cfg).ok()).collect();
    let values = fits
        .iter()
        .map(|f| {
            f.as_ref()
                .and_then(|f| contribution(spec.metric, &f.estimate, truth).ok())
        })
        .collect();
    let reject = spec.power.and_then(|kind| {
        let (h0, h1) = nested_names(kind);
        let ll = |name: &str| -> Option<f64> {
            match spec.fitted.iter().position(|m| m == name) {
                Some(i) => fits[i].as_ref().map(|f| f.loglik),
                None => fit_one(name, &data, &cfg).ok().map(|f| f.loglik),
            }
        };
        let (l0, l1) = (ll(h0)?, ll(h1)?);
        Some(LrtResult::from_logliks(l0, l1, kind.null()).rejects(spec.alpha))
    });
    Replicate { values, reject }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Random stream of replicate `b` in the cell (block, n).
pub fn replicate_rng(seed: u64, block: usize, n: usize, b: usize) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(seed) ^ block as u64) ^ n as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(b as u64);
    rng
}

fn run_cell(spec: &SimStudySpec, block: usize, n: usize) -> Result<Vec<Replicate>> {
    let gen = &spec.blocks[block].generator;
    let truth = gen.truth()?;
    let threads = if spec.threads == 0 {
        std::thread::available_parallelism().map(|t| t.get()).unwrap_or(1)
    } else {
        spec.threads
    }
    .min(spec.replicates)
    .max(1);
    let work = |b: usize| {
        let mut rng = replicate_rng(spec.seed, block, n, b);
        run_replicate(spec, gen, &truth, n, &mut rng)
    };
    if threads == 1 {
        return Ok((0..spec.replicates).map(work).collect());
    }
    let mut out: Vec<Option<Replicate>> = (0..spec.replicates).map(|_| None).collect();
    std::thread::scope(|s| {
        let chunk = spec.replicates.div_ceil(threads);
        for (t, slot) in out.chunks_mut(chunk).enumerate() {
            let work = &work;
            s.spawn(move || {
                for (i, r) in slot.iter_mut().enumerate() {
                    *r = Some(work(t * chunk + i));
                }
            });
        }
    });
    Ok(out.into_iter().map(|r| r.expect("every replicate is run")).collect())
}

fn summarise(metric: Metric, values: impl Iterator<Item = Option<f64>>, total: usize) -> (f64, f64, usize, usize) {
    let (mut s, mut s2, mut k) = (KahanSum::default(), KahanSum::default(), 0usize);
    for v in values.flatten() {
        s.add(v);
        s2.add(v * v);
        k += 1;
    }
    if k == 0 {
        return (f64::NAN, f64::NAN, 0, total);
    }
    let kf = k as f64;
    let mean = s.total() / kf;
    let var = if k > 1 {
        ((s2.total() - kf * mean * mean) / (kf - 1.0)).max(0.0)
    } else {
        f64::NAN
    };
    let se = (var / kf).sqrt();
    match metric {
        Metric::ErrorM => {
            let v = (2.0 * (1.0 - mean)).max(0.0).sqrt();
            // delta method, d/dc √(2(1 − c)) = −1/√(2(1 − c))
            let d = if v > 0.0 { se / v } else { f64::NAN };
            (v, d, k, total - k)
        }
        _ => (mean, se, k, total - k),
    }
}

/// Runs every (block, size) cell of the study.
pub fn simstudy_run(spec: &SimStudySpec) -> Result<StudyResult> {
    spec.validate()?;
    let mut cells = vec![];
    for (bi, block) in spec.blocks.iter().enumerate() {
        for &n in &spec.sizes {
            let reps = run_cell(spec, bi, n)?;
            for (mi, model) in spec.fitted.iter().enumerate() {
                let (value, mc_se, eff, fail) = summarise(spec.metric, reps.iter().map(|r| r.values[mi]), reps.len());
                cells.push(CellResult {
                    block: block.label.clone(),
                    row: model.clone(),
                    n,
                    value,
                    mc_se,
                    effective_b: eff,
                    failures: fail,
                });
            }
            if spec.power.is_some() {
                let decided: Vec<bool> = reps.iter().filter_map(|r| r.reject).collect();
                let k = decided.len();
                let rate = decided.iter().filter(|&&r| r).count() as f64 / k.max(1) as f64;
                cells.push(CellResult {
                    block: block.label.clone(),
                    row: "power".into(),
                    n,
                    value: if k > 0 { rate } else { f64::NAN },
                    mc_se: (rate * (1.0 - rate) / k.max(1) as f64).sqrt(),
                    effective_b: k,
                    failures: reps.len() - k,
                });
            }
        }
    }
    Ok(StudyResult {
        schema_version: SCHEMA_VERSION,
        spec: spec.clone(),
        cells,
    })
}

impl StudyResult {
    pub fn cell(&self, block: &str, row: &str, n: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.block == block && c.row == row && c.n == n)
    }

    /// One CSV row per cell.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        for c in &self.cells {
            w.serialize(c)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_csv(text: &str, spec: SimStudySpec) -> Result<StudyResult> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let cells = r.deserialize().collect::<std::result::Result<Vec<CellResult>, _>>()?;
        Ok(StudyResult {
            schema_version: SCHEMA_VERSION,
            spec,
            cells,
        })
    }

    /// The layout of the printed tables: one line per (block, row), one column per size.
    pub fn to_wide_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let mut header = vec!["block".to_string(), "row".to_string()];
        header.extend(self.spec.sizes.iter().map(|n| format!("n={n}")));
        w.write_record(&header)?;
        let mut rows: Vec<(&str, &str)> = vec![];
        for c in &self.cells {
            if !rows.contains(&(c.block.as_str(), c.row.as_str())) {
                rows.push((&c.block, &c.row));
            }
        }
        for (b, r) in rows {
            let mut rec = vec![b.to_string(), r.to_string()];
            for &n in &self.spec.sizes {
                rec.push(
                    self.cell(b, r, n)
                        .map(|c| format!("{:.3}", c.value))
                        .unwrap_or_default(),
                );
            }
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

const MEAN_3D: [f64; 3] = [5.843, 3.057, 3.758];
const COMMON_SHAPES: [f64; 6] = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

/// Study identifiers accepted by [`table_spec`].
pub const TABLE_IDS: [&str; 6] = ["1", "2", "3", "3a", "4", "5"];

/// The simulation designs behind the published tables. `sizes` defaults to
/// 50, 100, 300, 500, 1000 when empty.
pub fn table_spec(id: &str, sizes: &[usize], replicates: usize, seed: u64) -> Result<SimStudySpec> {
    let sizes = if sizes.is_empty() {
        vec![50, 100, 300, 500, 1000]
    } else {
        sizes.to_vec()
    };
    let s = |v: &[&str]| v.iter().map(|m| m.to_string()).collect::<Vec<_>>();
    let rhos = [0.1, 0.3, 0.5, 0.7, 0.9, 1.0];
    let unit_mean = {
        let v = Vector3::from(MEAN_3D).normalize();
        [v[0], v[1], v[2]]
    };
    let base = |name: &str, blocks, fitted, metric, power| SimStudySpec {
        name: name.to_string(),
        blocks,
        fitted,
        sizes: sizes.clone(),
        replicates,
        seed,
        metric,
        power,
        alpha: 0.05,
        restarts: 20,
        threads: 0,
    };
    let spec = match id {
        "1" => base(
            "table1",
            rhos.iter()
                .map(|&rho| StudyBlock {
                    label: format!("rho={rho}"),
                    generator: Generator::Gcpc { mu: [3.0, 10.0], rho },
                })
                .collect(),
            s(&["cipc", "gcpc"]),
            Metric::Euclid,
            Some(LrtKind::RhoOne),
        ),
        "2" => base(
            "table2",
            rhos.iter()
                .map(|&rho| StudyBlock {
                    label: format!("rho={rho}"),
                    generator: Generator::GcpcRegression {
                        coefficients: vec![vec![-0.2831, -0.892], vec![0.066, 0.090]],
                        rho,
                        covariate: Covariate::Gamma {
                            shape: 2.590,
                            rate: 0.054,
                        },
                    },
                })
                .collect(),
            s(&["spml", "cipc", "gcpc"]),
            Metric::Frobenius,
            None,
        ),
        "3" => base(
            "table3",
            COMMON_SHAPES
                .iter()
                .map(|&t| StudyBlock {
                    label: format!("theta={t}"),
                    generator: Generator::Sespc {
                        mu: MEAN_3D,
                        theta: [t, t],
                    },
                })
                .collect(),
            s(&["sipc", "sespc", "esag"]),
            Metric::Euclid,
            Some(LrtKind::Isotropy),
        ),
        "3a" => base(
            "table3a",
            COMMON_SHAPES
                .iter()
                .map(|&g| StudyBlock {
                    label: format!("gamma={g}"),
                    generator: Generator::Esag {
                        mu: MEAN_3D,
                        gamma: [g, g],
                    },
                })
                .collect(),
            s(&["sespc", "esag"]),
            Metric::Euclid,
            None,
        ),
        "4" => {
            let mut blocks: Vec<StudyBlock> = COMMON_SHAPES
                .iter()
                .map(|&t| StudyBlock {
                    label: format!("sespc theta={t}"),
                    generator: Generator::Sespc {
                        mu: unit_mean,
                        theta: [t, t],
                    },
                })
                .collect();
            blocks.extend(COMMON_SHAPES.iter().map(|&g| StudyBlock {
                label: format!("esag gamma={g}"),
                generator: Generator::Esag {
                    mu: unit_mean,
                    gamma: [g, g],
                },
            }));
            base(
                "table4",
                blocks,
                s(&["sc", "sipc", "sespc", "esag"]),
                Metric::ErrorM,
                None,
            )
        }
        "5" => {
            let coefficients = vec![vec![-1.0, 1.0, -0.5], vec![0.4, -0.5, 0.3]];
            let covariate = Covariate::Normal { mean: 0.0, sd: 1.0 };
            let block = |family: &str, shape: [f64; 2]| StudyBlock {
                label: format!("{family} shape=({},{})", shape[0], shape[1]),
                generator: Generator::SphereRegression {
                    family: family.to_string(),
                    coefficients: coefficients.clone(),
                    shape,
                    covariate,
                },
            };
            base(
                "table5",
                vec![
                    block("sespc", [0.0, 0.0]),
                    block("sespc", [-2.0, 2.0]),
                    block("esag", [0.0, 0.0]),
                    block("esag", [-2.0, 2.0]),
                ],
                s(&["sipc", "sespc", "esag"]),
                Metric::Frobenius,
                None,
            )
        }
        other => {
            return Err(Error::Input(format!(
                "unknown table '{other}'; expected one of {}",
                TABLE_IDS.join(", ")
            )))
        }
    };
    spec.validate()?;
    Ok(spec)
}
