use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{Vector2, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use pcauchy::circular::{cdf_numeric, gcpc_cdf_closed, CipcParams, CircularModel, GcpcParams, PnParams, WcParams};
use pcauchy::estimation::{
    fit_cipc, fit_circular, fit_sipc, fit_spherical, FittedModel, OptimizerConfig, DEFAULT_MULTI_START,
};
use pcauchy::geometry::{lat_lon_degrees, sphere_point, UnitVector3};
use pcauchy::inference::{bootstrap_lrt, kld, run_lrt, simstudy_run, table_spec, LrtKind, LrtResult, TestData};
use pcauchy::io::{angles_to_csv, parse_dataset, sphere_to_csv, table_to_csv, FitReport, ParseOptions, RegressReport};
use pcauchy::quadrature::QuadratureSpec;
use pcauchy::regression::{
    circular_correlation, fit_circular_regression, fit_sphere_reg, DesignMatrix, RotationGrid, SphereRegConfig,
    SphereRegModel,
};
use pcauchy::spherical::{theta_from_rho_psi, EsagParams, ScParams, SespcParams, SipcParams, SphericalModel};
use pcauchy::Error;

#[derive(Parser)]
#[command(
    name = "pcauchy",
    version,
    about = "Projected Cauchy models for circular and spherical data",
    after_help = "Angles are in radians unless --degrees is given. Spherical grids report \
latitude = 90 deg minus the colatitude from +z and longitude east of +x, both in degrees.\n\
Exit codes: 0 success, 1 numerical failure, 2 input error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to a dataset and print a JSON report
    Fit(FitArgs),
    /// Fit a regression model with the `x_` columns as covariates
    Regress(RegressArgs),
    /// Draw a sample and write it as CSV
    Sample(SampleArgs),
    /// Evaluate a density on a grid (CSV)
    Grid(GridArgs),
    /// Probability of an arc under a GCPC, closed form or numeric
    Cdf(CdfArgs),
    /// Likelihood ratio test, optionally bootstrap calibrated
    Lrt(LrtArgs),
    /// Kullback-Leibler divergence between two model specifications
    Kld(KldArgs),
    /// Run one of the simulation studies
    Simstudy(SimArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random starts for the multi-start fits
    #[arg(long, default_value_t = DEFAULT_MULTI_START)]
    restarts: usize,
    /// Relative convergence tolerance of the simplex
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Output file (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            tolerance: self.tol,
            restarts: self.restarts.max(1),
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct FitArgs {
    file: PathBuf,
    #[arg(long)]
    model: String,
    #[arg(long)]
    degrees: bool,
    /// Also test the model against its nested special case (gcpc: rho = 1, sespc: theta = 0)
    #[arg(long)]
    test: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RegressArgs {
    file: PathBuf,
    /// spml, cipc, gcpc, sipc, sespc, iag or esag
    #[arg(long)]
    model: String,
    #[arg(long)]
    degrees: bool,
    /// Search the response rotation Q on the default Euler grid (spherical models)
    #[arg(long)]
    rotation: bool,
    /// Leave out the intercept column
    #[arg(long)]
    no_intercept: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Default)]
struct ModelParams {
    /// Location vector, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    psi: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// SESPC shape (theta1,theta2)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
    /// ESAG shape (gamma1,gamma2)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    shape: Option<Vec<f64>>,
    /// JSON model specification (inline or a file path) instead of the flags
    #[arg(long)]
    params: Option<String>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    model: String,
    #[arg(short = 'n', long)]
    n: usize,
    #[command(flatten)]
    params: ModelParams,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    model: String,
    #[command(flatten)]
    params: ModelParams,
    /// Points on the circle
    #[arg(long, default_value_t = 360)]
    points: usize,
    #[arg(long, default_value_t = 90)]
    nlat: usize,
    #[arg(long, default_value_t = 180)]
    nlon: usize,
    /// Fix the latitude (degrees) and vary longitude over --nlon points
    #[arg(long, allow_hyphen_values = true)]
    transect_lat: Option<f64>,
    /// Fix the colatitude from +z (degrees) and vary longitude
    #[arg(long)]
    transect_colat: Option<f64>,
    /// Fix the longitude (degrees) and vary latitude over --nlat points
    #[arg(long, allow_hyphen_values = true)]
    transect_lon: Option<f64>,
    #[arg(long)]
    degrees: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CdfArgs {
    #[arg(long, default_value = "gcpc")]
    model: String,
    #[command(flatten)]
    params: ModelParams,
    #[arg(long, allow_hyphen_values = true)]
    lower: f64,
    #[arg(long, allow_hyphen_values = true)]
    upper: f64,
    #[arg(long)]
    degrees: bool,
    /// Use quadrature instead of the closed form
    #[arg(long)]
    numeric: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LrtArgs {
    /// rho1, rho1-chi2 or isotropy
    test: String,
    file: PathBuf,
    #[arg(long)]
    degrees: bool,
    /// Bootstrap resamples; 0 uses the asymptotic reference only
    #[arg(long = "B", default_value_t = 0)]
    b: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct KldArgs {
    /// JSON specification of p, e.g. {"model":"gcpc","mu":[1,2],"rho":0.5}
    #[arg(long)]
    p: String,
    /// JSON specification of q
    #[arg(long)]
    q: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// 1, 2, 3, 3a, 4 or 5
    #[arg(long)]
    table: String,
    #[arg(long = "B", default_value_t = 200)]
    b: usize,
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Worker threads, 0 for all cores
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Only run blocks whose label matches one of these
    #[arg(long, value_delimiter = ';')]
    blocks: Vec<String>,
    /// Print the table layout (rows by sizes) instead of one row per cell
    #[arg(long)]
    wide: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

type Res<T> = std::result::Result<T, Error>;

fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            let nl = if text.ends_with('\n') { "" } else { "\n" };
            match write!(out, "{text}{nl}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|e| Error::Io(e.to_string())),
            }
        }
    }
}

fn json<T: Serialize>(v: &T) -> Res<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

fn versioned<T: Serialize>(v: &T) -> Res<String> {
    json(&Versioned {
        schema_version: pcauchy::io::SCHEMA_VERSION,
        body: v,
    })
}

fn vec2(v: &[f64], name: &str) -> Res<Vector2<f64>> {
    match v {
        [a, b] => Ok(Vector2::new(*a, *b)),
        _ => Err(input(format!("--{name} needs two values"))),
    }
}

fn vec3(v: &[f64], name: &str) -> Res<Vector3<f64>> {
    match v {
        [a, b, c] => Ok(Vector3::new(*a, *b, *c)),
        _ => Err(input(format!("--{name} needs three values"))),
    }
}

fn need<T: Copy>(v: Option<T>, name: &str, model: &str) -> Res<T> {
    v.ok_or_else(|| input(format!("{model} needs --{name}")))
}

/// Rebuilds a deserialized model through the validating constructors.
fn checked(m: FittedModel) -> Res<FittedModel> {
    Ok(match m {
        FittedModel::Circular(c) => FittedModel::Circular(match c {
            CircularModel::Cipc(p) => CircularModel::Cipc(CipcParams::new(p.mu)?),
            CircularModel::Gcpc(p) => CircularModel::Gcpc(GcpcParams::new(p.mu, p.rho)?),
            CircularModel::Wc(p) => CircularModel::Wc(WcParams::new(p.omega, p.lambda)?),
            CircularModel::Pn(p) => CircularModel::Pn(PnParams::new(p.mu)?),
        }),
        FittedModel::Spherical(s) => FittedModel::Spherical(match s {
            SphericalModel::Sipc(p) => SphericalModel::Sipc(SipcParams::new(p.mu)?),
            SphericalModel::Sespc(p) => SphericalModel::Sespc(SespcParams::new(p.mu, p.theta)?),
            SphericalModel::Sc(p) => SphericalModel::Sc(ScParams::new(UnitVector3::normalize(p.mu)?, p.lambda)?),
            SphericalModel::Esag(p) => SphericalModel::Esag(EsagParams::new(p.mu, p.gamma)?),
            SphericalModel::Iag { mu } => SphericalModel::Esag(EsagParams::iag(mu)?),
        }),
    })
}

fn model_from_json(text: &str) -> Res<FittedModel> {
    let body = if std::path::Path::new(text).is_file() {
        std::fs::read_to_string(text)?
    } else {
        text.to_string()
    };
    let m: FittedModel = serde_json::from_str(&body).map_err(|e| input(format!("model specification: {e}")))?;
    checked(m)
}

fn model_from_flags(model: &str, p: &ModelParams) -> Res<FittedModel> {
    if let Some(j) = &p.params {
        let m = model_from_json(j)?;
        let name = match &m {
            FittedModel::Circular(c) => c.name(),
            FittedModel::Spherical(s) => s.name(),
        };
        if name != model && !(model == "iag" && name == "esag") {
            return Err(input(format!("--params describes a {name} model, not {model}")));
        }
        return Ok(m);
    }
    let mu2 = || -> Res<Vector2<f64>> {
        match (&p.mu, p.omega, p.gamma) {
            (Some(m), _, _) => vec2(m, "mu"),
            (None, Some(w), Some(g)) => Ok(Vector2::new(w.cos(), w.sin()) * g),
            _ => Err(input(format!("{model} needs --mu or --omega with --gamma"))),
        }
    };
    let mu3 = || -> Res<Vector3<f64>> {
        vec3(
            p.mu.as_deref().ok_or_else(|| input(format!("{model} needs --mu")))?,
            "mu",
        )
    };
    Ok(match model {
        "cipc" => FittedModel::Circular(CircularModel::Cipc(CipcParams::new(mu2()?)?)),
        "gcpc" => FittedModel::Circular(CircularModel::Gcpc(GcpcParams::new(
            mu2()?,
            need(p.rho, "rho", model)?,
        )?)),
        "wc" => FittedModel::Circular(CircularModel::Wc(WcParams::new(
            need(p.omega, "omega", model)?,
            need(p.lambda, "lambda", model)?,
        )?)),
        "pn" => FittedModel::Circular(CircularModel::Pn(PnParams::new(mu2()?)?)),
        "sipc" => FittedModel::Spherical(SphericalModel::Sipc(SipcParams::new(mu3()?)?)),
        "sespc" => {
            let theta = match (&p.theta, p.rho, p.psi) {
                (Some(t), _, _) => vec2(t, "theta")?,
                (None, Some(r), Some(s)) => {
                    let (a, b) = theta_from_rho_psi(r, s)?;
                    Vector2::new(a, b)
                }
                (None, None, None) => Vector2::zeros(),
                _ => return Err(input("sespc needs --theta or both --rho and --psi")),
            };
            FittedModel::Spherical(SphericalModel::Sespc(SespcParams::new(mu3()?, theta)?))
        }
        "sc" => FittedModel::Spherical(SphericalModel::Sc(ScParams::new(
            UnitVector3::normalize(mu3()?)?,
            need(p.lambda, "lambda", model)?,
        )?)),
        "esag" => {
            let g = match &p.shape {
                Some(s) => vec2(s, "shape")?,
                None => Vector2::zeros(),
            };
            FittedModel::Spherical(SphericalModel::Esag(EsagParams::new(mu3()?, g)?))
        }
        "iag" => FittedModel::Spherical(SphericalModel::Esag(EsagParams::iag(mu3()?)?)),
        other => return Err(input(format!("unknown model '{other}'"))),
    })
}

fn parse_opts(degrees: bool) -> ParseOptions {
    ParseOptions {
        degrees,
        ..Default::default()
    }
}

fn is_circular(model: &str) -> Res<bool> {
    match model {
        "cipc" | "gcpc" | "wc" | "pn" | "spml" => Ok(true),
        "sipc" | "sespc" | "sc" | "esag" | "iag" => Ok(false),
        other => Err(input(format!("unknown model '{other}'"))),
    }
}

fn cmd_fit(a: &FitArgs) -> Res<()> {
    let data = parse_dataset(&a.file, &parse_opts(a.degrees))?;
    let cfg = a.common.optimizer();
    let mut report = if is_circular(&a.model)? {
        let y = data.angles()?;
        let fit = fit_circular(&a.model, &y, &cfg)?;
        let mut r = FitReport::new(&a.model, y.len(), a.common.seed, &fit);
        if a.test {
            if a.model != "gcpc" {
                return Err(input("--test is available for gcpc and sespc fits"));
            }
            let h0 = fit_cipc(&y, &cfg)?;
            r.test = Some(LrtResult::from_logliks(h0.loglik, fit.loglik, LrtKind::RhoOne.null()));
        }
        r
    } else {
        let y = data.sphere()?;
        let fit = fit_spherical(&a.model, y, &cfg)?;
        let mut r = FitReport::new(&a.model, y.len(), a.common.seed, &fit);
        if a.test {
            if a.model != "sespc" {
                return Err(input("--test is available for gcpc and sespc fits"));
            }
            let h0 = fit_sipc(y, &cfg)?;
            r.test = Some(LrtResult::from_logliks(h0.loglik, fit.loglik, LrtKind::Isotropy.null()));
        }
        r
    };
    report.diagnostics.retain(|d| !d.is_empty());
    let text = match a.format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut w = String::from("name,value,std_error\n");
            for e in &report.estimates {
                w += &format!(
                    "{},{:.12e},{}\n",
                    e.name,
                    e.value,
                    e.std_error.map(|s| format!("{s:.12e}")).unwrap_or_default()
                );
            }
            w
        }
    };
    emit(&a.common.out, &text)
}

fn cmd_regress(a: &RegressArgs) -> Res<()> {
    let data = parse_dataset(&a.file, &parse_opts(a.degrees))?;
    let x = data
        .covariates
        .clone()
        .ok_or_else(|| input("regression needs at least one `x_` covariate column"))?;
    let design = if a.no_intercept {
        DesignMatrix::new(x)?
    } else {
        DesignMatrix::with_intercept(&x)?
    };
    let cfg = a.common.optimizer();
    let (fit, corr) = if is_circular(&a.model)? {
        let y = data.angles()?;
        let fit = fit_circular_regression(&a.model, &y, &design, &cfg)?;
        let corr = circular_correlation(&y, &fit.fitted_angles(&design)).ok();
        (fit, corr)
    } else {
        let y = data.sphere()?;
        let rc = SphereRegConfig {
            optimizer: cfg,
            rotation: a.rotation.then(RotationGrid::default),
        };
        (fit_sphere_reg(SphereRegModel::parse(&a.model)?, y, &design, &rc)?, None)
    };
    let report = RegressReport {
        schema_version: pcauchy::io::SCHEMA_VERSION,
        n: data.len(),
        seed: a.common.seed,
        covariates: data.covariate_names.clone(),
        fit,
        circular_correlation: corr,
    };
    emit(&a.common.out, &json(&report)?)
}

fn cmd_sample(a: &SampleArgs) -> Res<()> {
    let m = model_from_flags(&a.model, &a.params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let text = match m {
        FittedModel::Circular(c) => angles_to_csv(&c.sample(a.n, &mut rng))?,
        FittedModel::Spherical(s) => sphere_to_csv(&s.sample(a.n, &mut rng))?,
    };
    emit(&a.out, &text)
}

fn cmd_grid(a: &GridArgs) -> Res<()> {
    let m = model_from_flags(&a.model, &a.params)?;
    let text = match m {
        FittedModel::Circular(c) => {
            if a.points < 2 {
                return Err(input("--points must be at least 2"));
            }
            let rows: Vec<Vec<f64>> = (0..a.points)
                .map(|k| {
                    let t = -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / a.points as f64;
                    vec![if a.degrees { t.to_degrees() } else { t }, c.pdf(t)]
                })
                .collect();
            table_to_csv(&["theta", "density"], &rows)?
        }
        FittedModel::Spherical(s) => {
            if a.nlat < 1 || a.nlon < 1 {
                return Err(input("--nlat and --nlon must be positive"));
            }
            let f = s.ln_pdf_fn();
            let row = |colat: f64, lon: f64| {
                let y = sphere_point(colat, lon);
                let (la, lo) = lat_lon_degrees(&y);
                vec![lo, la, f(&y).exp()]
            };
            let lon_at = |j: usize| -180.0 + 360.0 * (j as f64 + 0.5) / a.nlon as f64;
            let lat_at = |i: usize| -90.0 + 180.0 * (i as f64 + 0.5) / a.nlat as f64;
            let fixed_colat = match (a.transect_lat, a.transect_colat) {
                (Some(l), None) => Some(90.0 - l),
                (None, Some(c)) => Some(c),
                (None, None) => None,
                _ => return Err(input("give only one of --transect-lat and --transect-colat")),
            };
            let rows: Vec<Vec<f64>> = match (fixed_colat, a.transect_lon) {
                (Some(c), None) => {
                    if !(0.0..=180.0).contains(&c) {
                        return Err(input("transect colatitude must lie in [0, 180] degrees"));
                    }
                    (0..a.nlon)
                        .map(|j| row(c.to_radians(), lon_at(j).to_radians()))
                        .collect()
                }
                (None, Some(lon)) => (0..a.nlat)
                    .map(|i| row((90.0 - lat_at(i)).to_radians(), lon.to_radians()))
                    .collect(),
                (None, None) => (0..a.nlat)
                    .flat_map(|i| (0..a.nlon).map(move |j| (i, j)))
                    .map(|(i, j)| row((90.0 - lat_at(i)).to_radians(), lon_at(j).to_radians()))
                    .collect(),
                _ => return Err(input("a transect fixes either latitude or longitude")),
            };
            table_to_csv(&["lon", "lat", "density"], &rows)?
        }
    };
    emit(&a.out, &text)
}

#[derive(Serialize)]
struct CdfReport {
    model: String,
    lower: f64,
    upper: f64,
    method: &'static str,
    probability: f64,
}

fn cmd_cdf(a: &CdfArgs) -> Res<()> {
    let m = model_from_flags(&a.model, &a.params)?;
    let conv = |v: f64| if a.degrees { v.to_radians() } else { v };
    let (lo, hi) = (conv(a.lower), conv(a.upper));
    let FittedModel::Circular(c) = m else {
        return Err(input("cdf is defined for circular models"));
    };
    let closed = match (&c, a.numeric) {
        (CircularModel::Gcpc(p), false) => Some(gcpc_cdf_closed(lo, hi, p)),
        (CircularModel::Cipc(p), false) => Some(gcpc_cdf_closed(lo, hi, &GcpcParams::new(p.mu, 1.0)?)),
        _ => None,
    };
    // arcs outside the closed-form window fall back to quadrature
    let (method, probability) = match closed {
        Some(Ok(v)) => ("closed", v),
        Some(Err(Error::OutOfWindow { .. })) | None => ("numeric", cdf_numeric(|t| c.pdf(t), lo, hi)?),
        Some(Err(e)) => return Err(e),
    };
    let r = CdfReport {
        model: a.model.clone(),
        lower: lo,
        upper: hi,
        method,
        probability,
    };
    emit(&a.out, &versioned(&r)?)
}

#[derive(Serialize)]
struct LrtReport {
    test: LrtKind,
    n: usize,
    seed: u64,
    #[serde(flatten)]
    result: LrtResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    bootstrap: Option<pcauchy::inference::BootstrapResult>,
}

fn cmd_lrt(a: &LrtArgs) -> Res<()> {
    let kind = LrtKind::parse(&a.test)?;
    let data = parse_dataset(&a.file, &parse_opts(a.degrees))?;
    let cfg = a.common.optimizer();
    let angles;
    let td = if kind.circular() {
        angles = data.angles()?;
        TestData::Angles(&angles)
    } else {
        TestData::Sphere(data.sphere()?)
    };
    let result = run_lrt(td, kind, &cfg)?;
    let bootstrap = if a.b > 0 {
        Some(bootstrap_lrt(td, kind, a.b, a.common.seed, &cfg)?)
    } else {
        None
    };
    let r = LrtReport {
        test: kind,
        n: data.len(),
        seed: a.common.seed,
        result,
        bootstrap,
    };
    emit(&a.common.out, &versioned(&r)?)
}

fn cmd_kld(a: &KldArgs) -> Res<()> {
    let p = model_from_json(&a.p)?;
    let q = model_from_json(&a.q)?;
    let spec = QuadratureSpec::with_tolerances(a.tol, 1e-14);
    let r = kld(&p, &q, &spec)?;
    emit(&a.out, &versioned(&r)?)
}

fn cmd_simstudy(a: &SimArgs) -> Res<()> {
    let mut spec = table_spec(&a.table, &a.sizes, a.b, a.seed)?;
    spec.restarts = a.restarts;
    spec.threads = a.threads;
    if !a.blocks.is_empty() {
        spec.blocks.retain(|b| a.blocks.contains(&b.label));
        if spec.blocks.is_empty() {
            return Err(input("no block matches --blocks"));
        }
    }
    let r = simstudy_run(&spec)?;
    let text = match (a.format, a.wide) {
        (Format::Json, _) => json(&r)?,
        (Format::Csv, true) => r.to_wide_csv()?,
        (Format::Csv, false) => r.to_csv()?,
    };
    emit(&a.out, &text)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_)
        | Error::Parse { .. }
        | Error::Io(_)
        | Error::ShapeMismatch(_)
        | Error::InvalidParameter { .. }
        | Error::TooFewObservations { .. }
        | Error::RankDeficient { .. }
        | Error::OutOfWindow { .. }
        | Error::ZeroLocation
        | Error::NotPositiveDefinite => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Regress(a) => cmd_regress(a),
        Command::Sample(a) => cmd_sample(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Cdf(a) => cmd_cdf(a),
        Command::Lrt(a) => cmd_lrt(a),
        Command::Kld(a) => cmd_kld(a),
        Command::Simstudy(a) => cmd_simstudy(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
