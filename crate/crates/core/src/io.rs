//! Dataset ingestion and the serialized report formats.
//!
//! A dataset is a CSV file with a header. The response is either a `theta` column of
//! angles or the unit-vector columns `y1,y2` or `y1,y2,y3`; any column whose name
//! starts with `x_` is a covariate. Spherical points are reported as latitude
//! (90° minus the colatitude from +z) and longitude (east from +x).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::circular::{lambda_from_gamma, CircularModel};
use crate::error::{Error, Result};
use crate::estimation::{FitResult, FittedModel};
use crate::inference::LrtResult;
use crate::regression::RegressionFit;
use crate::spherical::SphericalModel;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Angles,
    Unit2,
    Unit3,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Responses {
    /// radians
    Angles(Vec<f64>),
    Unit2(Vec<Vector2<f64>>),
    Unit3(Vec<Vector3<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub responses: Responses,
    pub covariates: Option<DMatrix<f64>>,
    pub covariate_names: Vec<String>,
    pub source: Option<PathBuf>,
    /// Whether `theta` was read in degrees.
    pub degrees: bool,
}

impl Dataset {
    pub fn kind(&self) -> DatasetKind {
        match self.responses {
            Responses::Angles(_) => DatasetKind::Angles,
            Responses::Unit2(_) => DatasetKind::Unit2,
            Responses::Unit3(_) => DatasetKind::Unit3,
        }
    }

    pub fn len(&self) -> usize {
        match &self.responses {
            Responses::Angles(a) => a.len(),
            Responses::Unit2(v) => v.len(),
            Responses::Unit3(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Circular responses as angles in radians.
    pub fn angles(&self) -> Result<Vec<f64>> {
        match &self.responses {
            Responses::Angles(a) => Ok(a.clone()),
            Responses::Unit2(v) => Ok(v.iter().map(|y| y[1].atan2(y[0])).collect()),
            Responses::Unit3(_) => Err(Error::Input("circular model requested for spherical data".into())),
        }
    }

    pub fn sphere(&self) -> Result<&[Vector3<f64>]> {
        match &self.responses {
            Responses::Unit3(v) => Ok(v),
            _ => Err(Error::Input("spherical model requested for circular data".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParseOptions {
    pub degrees: bool,
    /// Unit vectors within this distance of norm one are renormalized.
    pub norm_tolerance: f64,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            degrees: false,
            norm_tolerance: 1e-6,
        }
    }
}

pub fn parse_dataset(path: &Path, opts: &ParseOptions) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut d = parse_dataset_str(&text, opts)?;
    d.source = Some(path.to_path_buf());
    Ok(d)
}

pub fn parse_dataset_str(text: &str, opts: &ParseOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.to_string())
        .collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(Error::Parse {
            line: 1,
            message: "missing header".into(),
        });
    }
    let col = |name: &str| header.iter().position(|h| h == name);
    let (kind, resp_cols) = if let Some(t) = col("theta") {
        (DatasetKind::Angles, vec![t])
    } else {
        match (col("y1"), col("y2"), col("y3")) {
            (Some(a), Some(b), Some(c)) => (DatasetKind::Unit3, vec![a, b, c]),
            (Some(a), Some(b), None) => (DatasetKind::Unit2, vec![a, b]),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: "header needs a `theta` column or `y1,y2(,y3)` columns".into(),
                })
            }
        }
    };
    let cov_cols: Vec<usize> = (0..header.len()).filter(|&i| header[i].starts_with("x_")).collect();
    let mut resp: Vec<Vec<f64>> = vec![];
    let mut covs: Vec<f64> = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(i + 2),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(i + 2);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        let num = |c: usize| -> Result<f64> {
            let s = &rec[c];
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("column `{}`: `{s}` is not a finite number", header[c]),
                })
        };
        let mut r: Vec<f64> = resp_cols.iter().map(|&c| num(c)).collect::<Result<_>>()?;
        if kind == DatasetKind::Angles {
            if opts.degrees {
                r[0] = r[0].to_radians();
            }
        } else {
            let n = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if (n - 1.0).abs() > opts.norm_tolerance {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "row {}: response norm {n} is not within {} of one",
                        resp.len() + 1,
                        opts.norm_tolerance
                    ),
                });
            }
            r.iter_mut().for_each(|v| *v /= n);
        }
        for &c in &cov_cols {
            covs.push(num(c)?);
        }
        resp.push(r);
    }
    if resp.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no observations".into(),
        });
    }
    let n = resp.len();
    let responses = match kind {
        DatasetKind::Angles => Responses::Angles(resp.into_iter().map(|r| r[0]).collect()),
        DatasetKind::Unit2 => Responses::Unit2(resp.into_iter().map(|r| Vector2::new(r[0], r[1])).collect()),
        DatasetKind::Unit3 => Responses::Unit3(resp.into_iter().map(|r| Vector3::new(r[0], r[1], r[2])).collect()),
    };
    let covariates = (!cov_cols.is_empty()).then(|| DMatrix::from_row_slice(n, cov_cols.len(), &covs));
    Ok(Dataset {
        responses,
        covariates,
        covariate_names: cov_cols.iter().map(|&c| header[c].clone()).collect(),
        source: None,
        degrees: opts.degrees,
    })
}

/// CSV with a `theta` header, readable by [`parse_dataset`].
pub fn angles_to_csv(theta: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["theta"])?;
    for t in theta {
        w.write_record([format!("{t:.17e}")])?;
    }
    finish(w)
}

/// CSV with `y1,y2,y3` headers, readable by [`parse_dataset`].
pub fn sphere_to_csv(points: &[Vector3<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["y1", "y2", "y3"])?;
    for p in points {
        w.write_record([
            format!("{:.17e}", p[0]),
            format!("{:.17e}", p[1]),
            format!("{:.17e}", p[2]),
        ])?;
    }
    finish(w)
}

/// Writes a header and rows of numbers.
pub fn table_to_csv(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:.12e}")))?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// Reparameterisations reported next to the raw estimates.
pub fn derived_views(model: &FittedModel) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    let mut put = |k: &str, v: f64| {
        m.insert(k.to_string(), v);
    };
    match model {
        FittedModel::Circular(c) => match c {
            CircularModel::Cipc(p) => {
                put("gamma", p.gamma());
                put("lambda", lambda_from_gamma(p.gamma()));
                if let Some(w) = p.omega() {
                    put("omega", w);
                }
            }
            CircularModel::Gcpc(p) => {
                put("gamma", p.gamma());
                put("omega", p.omega());
                put("rho", p.rho);
            }
            CircularModel::Wc(p) => {
                put("omega", p.omega);
                put("lambda", p.lambda);
                put("gamma", crate::circular::gamma_from_lambda(p.lambda));
            }
            CircularModel::Pn(p) => {
                put("gamma", p.mu.norm());
                put("omega", p.mu[1].atan2(p.mu[0]));
            }
        },
        FittedModel::Spherical(s) => match s {
            SphericalModel::Sipc(p) => put("gamma", p.gamma()),
            SphericalModel::Sespc(p) => {
                put("gamma", p.gamma());
                let (rho, psi) = p.rho_psi();
                put("rho", rho);
                put("psi", psi);
            }
            SphericalModel::Sc(p) => put("lambda", p.lambda),
            SphericalModel::Esag(p) => put("gamma", p.mu.norm()),
            SphericalModel::Iag { mu } => put("gamma", mu.norm()),
        },
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub model: String,
    pub n: usize,
    pub seed: u64,
    pub estimates: Vec<Estimate>,
    pub derived: BTreeMap<String, f64>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    pub starts_used: usize,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub test: Option<LrtResult>,
}

impl FitReport {
    pub fn new(model: &str, n: usize, seed: u64, fit: &FitResult) -> Self {
        FitReport {
            schema_version: SCHEMA_VERSION,
            model: model.to_string(),
            n,
            seed,
            estimates: fit
                .names
                .iter()
                .enumerate()
                .map(|(i, name)| Estimate {
                    name: name.clone(),
                    value: fit.estimates[i],
                    std_error: fit.std_errors.as_ref().map(|s| s[i]),
                })
                .collect(),
            derived: derived_views(&fit.model),
            loglik: fit.loglik,
            converged: fit.converged,
            iterations: fit.iterations,
            starts_used: fit.starts_used,
            diagnostics: fit.diagnostics.clone(),
            test: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressReport {
    pub schema_version: u32,
    pub n: usize,
    pub seed: u64,
    pub covariates: Vec<String>,
    #[serde(flatten)]
    pub fit: RegressionFit,
    /// Circular correlation between observed and fitted angles (circular models only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub circular_correlation: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_angles_with_covariates() {
        let d = parse_dataset_str(
            "theta,x_a\n180,1\n90,2\n",
            &ParseOptions {
                degrees: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(d.kind(), DatasetKind::Angles);
        let a = d.angles().unwrap();
        assert!((a[0] - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(d.covariates.unwrap()[(1, 0)], 2.0);
    }

    #[test]
    fn rejects_bad_norm_with_row_and_line() {
        let e = parse_dataset_str("y1,y2,y3\n1,0,0\n0.9,0,0\n", &ParseOptions::default()).unwrap_err();
        match e {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("row 2"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let d = parse_dataset_str("y1,y2\n1.0000005,0\n", &ParseOptions::default()).unwrap();
        match d.responses {
            Responses::Unit2(v) => assert_eq!(v[0].norm(), 1.0),
            _ => panic!(),
        }
    }

    #[test]
    fn errors_on_empty_ragged_and_text() {
        assert!(matches!(
            parse_dataset_str("", &ParseOptions::default()),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_dataset_str("theta\n", &ParseOptions::default()),
            Err(Error::Parse { .. })
        ));
        let e = parse_dataset_str("theta,x_1\n1,2\n3\n", &ParseOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = parse_dataset_str("theta\n1\nabc\n", &ParseOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
    }

    #[test]
    fn sphere_round_trip() {
        let pts = vec![Vector3::new(0.0, 0.6, 0.8), Vector3::new(1.0, 0.0, 0.0)];
        let d = parse_dataset_str(&sphere_to_csv(&pts).unwrap(), &ParseOptions::default()).unwrap();
        assert_eq!(d.sphere().unwrap(), pts.as_slice());
    }
}
