//! Likelihood ratio tests, bootstrap calibration, divergences, accuracy metrics and
//! the simulation study harness.

pub mod bootstrap;
pub mod kld;
pub mod lrt;
pub mod metrics;
pub mod simstudy;

pub use bootstrap::{bootstrap_lrt, BootstrapResult};
pub use kld::{kld, kld_circular, kld_spherical, KldResult};
pub use lrt::{
    fit_nested, lrt_isotropy_sphere, lrt_rho_one, lrt_rho_one_chi2, run_lrt, LrtKind, LrtResult, NullDistribution,
    TestData,
};
pub use metrics::{metric_error_m, metric_euclid, metric_frobenius};
pub use simstudy::{
    replicate_rng, simstudy_run, table_spec, CellResult, Covariate, Generator, Metric, SimStudySpec, StudyBlock,
    StudyResult, SCHEMA_VERSION, TABLE_IDS,
};
