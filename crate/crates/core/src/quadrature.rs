//! Numerical integration backends.
//!
//! * [`integrate_interval`]: globally adaptive Gauss–Kronrod (7/15) on a finite interval.
//! * [`integrate_radial`]: (0, ∞) through the map r = u/(1−u).
//! * [`integrate_circle`]: one full turn, with the cut placed opposite a chosen center.
//! * [`integrate_sphere`]: adaptive Gauss–Kronrod in the polar cosine with trapezoid
//!   doubling in azimuth, optionally with the grid pole rotated onto a direction.
//! * [`SphereGrid`]: fixed Gauss–Legendre × trapezoid product rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::rotation_from_pole;

/// Tolerances and limits shared by the integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Gauss–Legendre nodes in the polar cosine for [`SphereGrid`] defaults.
    pub sphere_polar_order: usize,
    /// Trapezoid nodes in azimuth (starting order for the adaptive sphere rule).
    pub sphere_azimuth_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_subdivisions: 4000,
            sphere_polar_order: 64,
            sphere_azimuth_order: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: self.rel_tol,
                reason: "tolerance must be positive",
            });
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                value: self.abs_tol,
                reason: "tolerance must be positive",
            });
        }
        Ok(())
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel: (estimate, error, |f| integral).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err, res_abs)
}

/// Globally adaptive Gauss–Kronrod integration on [a, b].
pub fn integrate_interval<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    let (v0, e0, abs0) = gk15(&mut f, a, b);
    let mut evaluations = 15;
    let mut total = v0;
    let mut total_err = e0;
    let mut total_abs = abs0;
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        value: v0,
        error: e0,
        abs: abs0,
    });
    let mut subdivisions = 0;
    loop {
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= target || total_err <= 50.0 * f64::EPSILON * total_abs {
            break;
        }
        if subdivisions >= spec.max_subdivisions || !total.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        let seg = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // interval exhausted at machine resolution
            heap.push(seg);
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        let (v1, e1, a1) = gk15(&mut f, seg.a, mid);
        let (v2, e2, a2) = gk15(&mut f, mid, seg.b);
        evaluations += 30;
        subdivisions += 1;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        total_abs += a1 + a2 - seg.abs;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
            abs: a1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
            abs: a2,
        });
    }
    // resum to shed accumulated cancellation in the running totals
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
        subdivisions,
    })
}

/// ∫₀^∞ f(r) dr after substituting r = u/(1−u), dr = du/(1−u)².
pub fn integrate_radial<F: FnMut(f64) -> f64>(mut f: F, spec: &QuadratureSpec) -> Result<QuadResult> {
    integrate_interval(
        |u| {
            let w = 1.0 - u;
            let r = u / w;
            let v = f(r) / (w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        spec,
    )
}

/// ∫ f(θ) dθ over one full turn. The integration window is (center − π, center + π],
/// so placing `center` at a density peak keeps the cut in the tail.
pub fn integrate_circle_centered<F: FnMut(f64) -> f64>(f: F, center: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    integrate_interval(f, center - PI, center + PI, spec)
}

/// ∫ f(θ) dθ over (−π, π].
pub fn integrate_circle<F: FnMut(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<QuadResult> {
    integrate_circle_centered(f, 0.0, spec)
}

/// Azimuthal trapezoid integral at fixed polar cosine, doubling the node count until
/// two successive orders agree.
fn azimuth_integral<F: FnMut(&Vector3<f64>) -> f64>(
    f: &mut F,
    t: f64,
    rot: &Matrix3<f64>,
    start: usize,
    tol: f64,
    evaluations: &mut usize,
) -> f64 {
    let st = (1.0 - t * t).max(0.0).sqrt();
    let point = |phi: f64| {
        let (s, c) = phi.sin_cos();
        rot * Vector3::new(st * c, st * s, t)
    };
    let mut m = start.max(4);
    let mut sum: f64 = (0..m).map(|k| f(&point(TAU * k as f64 / m as f64))).sum();
    *evaluations += m;
    let mut prev = sum * TAU / m as f64;
    let mut agreed = 0;
    while m < 1 << 14 {
        let extra: f64 = (0..m).map(|k| f(&point(TAU * (k as f64 + 0.5) / m as f64))).sum();
        *evaluations += m;
        sum += extra;
        m *= 2;
        let cur = sum * TAU / m as f64;
        if (cur - prev).abs() <= tol * cur.abs().max(1e-300) {
            agreed += 1;
            if agreed >= 2 {
                return cur;
            }
        } else {
            agreed = 0;
        }
        prev = cur;
    }
    prev
}

/// ∫_{S²} f(y) dS(y). The polar axis of the integration grid is rotated onto `pole`
/// when given (typically the location direction of a concentrated density).
pub fn integrate_sphere<F: FnMut(&Vector3<f64>) -> f64>(
    mut f: F,
    pole: Option<&Vector3<f64>>,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let rot = match pole {
        Some(p) if p.norm() > 0.0 => rotation_from_pole(p),
        _ => Matrix3::identity(),
    };
    let mut evaluations = 0usize;
    let inner_tol = (spec.rel_tol * 0.1).max(1e-15);
    let start = spec.sphere_azimuth_order;
    let res = integrate_interval(
        |t| azimuth_integral(&mut f, t, &rot, start, inner_tol, &mut evaluations),
        -1.0,
        1.0,
        spec,
    )?;
    Ok(QuadResult { evaluations, ..res })
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Fixed product rule: Gauss–Legendre in the polar cosine × trapezoid in azimuth.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    cos_nodes: Vec<f64>,
    cos_weights: Vec<f64>,
    azimuth: usize,
}

impl SphereGrid {
    pub fn new(polar: usize, azimuth: usize) -> Self {
        let (x, w) = gauss_legendre(polar.max(1));
        SphereGrid {
            cos_nodes: x,
            cos_weights: w,
            azimuth: azimuth.max(1),
        }
    }

    pub fn len(&self) -> usize {
        self.cos_nodes.len() * self.azimuth
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Applies the rule, with the grid pole rotated onto `pole` when given.
    pub fn integrate<F: FnMut(&Vector3<f64>) -> f64>(&self, mut f: F, pole: Option<&Vector3<f64>>) -> f64 {
        let rot = match pole {
            Some(p) if p.norm() > 0.0 => rotation_from_pole(p),
            _ => Matrix3::identity(),
        };
        let dphi = TAU / self.azimuth as f64;
        let mut total = 0.0;
        for (&t, &w) in self.cos_nodes.iter().zip(&self.cos_weights) {
            let st = (1.0 - t * t).max(0.0).sqrt();
            let mut ring = 0.0;
            for k in 0..self.azimuth {
                let (s, c) = (dphi * k as f64).sin_cos();
                ring += f(&(rot * Vector3::new(st * c, st * s, t)));
            }
            total += w * ring * dphi;
        }
        total
    }
}
