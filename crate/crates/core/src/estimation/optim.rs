//! Derivative-free minimisation and finite-difference curvature.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings shared by every optimiser and fitting driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Relative objective spread at which the simplex is considered collapsed.
    pub tolerance: f64,
    /// Number of random starting points screened by multi-start drivers.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 20_000,
            tolerance: 1e-8,
            restarts: 1,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_restarts(restarts: usize) -> Self {
        OptimizerConfig {
            restarts,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                value: self.tolerance,
                reason: "tolerance must be positive",
            });
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter {
                name: "restarts",
                value: 0.0,
                reason: "at least one start is required",
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                value: 0.0,
                reason: "at least one iteration is required",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with dimension-adapted coefficients. The simplex is rebuilt around the
/// best vertex after each collapse until a rebuild no longer improves the objective.
/// Non-finite objective values are treated as +∞ except at the start point.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], cfg: &OptimizerConfig) -> Result<Minimum> {
    cfg.validate()?;
    let n = x0.len();
    let f0 = f(x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    if n == 0 {
        return Ok(Minimum {
            x: vec![],
            value: f0,
            iterations: 0,
            evaluations: 1,
            converged: true,
        });
    }
    let mut best = x0.to_vec();
    let mut best_f = f0;
    let mut iterations = 0;
    let mut evaluations = 1;
    let mut converged = false;
    for round in 0..8 {
        let scale = if round == 0 { 0.1 } else { 0.02 };
        let (x, fx, it, ev, ok) = nm_run(
            &mut f,
            &best,
            best_f,
            scale,
            cfg,
            cfg.max_iterations - iterations.min(cfg.max_iterations),
        );
        iterations += it;
        evaluations += ev;
        let gain = best_f - fx;
        if fx <= best_f {
            best = x;
            best_f = fx;
        }
        if !ok || iterations >= cfg.max_iterations {
            converged = false;
            break;
        }
        if round > 0 && gain <= cfg.tolerance * (1.0 + best_f.abs()) {
            converged = true;
            break;
        }
    }
    Ok(Minimum {
        x: best,
        value: best_f,
        iterations,
        evaluations,
        converged,
    })
}

fn nm_run<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    f0: f64,
    scale: f64,
    cfg: &OptimizerConfig,
    budget: usize,
) -> (Vec<f64>, f64, usize, usize, bool) {
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n > 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut evals = 0;
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    let mut vals = vec![f0];
    for i in 0..n {
        let mut p = x0.to_vec();
        let step = scale * x0[i].abs().max(1.0);
        p[i] += step;
        let mut v = eval(&p, &mut evals);
        if !v.is_finite() {
            p[i] = x0[i] - step;
            v = eval(&p, &mut evals);
        }
        pts.push(p);
        vals.push(v);
    }
    let xtol = cfg.tolerance.sqrt() * 1e-2;
    let mut it = 0;
    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        order.sort_by(|&a, &b| {
            vals[a]
                .partial_cmp(&vals[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let (ib, iw, isw) = (order[0], order[n], order[n - 1]);
        let fspread = vals[iw] - vals[ib];
        let xspread = pts
            .iter()
            .map(|p| p.iter().zip(&pts[ib]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let scale_x = pts[ib].iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if fspread.is_finite() && fspread <= cfg.tolerance * (1.0 + vals[ib].abs()) && xspread <= xtol * scale_x {
            return (pts[ib].clone(), vals[ib], it, evals, true);
        }
        if it >= budget {
            return (pts[ib].clone(), vals[ib], it, evals, false);
        }
        it += 1;
        let mut centroid = vec![0.0; n];
        for &k in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&pts[k]) {
                *c += v / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[iw]).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[ib] {
            let xe = along(alpha * beta);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[iw] = xe;
                vals[iw] = fe;
            } else {
                pts[iw] = xr;
                vals[iw] = fr;
            }
            continue;
        }
        if fr < vals[isw] {
            pts[iw] = xr;
            vals[iw] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[iw] {
            let xc = along(alpha * gamma);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[iw].min(fr) {
            pts[iw] = xc;
            vals[iw] = fc;
            continue;
        }
        // shrink towards the best vertex
        let xb = pts[ib].clone();
        for k in 0..=n {
            if k == ib {
                continue;
            }
            for (p, b) in pts[k].iter_mut().zip(&xb) {
                *p = b + delta * (*p - b);
            }
            vals[k] = eval(&pts[k], &mut evals);
        }
    }
}

/// Damped Newton ascent for a smooth objective with analytic gradient and Hessian.
/// The Hessian is shifted by τI until −H + τI is positive definite, and steps are halved
/// until the objective stops falling below its rounding noise. Returns
/// (x, value, gradient norm, converged, iterations).
pub fn newton_ascent<F: FnMut(&DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>)>(
    mut f: F,
    x0: DVector<f64>,
    grad_tol: f64,
    max_iter: usize,
) -> (DVector<f64>, f64, f64, bool, usize) {
    let mut x = x0;
    let (mut v, mut g, mut h) = f(&x);
    let n = x.len();
    for it in 0..max_iter {
        let gn = g.norm();
        if gn < grad_tol {
            return (x, v, gn, true, it);
        }
        let neg_h = -&h;
        let scale = neg_h.amax().max(1e-12);
        let mut tau = 0.0;
        let step = loop {
            let m = &neg_h + DMatrix::identity(n, n) * tau;
            if let Some(ch) = m.cholesky() {
                break Some(ch.solve(&g));
            }
            tau = if tau == 0.0 { 1e-6 * scale } else { tau * 4.0 };
            if tau > 1e12 * scale {
                break None;
            }
        };
        let Some(step) = step else {
            return (x, v, gn, false, it);
        };
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let cand = &x + &step * t;
            let (cv, cg, ch) = f(&cand);
            if cv.is_finite() && cv >= v - 64.0 * f64::EPSILON * v.abs() {
                let full = t == 1.0;
                if !full && cg.norm() >= gn {
                    // no progress left at machine resolution
                    return (x, v, gn, false, it);
                }
                x = cand;
                v = cv;
                g = cg;
                h = ch;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            return (x, v, gn, false, it);
        }
    }
    let gn = g.norm();
    (x, v, gn, gn < grad_tol, max_iter)
}

/// Brent's minimiser on [a, b] (golden section with parabolic steps).
pub fn brent_minimize<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_iter: usize) -> (f64, f64) {
    const CGOLD: f64 = 0.381_966_011_250_105;
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x = a + CGOLD * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + if d >= 0.0 { tol1 } else { -tol1 }
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Central finite-difference Hessian with steps hᵢ = 1e-4·max(|xᵢ|, 0.1).
pub fn numeric_hessian<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|v| 1e-4 * v.abs().max(0.1)).collect();
    let f0 = f(x);
    let mut hess = DMatrix::zeros(n, n);
    let mut p = x.to_vec();
    for i in 0..n {
        p[i] = x[i] + h[i];
        let fp = f(&p);
        p[i] = x[i] - h[i];
        let fm = f(&p);
        p[i] = x[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let mut at = |si: f64, sj: f64| {
                p[i] = x[i] + si * h[i];
                p[j] = x[j] + sj * h[j];
                let v = f(&p);
                p[i] = x[i];
                p[j] = x[j];
                v
            };
            let v = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// Central finite-difference gradient.
pub fn numeric_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], rel_step: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = rel_step * x[i].abs().max(1.0);
            p[i] = x[i] + h;
            let fp = f(&p);
            p[i] = x[i] - h;
            let fm = f(&p);
            p[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let m = nelder_mead(
            |x| (x[0] - 2.0).powi(2) + (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!(m.converged);
        assert!((m.x[0] - 2.0).abs() < 1e-6 && (m.x[1] + 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn rosenbrock() {
        let m = nelder_mead(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &OptimizerConfig::default(),
        )
        .unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn five_dimensional_quadratic() {
        let target = [1.0, -2.0, 0.5, 3.0, -0.1];
        let m = nelder_mead(
            |x| {
                x.iter()
                    .zip(&target)
                    .enumerate()
                    .map(|(i, (a, b))| (i as f64 + 1.0) * (a - b).powi(2))
                    .sum()
            },
            &[0.0; 5],
            &OptimizerConfig::default(),
        )
        .unwrap();
        for (a, b) in m.x.iter().zip(&target) {
            assert!((a - b).abs() < 1e-5);
        }
    }

    #[test]
    fn nonfinite_start_rejected() {
        let r = nelder_mead(|_| f64::NAN, &[0.0], &OptimizerConfig::default());
        assert_eq!(r.unwrap_err(), Error::NonFiniteObjective);
        let bad = OptimizerConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(nelder_mead(|x| x[0] * x[0], &[1.0], &bad).is_err());
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(4) + (x[1] * x[0] - 1.0).powi(2);
        let a = nelder_mead(f, &[2.0, 2.0], &OptimizerConfig::default()).unwrap();
        let b = nelder_mead(f, &[2.0, 2.0], &OptimizerConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn brent_parabola() {
        let (x, _) = brent_minimize(|x| (x - 0.7).powi(2) + 1.0, -3.0, 4.0, 1e-10, 200);
        assert!((x - 0.7).abs() < 1e-8);
    }

    #[test]
    fn hessian_of_quadratic() {
        let h = numeric_hessian(|x| 3.0 * x[0] * x[0] + x[0] * x[1] - 2.0 * x[1] * x[1], &[0.4, -1.0]);
        assert!((h[(0, 0)] - 6.0).abs() < 1e-5);
        assert!((h[(0, 1)] - 1.0).abs() < 1e-5);
        assert!((h[(1, 1)] + 4.0).abs() < 1e-5);
    }
}
