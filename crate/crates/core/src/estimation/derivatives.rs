//! Analytic log-likelihood derivatives for the circular projected Cauchy models.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::special::LN_2PI;

/// Log-likelihood with its gradient and Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivs<V, M> {
    pub loglik: f64,
    pub gradient: V,
    pub hessian: M,
}

/// CIPC in the location-vector parameterisation:
/// ℓ = −Σ log(√(γ²+1) − yᵢᵀμ) − n log 2π.
pub fn cipc_mu_derivs(data: &[f64], mu: &Vector2<f64>) -> Derivs<Vector2<f64>, Matrix2<f64>> {
    let g2 = mu.norm_squared();
    let r = (g2 + 1.0).sqrt();
    let dmu = mu / r;
    let d2 = (Matrix2::identity() * r - mu * mu.transpose() / r) / (g2 + 1.0);
    let mut ll = 0.0;
    let mut grad = Vector2::zeros();
    let mut hess = Matrix2::zeros();
    for &t in data {
        let y = Vector2::new(t.cos(), t.sin());
        let d = crate::circular::cipc_denominator(*mu, y);
        let v = dmu - y;
        ll -= d.ln();
        grad -= v / d;
        hess -= (d2 * d - v * v.transpose()) / (d * d);
    }
    Derivs {
        loglik: ll - data.len() as f64 * LN_2PI,
        gradient: grad,
        hessian: hess,
    }
}

/// CIPC in polar form (ω, γ): ℓ = −Σ log(√(γ²+1) − γ cos(θᵢ − ω)) − n log 2π.
pub fn cipc_polar_derivs(data: &[f64], omega: f64, gamma: f64) -> Derivs<Vector2<f64>, Matrix2<f64>> {
    let r = (gamma * gamma + 1.0).sqrt();
    let mu = Vector2::new(gamma * omega.cos(), gamma * omega.sin());
    let mut ll = 0.0;
    let (mut gw, mut gg) = (0.0, 0.0);
    let (mut hww, mut hgg, mut hwg) = (0.0, 0.0, 0.0);
    for &t in data {
        let (s, c) = (t - omega).sin_cos();
        let d = crate::circular::cipc_denominator(mu, Vector2::new(t.cos(), t.sin()));
        let a = gamma / r - c;
        ll -= d.ln();
        gw += gamma * s / d;
        gg -= a / d;
        hww += gamma * gamma * s * s / (d * d) - gamma * c / d;
        hgg += a * a / (d * d) - (1.0 / r - gamma * gamma / (r * r * r)) / d;
        hwg += s / (r * d * d);
    }
    Derivs {
        loglik: ll - data.len() as f64 * LN_2PI,
        gradient: Vector2::new(gw, gg),
        hessian: Matrix2::new(hww, hwg, hwg, hgg),
    }
}

/// GCPC in (ω, γ, ρ). Per observation, with x = θ − ω, b = cos²x + sin²x/ρ, q = √b and
/// g = q√(γ²+1) − γ cos x,
/// ℓᵢ = −½ log ρ − ½ log b − log g − log 2π.
/// Valid on the whole circle.
pub fn gcpc_derivs(data: &[f64], omega: f64, gamma: f64, rho: f64) -> Derivs<Vector3<f64>, Matrix3<f64>> {
    let r = (gamma * gamma + 1.0).sqrt();
    let ir = 1.0 / rho;
    let mut ll = 0.0;
    let mut grad = Vector3::zeros();
    let mut hess = Matrix3::zeros();
    for &t in data {
        let (s, c) = (t - omega).sin_cos();
        let b = c * c + s * s * ir;
        let q = b.sqrt();
        let g = if gamma * c > 0.0 {
            (c * c + s * s * r * r * ir) / (q * r + gamma * c)
        } else {
            q * r - gamma * c
        };
        // derivatives of b; index 0 = ω, 1 = γ, 2 = ρ
        let b1 = [2.0 * s * c * (1.0 - ir), 0.0, -s * s * ir * ir];
        let cos2 = c * c - s * s;
        let b2 = [
            [2.0 * cos2 * (ir - 1.0), 0.0, 2.0 * s * c * ir * ir],
            [0.0, 0.0, 0.0],
            [2.0 * s * c * ir * ir, 0.0, 2.0 * s * s * ir * ir * ir],
        ];
        let mut q1 = [0.0; 3];
        let mut q2 = [[0.0; 3]; 3];
        for i in 0..3 {
            q1[i] = b1[i] / (2.0 * q);
        }
        for i in 0..3 {
            for j in 0..3 {
                q2[i][j] = b2[i][j] / (2.0 * q) - b1[i] * b1[j] / (4.0 * q * q * q);
            }
        }
        let g1 = [q1[0] * r - gamma * s, q * gamma / r - c, q1[2] * r];
        let g_wg = q1[0] * gamma / r - s;
        let g_gr = q1[2] * gamma / r;
        let g2 = [
            [q2[0][0] * r + gamma * c, g_wg, q2[0][2] * r],
            [g_wg, q / (r * r * r), g_gr],
            [q2[0][2] * r, g_gr, q2[2][2] * r],
        ];
        ll += -0.5 * b.ln() - g.ln();
        for i in 0..3 {
            grad[i] += -0.5 * b1[i] / b - g1[i] / g;
            for j in 0..3 {
                hess[(i, j)] +=
                    -0.5 * (b2[i][j] / b - b1[i] * b1[j] / (b * b)) - (g2[i][j] / g - g1[i] * g1[j] / (g * g));
            }
        }
    }
    let n = data.len() as f64;
    grad[2] -= 0.5 * n * ir;
    hess[(2, 2)] += 0.5 * n * ir * ir;
    Derivs {
        loglik: ll - 0.5 * n * rho.ln() - n * LN_2PI,
        gradient: grad,
        hessian: hess,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circular::{CipcParams, GcpcParams};
    use crate::estimation::optim::{numeric_gradient, numeric_hessian};

    fn data() -> Vec<f64> {
        (0..40)
            .map(|i| -3.0 + 0.15 * i as f64 + 0.01 * (i as f64).sin())
            .collect()
    }

    #[test]
    fn cipc_mu_matches_fd() {
        let d = data();
        let mu = Vector2::new(0.7, -1.2);
        let an = cipc_mu_derivs(&d, &mu);
        let ll = |x: &[f64]| {
            let p = CipcParams::new(Vector2::new(x[0], x[1])).unwrap();
            d.iter().map(|&t| p.ln_pdf(t)).sum::<f64>()
        };
        assert!((an.loglik - ll(&[0.7, -1.2])).abs() < 1e-10);
        let g = numeric_gradient(ll, &[0.7, -1.2], 1e-5);
        let h = numeric_hessian(ll, &[0.7, -1.2]);
        for i in 0..2 {
            assert!((an.gradient[i] - g[i]).abs() < 1e-6 * an.gradient.norm());
            for j in 0..2 {
                assert!((an.hessian[(i, j)] - h[(i, j)]).abs() < 1e-4 * an.hessian.norm());
            }
        }
    }

    #[test]
    fn polar_and_vector_agree() {
        let d = data();
        let (w, g) = (0.4f64, 2.0f64);
        let a = cipc_polar_derivs(&d, w, g);
        let b = cipc_mu_derivs(&d, &Vector2::new(g * w.cos(), g * w.sin()));
        assert!((a.loglik - b.loglik).abs() < 1e-10);
    }

    #[test]
    fn gcpc_matches_fd() {
        let d = data();
        let x0 = [0.5, 1.7, 0.3];
        let an = gcpc_derivs(&d, x0[0], x0[1], x0[2]);
        let ll = |x: &[f64]| {
            let p = GcpcParams::from_polar(x[0], x[1], x[2]).unwrap();
            d.iter().map(|&t| p.ln_pdf(t)).sum::<f64>()
        };
        assert!((an.loglik - ll(&x0)).abs() < 1e-9);
        let g = numeric_gradient(ll, &x0, 1e-6);
        let h = numeric_hessian(ll, &x0);
        for i in 0..3 {
            assert!((an.gradient[i] - g[i]).abs() < 1e-6 * an.gradient.norm(), "{i}");
            for j in 0..3 {
                assert!(
                    (an.hessian[(i, j)] - h[(i, j)]).abs() < 1e-4 * an.hessian.norm(),
                    "{i}{j}"
                );
            }
        }
    }
}
