//! Scalar special functions shared by the densities.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use libm::erfc;

use crate::geometry::arctan2;

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;
const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn norm_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Mills ratio Φ(−s)/φ(s) for s ≥ 0.
pub fn mills_ratio(s: f64) -> f64 {
    debug_assert!(s >= 0.0);
    if s < 5.0 {
        return 0.5 * erfc(s / SQRT_2) / norm_pdf(s);
    }
    // modified Lentz evaluation of 1/(s + 1/(s + 2/(s + 3/(s + ...))))
    let tiny = 1e-300;
    let mut f = s;
    let mut c = s;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64;
        d = s + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = s + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// log(1 + aΦ(a)/φ(a)), the angular factor of the projected normal on the circle.
pub fn ln_pn_factor(a: f64) -> f64 {
    if a >= 0.0 {
        // 1 + aΦ/φ = (φ + aΦ)/φ
        (norm_pdf(a) + a * norm_cdf(a)).ln() + 0.5 * a * a + 0.5 * LN_2PI
    } else {
        let s = -a;
        let v = if s < 30.0 {
            1.0 - s * mills_ratio(s)
        } else {
            let s2 = 1.0 / (s * s);
            s2 * (1.0 + s2 * (-3.0 + s2 * (15.0 + s2 * (-105.0 + s2 * (945.0 - 10395.0 * s2)))))
        };
        v.ln()
    }
}

/// log(e^{t²/2} M₂(t)) with M₂(t) = (1+t²)Φ(t) + tφ(t), the radial factor of the
/// angular Gaussian on the sphere.
pub fn ln_esag_factor(t: f64) -> f64 {
    if t >= 0.0 {
        0.5 * t * t + ((1.0 + t * t) * norm_cdf(t) + t * norm_pdf(t)).ln()
    } else {
        let s = -t;
        let v = if s < 40.0 {
            (1.0 + s * s) * mills_ratio(s) - s
        } else {
            let s2 = 1.0 / (s * s);
            2.0 * s2 / s * (1.0 + s2 * (-6.0 + s2 * (45.0 + s2 * (-420.0 + 4725.0 * s2))))
        };
        -0.5 * LN_2PI + v.ln()
    }
}

/// G(u) = (1+u²)(π/2 + arctan u) + u, the angular factor of the spherical projected
/// Cauchy. For u < 0 the two terms nearly cancel and a series in 1/|u| is used.
pub fn cauchy_sphere_factor(u: f64) -> f64 {
    if u >= -1.0 / 0.3 {
        // π/2 + arctan u = arctan2(1, −u)
        let phi = arctan2(1.0, -u).map(|a| a.radians()).unwrap_or(FRAC_PI_2);
        (1.0 + u * u) * phi + u
    } else {
        let v = -1.0 / u;
        let v2 = v * v;
        let mut term = v;
        let mut sum = 0.0;
        for k in 1..40 {
            let kk = k as f64;
            let c = 2.0 / ((2.0 * kk - 1.0) * (2.0 * kk + 1.0));
            let add = if k % 2 == 1 { c * term } else { -c * term };
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
            term *= v2;
        }
        sum
    }
}

/// The bracket of the closed-form spherical projected Cauchy density,
/// arctan2(√Δ, −A) − arctan2(√Δ, A) + π, written literally.
pub fn arctan2_bracket(sqrt_delta: f64, a: f64) -> f64 {
    let p = arctan2(sqrt_delta, -a).map(|x| x.radians()).unwrap_or(0.0);
    let m = arctan2(sqrt_delta, a).map(|x| x.radians()).unwrap_or(0.0);
    p - m + PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mills_ratio_branches_agree() {
        for s in [4.9, 5.0, 5.1, 6.0] {
            let direct = 0.5 * erfc(s / SQRT_2) / norm_pdf(s);
            assert!((mills_ratio(s) - direct).abs() < 1e-12 * direct, "{s}");
        }
        // asymptote 1/s
        assert!((mills_ratio(1e4) * 1e4 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn pn_factor_continuity() {
        for a in [-29.9f64, -30.0, -30.1, -3.0, 0.0, 2.0] {
            let direct = (1.0 + a * norm_cdf(a) / norm_pdf(a)).ln();
            if a.abs() < 10.0 {
                assert!((ln_pn_factor(a) - direct).abs() < 1e-12);
            }
        }
        let l = ln_pn_factor(-29.999_999);
        let r = ln_pn_factor(-30.000_001);
        assert!((l - r).abs() < 1e-6);
    }

    #[test]
    fn esag_factor_matches_definition() {
        // high-precision reference for the cancelling branch
        assert!((ln_esag_factor(-6.0) + 5.750_576_140_435_281).abs() < 1e-12);
        for t in [-2.0f64, -1.0, 0.0, 0.5, 4.0] {
            let m2 = (1.0 + t * t) * norm_cdf(t) + t * norm_pdf(t);
            let direct = 0.5 * t * t + m2.ln();
            assert!((ln_esag_factor(t) - direct).abs() < 1e-9, "{t}");
        }
        let l = ln_esag_factor(-39.999_999);
        let r = ln_esag_factor(-40.000_001);
        assert!((l - r).abs() < 1e-6);
    }

    #[test]
    fn cauchy_factor_matches_literal_form() {
        for u in [-3.0f64, -1.0, 0.0, 0.7, 5.0] {
            let lit = (1.0 + u * u) * (FRAC_PI_2 + u.atan()) + u;
            assert!((cauchy_sphere_factor(u) - lit).abs() < 1e-13 * lit.abs().max(1.0));
        }
        // both branches meet continuously
        let b = -1.0 / 0.3;
        let l = cauchy_sphere_factor(b + 1e-9);
        let r = cauchy_sphere_factor(b - 1e-9);
        assert!((l - r).abs() < 1e-9 * l);
        // leading behaviour 2/(3|u|)
        let u = -1e3;
        assert!((cauchy_sphere_factor(u) * 1.5e3 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bracket_identity() {
        for (d, a) in [(1.0, 0.0), (2.0, -3.0), (0.5, 4.0)] {
            let lit = arctan2_bracket(d, a);
            let via = 2.0 * (FRAC_PI_2 + (a / d).atan());
            assert!((lit - via).abs() < 1e-14);
        }
    }
}
