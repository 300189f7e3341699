//! Angles, unit vectors, tangent frames and rotations on S¹ and S².
//!
//! Internal math always works with Cartesian unit vectors. Angles are kept in
//! the half-open interval (−π, π].

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

/// An angle in radians normalized to (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    /// Wraps any finite real number into (−π, π].
    pub fn new(radians: f64) -> Angle {
        Angle(normalize_angle(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

/// Maps a real number into (−π, π].
pub fn normalize_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Two-argument arctangent following the six-case table: the cut is placed so
/// that `x < 0, y = 0` maps to +π.
pub fn arctan2(y: f64, x: f64) -> Result<Angle> {
    let v = if x > 0.0 {
        (y / x).atan()
    } else if x < 0.0 {
        if y >= 0.0 {
            (y / x).atan() + PI
        } else {
            (y / x).atan() - PI
        }
    } else if y > 0.0 {
        PI / 2.0
    } else if y < 0.0 {
        -PI / 2.0
    } else {
        return Err(Error::UndefinedAtOrigin);
    };
    Ok(Angle(v))
}

/// A point on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector2(Vector2<f64>);

impl UnitVector2 {
    /// Accepts a vector whose norm is 1 within 1e−12.
    pub fn new(v: Vector2<f64>) -> Result<Self> {
        check_unit(v.norm())?;
        Ok(UnitVector2(v))
    }

    /// Rescales a nonzero finite vector onto the circle.
    pub fn normalize(v: Vector2<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::ZeroLocation);
        }
        Ok(UnitVector2(v / n))
    }

    pub fn as_vector(&self) -> &Vector2<f64> {
        &self.0
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector3(Vector3<f64>);

impl UnitVector3 {
    /// Accepts a vector whose norm is 1 within 1e−12.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        check_unit(v.norm())?;
        Ok(UnitVector3(v))
    }

    pub fn normalize(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::ZeroLocation);
        }
        Ok(UnitVector3(v / n))
    }

    pub fn as_vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Vector3<f64> {
        self.0
    }
}

fn check_unit(norm: f64) -> Result<()> {
    if (norm - 1.0).abs() > UNIT_TOL || !norm.is_finite() {
        return Err(Error::InvalidParameter {
            name: "norm",
            value: norm,
            reason: "unit vector norm must be 1 within 1e-12",
        });
    }
    Ok(())
}

pub fn angle_to_unit(theta: Angle) -> UnitVector2 {
    let (s, c) = theta.0.sin_cos();
    UnitVector2(Vector2::new(c, s))
}

pub fn unit_to_angle(y: &UnitVector2) -> Angle {
    // a unit vector is never the origin
    arctan2(y.y(), y.x()).unwrap_or(Angle(0.0))
}

/// Orthonormal frame attached to a location vector μ ∈ ℝ³: two tangent axes
/// (ξ̃₁, ξ̃₂) and the location direction ξ₃ = μ/‖μ‖.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentFrame3 {
    pub xi1_tilde: Vector3<f64>,
    pub xi2_tilde: Vector3<f64>,
    pub xi3: Vector3<f64>,
}

/// Builds ξ̃₁ = (−μ₀², μ₁μ₂, μ₁μ₃)/(γμ₀), ξ̃₂ = (0, −μ₃, μ₂)/μ₀ with
/// μ₀ = (μ₂² + μ₃²)^{1/2}. Fails when μ₀ = 0.
pub fn tangent_frame(mu: &Vector3<f64>) -> Result<TangentFrame3> {
    let gamma = mu.norm();
    if !(gamma > 0.0) {
        return Err(Error::ZeroLocation);
    }
    let mu0 = (mu[1] * mu[1] + mu[2] * mu[2]).sqrt();
    if !(mu0 > 0.0) {
        return Err(Error::DegenerateDirection(mu0));
    }
    let xi1 = Vector3::new(-mu0 * mu0, mu[0] * mu[1], mu[0] * mu[2]) / (gamma * mu0);
    let xi2 = Vector3::new(0.0, -mu[2], mu[1]) / mu0;
    Ok(TangentFrame3 {
        xi1_tilde: xi1,
        xi2_tilde: xi2,
        xi3: mu / gamma,
    })
}

/// Rotates the tangent pair by ψ inside the plane orthogonal to ξ₃.
pub fn rotate_tangent_pair(frame: &TangentFrame3, psi: f64) -> (Vector3<f64>, Vector3<f64>) {
    let (s, c) = psi.sin_cos();
    let xi1 = frame.xi1_tilde * c + frame.xi2_tilde * s;
    let xi2 = -frame.xi1_tilde * s + frame.xi2_tilde * c;
    (xi1, xi2)
}

/// An element of O(3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation3 {
    pub matrix: Matrix3<f64>,
    pub reflect: bool,
}

impl Rotation3 {
    pub fn identity() -> Self {
        Rotation3 {
            matrix: Matrix3::identity(),
            reflect: false,
        }
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.matrix * v
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(b: f64) -> Matrix3<f64> {
    let (s, c) = b.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Z-Y-Z Euler product Rz(a)·Ry(b)·Rz(c), optionally post-multiplied by
/// diag(1, 1, −1) to reach the improper half of O(3).
pub fn euler_to_rotation(a: f64, b: f64, c: f64, reflect: bool) -> Rotation3 {
    let mut m = rot_z(a) * rot_y(b) * rot_z(c);
    if reflect {
        let r = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        m *= r;
    }
    Rotation3 { matrix: m, reflect }
}

/// Any rotation taking the north pole (0,0,1) onto `target`.
pub fn rotation_from_pole(target: &Vector3<f64>) -> Matrix3<f64> {
    let t = target.normalize();
    let colat = t[2].clamp(-1.0, 1.0).acos();
    let lon = if t[0] == 0.0 && t[1] == 0.0 {
        0.0
    } else {
        t[1].atan2(t[0])
    };
    rot_z(lon) * rot_y(colat)
}

/// Cartesian unit vector from colatitude (from +z) and longitude (east of +x), radians.
pub fn sphere_point(colatitude: f64, longitude: f64) -> Vector3<f64> {
    let (st, ct) = colatitude.sin_cos();
    let (sp, cp) = longitude.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

/// Latitude/longitude (degrees) of a unit vector using latitude = 90° − colatitude
/// from the +z axis and longitude east of +x.
pub fn lat_lon_degrees(y: &Vector3<f64>) -> (f64, f64) {
    let lat = 90.0 - y[2].clamp(-1.0, 1.0).acos().to_degrees();
    let lon = y[1].atan2(y[0]).to_degrees();
    (lat, lon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arctan2_cases() {
        assert!((arctan2(1.0, 0.0).unwrap().radians() - PI / 2.0).abs() < 1e-15);
        assert!((arctan2(0.0, -1.0).unwrap().radians() - PI).abs() < 1e-15);
        assert!((arctan2(-1.0, -1.0).unwrap().radians() + 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((arctan2(-2.0, 0.0).unwrap().radians() + PI / 2.0).abs() < 1e-15);
        assert_eq!(arctan2(0.0, 0.0), Err(Error::UndefinedAtOrigin));
    }

    #[test]
    fn arctan2_matches_case_table_on_sign_grid() {
        let vals = [-3.0, -1.0, -0.25, 0.0, 0.25, 1.0, 3.0];
        for &y in &vals {
            for &x in &vals {
                if x == 0.0 && y == 0.0 {
                    continue;
                }
                let a = arctan2(y, x).unwrap().radians();
                assert!(a > -PI && a <= PI);
                // std atan2 agrees except for the sign of zero on the negative axis
                let expected = if y == 0.0 && x < 0.0 { PI } else { y.atan2(x) };
                assert!((a - expected).abs() < 1e-14, "({y},{x})");
            }
        }
    }

    #[test]
    fn angle_unit_round_trip_examples() {
        let u = angle_to_unit(Angle::new(0.0));
        assert_eq!((u.x(), u.y()), (1.0, 0.0));
        let u = angle_to_unit(Angle::new(PI / 2.0));
        assert!(u.x().abs() < 1e-16 && (u.y() - 1.0).abs() < 1e-16);
        let u = angle_to_unit(Angle::new(1.107));
        assert!((u.x() - 0.447347).abs() < 1e-6 && (u.y() - 0.894361).abs() < 1e-6);

        let y = UnitVector2::new(Vector2::new(0.0, -1.0)).unwrap();
        assert!((unit_to_angle(&y).radians() + PI / 2.0).abs() < 1e-15);
        let y = UnitVector2::normalize(Vector2::new(0.448, 0.894)).unwrap();
        assert!((unit_to_angle(&y).radians() - 1.1065).abs() < 1e-3);
    }

    #[test]
    fn normalization_is_half_open() {
        assert_eq!(Angle::new(PI).radians(), PI);
        assert!((Angle::new(-PI).radians() - PI).abs() < 1e-15);
        assert!((Angle::new(3.0 * PI / 2.0).radians() + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn tangent_frame_examples() {
        let f = tangent_frame(&Vector3::new(0.0, 0.0, 1.0)).unwrap();
        assert!((f.xi1_tilde - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((f.xi2_tilde - Vector3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!((f.xi3 - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-15);

        assert!(matches!(
            tangent_frame(&Vector3::new(1.0, 0.0, 0.0)),
            Err(Error::DegenerateDirection(_))
        ));

        let mu = Vector3::new(5.843, 3.057, 3.758);
        let f = tangent_frame(&mu).unwrap();
        assert!((mu.norm() - 7.590024).abs() < 1e-6);
        assert!((f.xi3 - mu / mu.norm()).norm() < 1e-15);
        assert_orthonormal(&f.xi1_tilde, &f.xi2_tilde, &f.xi3, 1e-12);
    }

    #[test]
    fn rotate_pair_examples() {
        let f = tangent_frame(&Vector3::new(1.0, 2.0, 3.0)).unwrap();
        let (a, b) = rotate_tangent_pair(&f, 0.0);
        assert_eq!((a, b), (f.xi1_tilde, f.xi2_tilde));
        let (a, b) = rotate_tangent_pair(&f, PI / 2.0);
        assert!((a - f.xi2_tilde).norm() < 1e-15 && (b + f.xi1_tilde).norm() < 1e-15);
        let (a, _) = rotate_tangent_pair(&f, PI / 4.0);
        assert!((a.norm() - 1.0).abs() < 1e-15);
        assert!((a.dot(&f.xi1_tilde) - a.dot(&f.xi2_tilde)).abs() < 1e-15);
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_to_rotation(0.0, 0.0, 0.0, false).matrix, Matrix3::identity());
        let r = euler_to_rotation(PI, 0.0, 0.0, false).matrix;
        let d = Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0));
        assert!((r - d).norm() < 1e-15);
        let r = euler_to_rotation(0.3, 1.0, -2.0, true);
        assert!((r.determinant() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_from_pole_hits_target() {
        for t in [
            Vector3::new(0.3, -0.4, 0.5),
            Vector3::new(0.0, 0.0, -1.0),
            Vector3::new(0.0, 0.0, 1.0),
        ] {
            let r = rotation_from_pole(&t);
            assert!((r * Vector3::z() - t.normalize()).norm() < 1e-14);
        }
    }

    #[test]
    fn lat_lon_convention() {
        let (lat, lon) = lat_lon_degrees(&Vector3::new(0.0, 0.0, 1.0));
        assert!((lat - 90.0).abs() < 1e-12 && lon == 0.0);
        let (lat, lon) = lat_lon_degrees(&Vector3::new(0.0, 1.0, 0.0));
        assert!(lat.abs() < 1e-12 && (lon - 90.0).abs() < 1e-12);
    }

    fn assert_orthonormal(a: &Vector3<f64>, b: &Vector3<f64>, c: &Vector3<f64>, tol: f64) {
        let m = Matrix3::from_columns(&[*a, *b, *c]);
        assert!((m.transpose() * m - Matrix3::identity()).abs().max() < tol);
    }

    proptest! {
        #[test]
        fn frame_gram_is_identity(x in -10.0..10.0f64, y in -10.0..10.0f64, z in -10.0..10.0f64, psi in -4.0..4.0f64) {
            prop_assume!((y * y + z * z).sqrt() > 1e-6);
            let f = tangent_frame(&Vector3::new(x, y, z)).unwrap();
            assert_orthonormal(&f.xi1_tilde, &f.xi2_tilde, &f.xi3, 1e-10);
            let (a, b) = rotate_tangent_pair(&f, psi);
            assert_orthonormal(&a, &b, &f.xi3, 1e-10);
        }

        #[test]
        fn euler_is_orthogonal(a in -7.0..7.0f64, b in -4.0..4.0f64, c in -7.0..7.0f64, refl: bool) {
            let r = euler_to_rotation(a, b, c, refl).matrix;
            prop_assert!((r.transpose() * r - Matrix3::identity()).abs().max() < 1e-12);
            prop_assert!((r.determinant().abs() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn angle_round_trip(t in -3.14159..3.14159f64) {
            let back = unit_to_angle(&angle_to_unit(Angle::new(t))).radians();
            prop_assert!((back - t).abs() < 1e-12);
        }
    }
}
