//! Quaternion algebra with slice and polar decompositions.
//!
//! Every nonreal quaternion lies on exactly one slice `C_I = R + R I` once the
//! sign of the imaginary coordinate is fixed to `y >= 0`. Real quaternions lie
//! on every slice and get the canonical unit `I = j` (`phi = psi = pi/2`).

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.w.hypot(self.x).hypot(self.y.hypot(self.z))
    }

    pub fn vector(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    pub fn vector_norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn is_real(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::Domain("inverse of the zero quaternion".into()));
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    pub fn powi(self, n: u32) -> Self {
        let mut acc = Self::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// `e^q = e^w (cos|v| + v/|v| sin|v|)`.
    pub fn exp(self) -> Self {
        let v = self.vector_norm();
        let ew = self.w.exp();
        if v == 0.0 {
            return Self::real(ew);
        }
        let s = ew * v.sin() / v;
        Self::new(ew * v.cos(), self.x * s, self.y * s, self.z * s)
    }

    /// `(x, y, I)` with `q = x + I y`, `y >= 0`, `I` a unit imaginary quaternion.
    pub fn slice_parts(self) -> (f64, f64, Quaternion) {
        let y = self.vector_norm();
        if y == 0.0 {
            (self.w, 0.0, Self::J)
        } else {
            (self.w, y, Self::new(0.0, self.x / y, self.y / y, self.z / y))
        }
    }

    /// The complex number `x + i y` representing `q` on its own slice.
    pub fn slice_complex(self) -> (Complex64, Quaternion) {
        let (x, y, unit) = self.slice_parts();
        (Complex64::new(x, y), unit)
    }

    /// `a + b I` for `z = a + i b`.
    pub fn from_complex(z: Complex64, unit: Quaternion) -> Self {
        Self::new(z.re, z.im * unit.x, z.im * unit.y, z.im * unit.z)
    }

    /// True when the two quaternions commute to the given relative tolerance,
    /// i.e. lie on a common slice.
    pub fn same_slice(self, other: Self, tol: f64) -> bool {
        let c = self * other - other * self;
        c.norm() <= tol * (1.0 + self.norm() * other.norm())
    }

    pub fn to_slice(self) -> SlicePoint {
        let (x, y, unit) = self.slice_parts();
        let unit = if y == 0.0 {
            ImaginaryUnit::CANONICAL
        } else {
            ImaginaryUnit::from_vector(unit.x, unit.y, unit.z)
        };
        SlicePoint { x, y, unit }
    }

    pub fn from_slice(s: SlicePoint) -> Self {
        let u = s.unit.to_quaternion();
        Self::new(s.x, s.y * u.x, s.y * u.y, s.y * u.z)
    }

    /// Polar form `r (cos theta + I sin theta)` with `theta` in `[0, pi]`.
    pub fn to_polar(self) -> Polar {
        let s = self.to_slice();
        Polar {
            r: self.norm(),
            theta: s.y.atan2(s.x),
            unit: s.unit,
        }
    }
}

pub fn mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

pub fn inverse(q: Quaternion) -> Result<Quaternion> {
    q.inverse()
}

pub fn to_slice(q: Quaternion) -> SlicePoint {
    q.to_slice()
}

pub fn from_slice(s: SlicePoint) -> Quaternion {
    Quaternion::from_slice(s)
}

pub fn to_polar(q: Quaternion) -> Polar {
    q.to_polar()
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i + {}j + {}k)", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Sum for Quaternion {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

/// Unit imaginary quaternion `cos(phi) i + sin(phi) cos(psi) j + sin(phi) sin(psi) k`.
///
/// Integration runs over the hemisphere `phi, psi in (0, pi)`; units produced by
/// [`Quaternion::to_slice`] may have `psi` in `(-pi, pi]` because `y >= 0` already
/// fixes the sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImaginaryUnit {
    pub phi: f64,
    pub psi: f64,
}

impl ImaginaryUnit {
    /// `j`, used for real points where the slice is not determined.
    pub const CANONICAL: Self = Self {
        phi: FRAC_PI_2,
        psi: 0.0,
    };

    pub fn new(phi: f64, psi: f64) -> Self {
        Self { phi, psi }
    }

    pub fn i() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn j() -> Self {
        Self::CANONICAL
    }

    pub fn k() -> Self {
        Self::new(FRAC_PI_2, FRAC_PI_2)
    }

    pub fn from_vector(x: f64, y: f64, z: f64) -> Self {
        let phi = y.hypot(z).atan2(x);
        let psi = if y == 0.0 && z == 0.0 { 0.0 } else { z.atan2(y) };
        Self { phi, psi }
    }

    pub fn to_quaternion(self) -> Quaternion {
        let (sp, cp) = self.phi.sin_cos();
        let (ss, cs) = self.psi.sin_cos();
        Quaternion::new(0.0, cp, sp * cs, sp * ss)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicePoint {
    pub x: f64,
    pub y: f64,
    pub unit: ImaginaryUnit,
}

impl SlicePoint {
    pub fn assemble(self) -> Quaternion {
        Quaternion::from_slice(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub r: f64,
    pub theta: f64,
    pub unit: ImaginaryUnit,
}

impl Polar {
    pub fn assemble(self) -> Quaternion {
        let (s, c) = self.theta.sin_cos();
        Quaternion::from_slice(SlicePoint {
            x: self.r * c,
            y: self.r * s,
            unit: self.unit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn hamilton_rules() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        assert_eq!(j * i, -k);
        for u in [i, j, k] {
            assert_eq!(u * u, Quaternion::real(-1.0));
        }
        assert_eq!((i * 2.0) * (i * 2.0), Quaternion::real(-4.0));
    }

    #[test]
    fn modulus_identity() {
        let q = Quaternion::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(q * q.conj(), Quaternion::real(30.0));
    }

    #[test]
    fn inverse_examples() {
        let q = Quaternion::I * 2.0;
        assert_eq!(q.inverse().unwrap(), Quaternion::I * -0.5);
        assert_eq!(Quaternion::ONE.inverse().unwrap(), Quaternion::ONE);
        let p = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        assert!(close(p.inverse().unwrap() * p, Quaternion::ONE, 1e-15));
        assert!(Quaternion::ZERO.inverse().is_err());
    }

    #[test]
    fn slice_examples() {
        let s = Quaternion::new(3.0, 4.0, 0.0, 0.0).to_slice();
        assert_eq!((s.x, s.y), (3.0, 4.0));
        assert!(close(s.unit.to_quaternion(), Quaternion::I, 1e-16));

        let r = Quaternion::real(5.0).to_slice();
        assert_eq!((r.x, r.y), (5.0, 0.0));
        assert_eq!(r.unit, ImaginaryUnit::CANONICAL);
        assert!(close(r.unit.to_quaternion(), Quaternion::J, 1e-16));
    }

    #[test]
    fn polar_examples() {
        let p = Quaternion::I.scale(2.0).to_polar();
        assert_eq!(p.r, 2.0);
        assert!((p.theta - FRAC_PI_2).abs() < 1e-15);
        assert!(close(p.unit.to_quaternion(), Quaternion::I, 1e-16));

        let m = Quaternion::real(-1.0).to_polar();
        assert_eq!(m.r, 1.0);
        assert!((m.theta - PI).abs() < 1e-15);
        assert_eq!(m.unit, ImaginaryUnit::CANONICAL);
    }

    #[test]
    fn exp_matches_slice_complex_exp() {
        let q = Quaternion::new(0.3, -0.4, 1.2, 0.5);
        let (z, unit) = q.slice_complex();
        assert!(close(q.exp(), Quaternion::from_complex(z.exp(), unit), 1e-15));
    }

    #[test]
    fn hemisphere_units_square_to_minus_one() {
        for &(phi, psi) in &[(0.3, 0.2), (1.5, 2.9), (2.8, 1.0)] {
            let u = ImaginaryUnit::new(phi, psi).to_quaternion();
            assert!(close(u * u, Quaternion::real(-1.0), 1e-15));
            assert!((u.norm() - 1.0).abs() < 1e-15);
        }
    }
}
