//! Quaternionic Ito-Hermite polynomials `H_{m,n}`, the normalized basis
//! `phi_{m,n}`, monomials `e_{m,n}` and the Hermite functions `psi_{m,n}`.
//!
//! `H_{m,n}(q) = sum_l (-1)^l l! C(m,l) C(n,l) q^{m-l} conj(q)^{n-l}`. On the
//! slice of `q` the powers commute, so `H_{m,n}(q)` is the complex Ito-Hermite
//! polynomial of `z = x + i y` lifted through `i -> I_q`.
//!
//! `psi_{m,n}(p) = -e^{-|p|^2} H_{m,n-1}(p)`. The index `-1` is reached through
//! `H_{-1,n} = -conj(q)^{n+1}/(n+1) 1F1(1; n+2; |q|^2)` and `H_{m,-1} = conj(H_{-1,m})`.

use crate::dd::{ComplexDD, DoubleDouble};
use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::specfun::{kummer_1f1, laguerre_generalized, log_factorial, weighted_kummer_one};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest polynomial index accepted by the evaluators.
pub const MAX_INDEX: u32 = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisIndex {
    pub m: i32,
    pub n: i32,
}

impl BasisIndex {
    pub fn new(m: i32, n: i32) -> Result<Self> {
        if m < -1 || n < -1 || (m == -1 && n == -1) {
            return Err(Error::Index(format!("({m}, {n}) is outside the extended family")));
        }
        if m > MAX_INDEX as i32 || n > MAX_INDEX as i32 {
            return Err(Error::Index(format!(
                "({m}, {n}) exceeds the supported index {MAX_INDEX}"
            )));
        }
        Ok(Self { m, n })
    }

    pub fn is_polynomial(self) -> bool {
        self.m >= 0 && self.n >= 0
    }

    /// Angular frequency `m - n`.
    pub fn frequency(self) -> i32 {
        self.m - self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisFunctionKind {
    Monomial,
    Hermite,
    Normalized,
    Psi,
}

impl BasisFunctionKind {
    pub fn evaluate(self, idx: BasisIndex, q: Quaternion, area: f64) -> Result<Quaternion> {
        let (m, n) = nonneg(idx)?;
        Ok(match self {
            Self::Monomial => monomial(m, n, q),
            Self::Hermite => hermite(m, n, q),
            Self::Normalized => phi_normalized(m, n, q, area),
            Self::Psi => return psi_function(m, n, q),
        })
    }
}

fn nonneg(idx: BasisIndex) -> Result<(u32, u32)> {
    if idx.m < 0 || idx.n < 0 {
        return Err(Error::Index(format!(
            "({}, {}) needs nonnegative indices",
            idx.m, idx.n
        )));
    }
    Ok((idx.m as u32, idx.n as u32))
}

fn check_range(m: u32, n: u32) {
    assert!(
        m <= MAX_INDEX && n <= MAX_INDEX,
        "Ito-Hermite index ({m}, {n}) exceeds {MAX_INDEX}"
    );
}

/// `(-1)^l l! C(m,l) C(n,l)` for `l = 0..=min(m,n)`.
pub fn hermite_coefficients(m: u32, n: u32) -> Vec<f64> {
    let k = m.min(n);
    let mut c = Vec::with_capacity(k as usize + 1);
    let mut v = 1.0;
    c.push(v);
    for l in 0..k {
        // multiply first so integer-valued results stay exact below 2^53
        v = -(v * ((m - l) as f64 * (n - l) as f64)) / (l + 1) as f64;
        c.push(v);
    }
    c
}

/// The same coefficients in exact integer arithmetic.
pub fn hermite_coefficients_exact(m: u32, n: u32) -> Vec<i128> {
    let k = m.min(n);
    let mut c = Vec::with_capacity(k as usize + 1);
    let mut v: i128 = 1;
    c.push(v);
    for l in 0..k {
        v = -v * (m - l) as i128 * (n - l) as i128 / (l + 1) as i128;
        c.push(v);
    }
    c
}

/// `z = x + i y` with `q = x + I_q y`, in double-double.
fn slice_dd(q: Quaternion) -> (ComplexDD, Quaternion) {
    let (x, y, unit) = q.slice_parts();
    (ComplexDD::new(x, y), unit)
}

fn lift(v: ComplexDD, unit: Quaternion) -> Quaternion {
    let c = v.to_complex();
    Quaternion::new(c.re, c.im * unit.x, c.im * unit.y, c.im * unit.z)
}

/// Literal finite sum. The powers of `q` and `conj(q)` commute on the slice of
/// `q`, where the sum is accumulated in double-double: its terms exceed the
/// result by orders of magnitude once `|q| > 1`.
pub fn hermite_explicit(m: u32, n: u32, q: Quaternion) -> Quaternion {
    check_range(m, n);
    let (z, unit) = slice_dd(q);
    let zb = z.conj();
    let sum = hermite_coefficients(m, n)
        .into_iter()
        .enumerate()
        .fold(ComplexDD::ZERO, |acc, (l, c)| {
            let l = l as u32;
            acc.add(z.powu(m - l).mul(zb.powu(n - l)).scale(DoubleDouble::from(c)))
        });
    lift(sum, unit)
}

/// `c_{m,n} q^m conj(q)^n / |q|^{2(m^n)} 1F1(-(m^n); |m-n|+1; |q|^2)`, and the
/// `m = -1` extension.
pub fn hermite_hypergeometric(m: i32, n: u32, q: Quaternion) -> Result<Quaternion> {
    let x = q.norm_sqr();
    if m == -1 {
        let lead = q.conj().powi(n + 1) * (-1.0 / (n as f64 + 1.0));
        return Ok(lead * kummer_1f1(1.0, n as f64 + 2.0, x)?);
    }
    if m < -1 {
        return Err(Error::Index(format!("hypergeometric form needs m >= -1, got {m}")));
    }
    let m = m as u32;
    check_range(m, n);
    let k = m.min(n);
    let d = m.abs_diff(n);
    if k > 0 && q.norm_sqr() == 0.0 {
        return Err(Error::Domain("hypergeometric form divides by |q|^2 at q = 0".into()));
    }
    let (z, unit) = slice_dd(q);
    let x = z.re.mul(z.re).add(z.im.mul(z.im));
    // c_{m,n} = (-1)^k max! / d! as an integer product
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let c = ((d + 1)..=m.max(n)).fold(DoubleDouble::from(sign), |acc, i| acc.mul_f64(i as f64));
    // terminating 1F1(-k; d+1; x)
    let mut term = DoubleDouble::from(1.0);
    let mut f = term;
    for i in 0..k {
        let fi = i as f64;
        term = term
            .mul(x)
            .mul_f64(fi - k as f64)
            .div_f64((d as f64 + 1.0 + fi) * (fi + 1.0));
        f = f.add(term);
    }
    let xk = (0..k).fold(DoubleDouble::from(1.0), |acc, _| acc.mul(x));
    let powers = z.powu(m).mul(z.conj().powu(n));
    Ok(lift(powers.scale(c.mul(f).div(xk)), unit))
}

/// Complex Ito-Hermite polynomial `H_{m,n}(z, conj z)` via
/// `(-1)^n n! z^{m-n} L_n^{(m-n)}(|z|^2)` (and the conjugate form for `m < n`).
pub fn hermite_complex(m: u32, n: u32, z: Complex64) -> Complex64 {
    check_range(m, n);
    let s = m.min(n);
    let d = m.abs_diff(n);
    let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    let lag = laguerre_generalized(s, d as f64, z.norm_sqr());
    let fact = log_factorial(s).exp();
    let pw = if m >= n { z.powu(d) } else { z.conj().powu(d) };
    pw * (sign * fact * lag)
}

/// Normalized complex basis `H_{m,n}(z) / sqrt(pi m! n!)`, evaluated in log
/// space so that large indices do not overflow.
pub fn phi_complex(m: u32, n: u32, z: Complex64) -> Complex64 {
    check_range(m, n);
    let s = m.min(n);
    let big = m.max(n);
    let d = big - s;
    let t = z.norm_sqr();
    let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    let lag = laguerre_generalized(s, d as f64, t);
    let r = t.sqrt();
    let log_mag = 0.5 * (log_factorial(s) - log_factorial(big) - PI.ln());
    let radial = if d == 0 {
        log_mag.exp()
    } else if r == 0.0 {
        0.0
    } else {
        (log_mag + d as f64 * r.ln()).exp()
    };
    let theta = z.im.atan2(z.re) * d as f64;
    let phase = if m >= n {
        Complex64::from_polar(1.0, theta)
    } else {
        Complex64::from_polar(1.0, -theta)
    };
    phase * (sign * radial * lag)
}

/// Radial profile `h_{a,b}(t)` with `H_{a,b}(r e^{i theta}) = e^{i(a-b)theta} h_{a,b}(r^2)`.
pub fn hermite_profile(a: u32, b: u32, t: f64) -> f64 {
    let s = a.min(b);
    let d = a.abs_diff(b);
    let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * log_factorial(s).exp() * t.powf(0.5 * d as f64) * laguerre_generalized(s, d as f64, t)
}

/// Normalized profile `h_{a,b}(t) / sqrt(pi a! b!)`.
pub fn phi_profile(a: u32, b: u32, t: f64) -> f64 {
    let s = a.min(b);
    let big = a.max(b);
    let d = big - s;
    let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    let log_mag = 0.5 * (log_factorial(s) - log_factorial(big) - PI.ln());
    let radial = if d == 0 {
        log_mag.exp()
    } else if t == 0.0 {
        0.0
    } else {
        (log_mag + 0.5 * d as f64 * t.ln()).exp()
    };
    sign * radial * laguerre_generalized(s, d as f64, t)
}

/// `H_{m,n}(z)` for all `m, n <= max` from `H_{0,n} = conj(z)^n` and
/// `H_{m+1,n} = z H_{m,n} - n H_{m,n-1}`.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    max: usize,
    values: Vec<Complex64>,
}

impl HermiteTable {
    pub fn new(max: u32, z: Complex64) -> Self {
        check_range(max, max);
        let max = max as usize;
        let w = max + 1;
        let mut values = vec![Complex64::new(0.0, 0.0); w * w];
        let zb = z.conj();
        values[0] = Complex64::new(1.0, 0.0);
        for n in 1..=max {
            values[n] = values[n - 1] * zb;
        }
        for m in 0..max {
            for n in 0..=max {
                let mut v = z * values[m * w + n];
                if n > 0 {
                    v -= values[m * w + n - 1] * n as f64;
                }
                values[(m + 1) * w + n] = v;
            }
        }
        Self { max, values }
    }

    pub fn get(&self, m: u32, n: u32) -> Complex64 {
        self.values[m as usize * (self.max + 1) + n as usize]
    }
}

/// `H_{m,n}(z) / sqrt(pi m! n!)` for `m = 0..=max_m`, from the normalized
/// recurrence `phi_{m+1,j} = (z phi_{m,j} - sqrt(j) phi_{m,j-1}) / sqrt(m+1)`.
pub fn phi_column(n: u32, max_m: u32, z: Complex64) -> Vec<Complex64> {
    let n = n as usize;
    let mut col = vec![Complex64::new(0.0, 0.0); n + 1];
    col[0] = Complex64::new(1.0 / PI.sqrt(), 0.0);
    let zb = z.conj();
    for j in 1..=n {
        col[j] = col[j - 1] * zb / (j as f64).sqrt();
    }
    let mut out = Vec::with_capacity(max_m as usize + 1);
    out.push(col[n]);
    for m in 0..max_m as usize {
        let s = 1.0 / ((m + 1) as f64).sqrt();
        for j in (0..=n).rev() {
            let mut v = z * col[j];
            if j > 0 {
                v -= col[j - 1] * (j as f64).sqrt();
            }
            col[j] = v * s;
        }
        out.push(col[n]);
    }
    out
}

/// `H_{m,n}(q)` through the slice of `q`.
pub fn hermite(m: u32, n: u32, q: Quaternion) -> Quaternion {
    let (z, unit) = q.slice_complex();
    Quaternion::from_complex(hermite_complex(m, n, z), unit)
}

/// `phi_{m,n}(q) = H_{m,n}(q) / sqrt(pi m! n! A)`.
pub fn phi_normalized(m: u32, n: u32, q: Quaternion, area: f64) -> Quaternion {
    let (z, unit) = q.slice_complex();
    Quaternion::from_complex(phi_complex(m, n, z), unit) / area.sqrt()
}

/// `e_{m,n}(q) = q^m conj(q)^n`.
pub fn monomial(m: u32, n: u32, q: Quaternion) -> Quaternion {
    q.powi(m) * q.conj().powi(n)
}

/// `e^{-|q|^2} H_{-1,n}(q)`, finite for every `q` including large `|q|`.
pub fn weighted_hermite_minus_one(n: u32, q: Quaternion) -> Quaternion {
    let x = q.norm_sqr();
    let w = weighted_kummer_one(n, x).expect("x >= 0");
    q.conj().powi(n + 1) * (-w / (n as f64 + 1.0))
}

/// `H_{-1,n}(q)` without the Gaussian weight.
pub fn hermite_minus_one(n: u32, q: Quaternion) -> Quaternion {
    hermite_hypergeometric(-1, n, q).expect("1F1(1; n+2; x) converges")
}

/// `psi_{m,n}(p) = -e^{-|p|^2} H_{m,n-1}(p)`, `n >= 1`.
pub fn psi_function(m: u32, n: u32, p: Quaternion) -> Result<Quaternion> {
    if n == 0 {
        return Err(Error::Index(
            "psi_{m,0} needs the extended family; use psi_extended".into(),
        ));
    }
    Ok(hermite(m, n - 1, p) * -(-p.norm_sqr()).exp())
}

/// `psi_{m,n}` including `n = 0`, where `H_{m,-1} = conj(H_{-1,m})`.
pub fn psi_extended(m: u32, n: u32, p: Quaternion) -> Quaternion {
    if n == 0 {
        -weighted_hermite_minus_one(m, p).conj()
    } else {
        hermite(m, n - 1, p) * -(-p.norm_sqr()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_matches_closed_form() {
        let z = Complex64::new(-1.1, 0.6);
        for n in [0, 1, 4] {
            let col = phi_column(n, 100, z);
            for (m, v) in col.iter().enumerate() {
                let want = phi_complex(m as u32, n, z);
                assert!((v - want).norm() <= 1e-12 * want.norm().max(1e-3), "({m},{n})");
            }
        }
    }

    #[test]
    fn table_matches_closed_form() {
        let z = Complex64::new(0.7, -1.3);
        let t = HermiteTable::new(12, z);
        for m in 0..=12 {
            for n in 0..=12 {
                let want = hermite_complex(m, n, z);
                assert!(
                    (t.get(m, n) - want).norm() <= 1e-11 * want.norm().max(1.0),
                    "({m},{n}) {} {}",
                    t.get(m, n),
                    want
                );
            }
        }
    }

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    fn sample() -> Quaternion {
        Quaternion::new(0.4, -0.7, 0.3, 0.9)
    }

    #[test]
    fn explicit_examples() {
        let q = sample();
        assert!(close(hermite_explicit(3, 0, q), q.powi(3), 1e-15));
        let h11 = Quaternion::real(q.norm_sqr() - 1.0);
        assert!(close(hermite_explicit(1, 1, q), h11, 1e-15));
        let h21 = q * q * q.conj() - q * 2.0;
        assert!(close(hermite_explicit(2, 1, q), h21, 1e-15));
    }

    #[test]
    fn routes_agree() {
        let q = sample();
        for m in 0..8 {
            for n in 0..8 {
                let e = hermite_explicit(m, n, q);
                assert!(close(hermite(m, n, q), e, 1e-12), "fast ({m},{n})");
                let h = hermite_hypergeometric(m as i32, n, q).unwrap();
                assert!(close(h, e, 1e-12), "hyp ({m},{n})");
            }
        }
    }

    #[test]
    fn minus_one_examples() {
        let q = sample();
        let x = q.norm_sqr();
        let h = hermite_minus_one(0, q);
        assert!(close(h, q.conj() * -((x.exp() - 1.0) / x), 1e-14));
        let r = Quaternion::real(1.3);
        let hr = hermite_minus_one(2, r);
        assert!(hr.is_real());
        let xr: f64 = 1.3;
        let expect = -xr.powi(3) / 3.0 * kummer_1f1(1.0, 4.0, xr * xr).unwrap();
        assert!((hr.w - expect).abs() < 1e-14 * expect.abs());
        let w = weighted_hermite_minus_one(3, q);
        assert!(close(w, hermite_minus_one(3, q) * (-x).exp(), 1e-13));
        assert_eq!(weighted_hermite_minus_one(2, Quaternion::ZERO), Quaternion::ZERO);
    }

    #[test]
    fn hypergeometric_rejects_origin() {
        assert!(hermite_hypergeometric(2, 1, Quaternion::ZERO).is_err());
        assert!(hermite_hypergeometric(2, 0, Quaternion::ZERO).is_ok());
    }

    #[test]
    fn normalized_examples() {
        let q = sample();
        let area = 2.0 * PI;
        let c = 1.0 / (PI * area).sqrt();
        assert!(close(phi_normalized(0, 0, q, area), Quaternion::real(c), 1e-15));
        assert!(close(phi_normalized(1, 0, q, area), q * c, 1e-15));
    }

    #[test]
    fn monomial_examples() {
        assert_eq!(monomial(0, 0, sample()), Quaternion::ONE);
        assert!(close(monomial(2, 1, Quaternion::I), Quaternion::I, 1e-16));
    }

    #[test]
    fn psi_examples() {
        let p = sample();
        let g = (-p.norm_sqr()).exp();
        assert!(close(psi_function(0, 1, p).unwrap(), Quaternion::real(-g), 1e-15));
        assert!(close(psi_function(1, 1, p).unwrap(), p * -g, 1e-15));
        assert!(psi_function(1, 0, p).is_err());
        assert!(close(psi_extended(2, 3, p), psi_function(2, 3, p).unwrap(), 1e-15));
    }

    #[test]
    fn profile_matches_polynomial() {
        let z = Complex64::from_polar(1.3, 0.8);
        for (a, b) in [(0, 0), (3, 1), (1, 4), (5, 5)] {
            let h = hermite_complex(a, b, z);
            let expect = Complex64::from_polar(1.0, 0.8 * (a as f64 - b as f64)) * hermite_profile(a, b, 1.69);
            assert!((h - expect).norm() < 1e-12 * (1.0 + h.norm()));
            let norm = (PI * log_factorial(a).exp() * log_factorial(b).exp()).sqrt();
            assert!((phi_profile(a, b, 1.69) * norm - hermite_profile(a, b, 1.69)).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_coefficients() {
        for m in 0..=8 {
            for n in 0..=8 {
                let exact: i128 = hermite_coefficients_exact(m, n).iter().sum();
                let float = hermite_explicit(m, n, Quaternion::ONE).w;
                assert_eq!(exact as f64, float, "({m},{n})");
            }
        }
    }
}
