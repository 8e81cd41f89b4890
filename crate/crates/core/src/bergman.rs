//! Reproducing kernels `K_n` of the polyregular spaces, the projections `P_n`,
//! the kernel `R_k` of `P_k C` and the kernel `S_k` of `(P_k C)* (P_k C)`.
//!
//! Kernels are summed in the normalized basis `Phi_{m,n} = H_{m,n} / sqrt(pi m! n!)`
//! (no hemisphere factor), which keeps every term in range:
//!
//! - `K_n(q,p) = sum_m Phi_{m,n}(q) conj(Phi_{m,n}(p))`
//! - `R_k(q,p) = k^{-1/2} e^{-|p|^2} sum_m Phi_{m,k}(q) conj(Phi_{m,k-1}(p))`
//! - `S_k(p,q) = A k^{-1} e^{-|p|^2-|q|^2} sum_m Phi_{m,k-1}(p) conj(Phi_{m,k-1}(q))`
//!
//! Truncation tails are bounded with the majorant
//! `|H_{m,n}(q)| <= sum_l l! C(m,l) C(n,l) |q|^{m+n-2l}`.

use crate::basis::{hermite, hermite_complex, phi_column, phi_profile};
use crate::error::{Error, Result};
use crate::measure::{angular_moments, QuadratureSpec};
use crate::quaternion::Quaternion;
use crate::specfun::{laguerre, log_factorial};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TruncationSpec {
    /// Last summation index kept.
    pub max_m: usize,
    /// Admissible tail bound relative to the majorant of the whole series.
    pub tail_tolerance: f64,
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self {
            max_m: 80,
            tail_tolerance: 1e-13,
        }
    }
}

impl TruncationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.max_m < 1 || self.max_m > crate::basis::MAX_INDEX as usize {
            return Err(Error::Config(format!(
                "max_m must lie in 1..={}, got {}",
                crate::basis::MAX_INDEX,
                self.max_m
            )));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::Config("tail_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A truncated kernel series and its tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: Quaternion,
    pub terms: usize,
    pub tail_bound: f64,
}

/// `ln sum_l l! C(m,l) C(n,l) r^{m+n-2l}`; `-inf` when the sum vanishes.
fn ln_majorant(m: usize, n: usize, r: f64) -> f64 {
    let k = m.min(n);
    if r == 0.0 {
        return if m == n {
            log_factorial(m as u32)
        } else {
            f64::NEG_INFINITY
        };
    }
    let lr = r.ln();
    let lf = |v: usize| log_factorial(v as u32);
    let terms: Vec<f64> = (0..=k)
        .map(|l| lf(m) + lf(n) - lf(l) - lf(m - l) - lf(n - l) + (m + n - 2 * l) as f64 * lr)
        .collect();
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// Sum of the majorant terms beyond `max_m`, checked against the tolerance
/// relative to the full majorant sum.
fn tail_bound(ln_term: impl Fn(usize) -> f64, trunc: &TruncationSpec) -> Result<f64> {
    let head: f64 = (0..=trunc.max_m).map(|m| ln_term(m).exp()).sum();
    let mut tail = 0.0;
    let mut prev = f64::INFINITY;
    let mut m = trunc.max_m + 1;
    loop {
        let t = ln_term(m).exp();
        tail += t;
        if t <= prev && t <= 1e-18 * (head + tail) {
            break;
        }
        prev = t;
        m += 1;
        if m > trunc.max_m + 100_000 {
            return Err(Error::NonConvergence { terms: m, last_term: t });
        }
    }
    if tail > trunc.tail_tolerance * (head + tail) {
        return Err(Error::Truncation {
            tail,
            tolerance: trunc.tail_tolerance,
            max_m: trunc.max_m,
        });
    }
    Ok(tail)
}

fn lift(z: Complex64, unit: Quaternion) -> Quaternion {
    Quaternion::from_complex(z, unit)
}

/// `sum_{m <= M} Phi_{m,a}(q) conj(Phi_{m,b}(p))`.
fn paired_sum(a: u32, q: Quaternion, b: u32, p: Quaternion, max_m: usize) -> Quaternion {
    let (zq, iq) = q.slice_complex();
    let (zp, ip) = p.slice_complex();
    let cq = phi_column(a, max_m as u32, zq);
    let cp = phi_column(b, max_m as u32, zp);
    cq.iter()
        .zip(&cp)
        .map(|(&x, &y)| lift(x, iq) * lift(y.conj(), ip))
        .sum()
}

/// `K_n(q,p) = sum_m H_{m,n}(q) conj(H_{m,n}(p)) / (pi m! n!)`.
pub fn repkernel_kn_series(n: u32, q: Quaternion, p: Quaternion, trunc: &TruncationSpec) -> Result<SeriesValue> {
    trunc.validate()?;
    let (rq, rp) = (q.norm(), p.norm());
    let nn = n as usize;
    let base = PI.ln() + log_factorial(n);
    let tail = tail_bound(
        |m| ln_majorant(m, nn, rq) + ln_majorant(m, nn, rp) - base - log_factorial(m as u32),
        trunc,
    )?;
    Ok(SeriesValue {
        value: paired_sum(n, q, n, p, trunc.max_m),
        terms: trunc.max_m + 1,
        tail_bound: tail,
    })
}

/// Complex coordinates of `q` and `p` on a common slice.
fn common_slice(q: Quaternion, p: Quaternion) -> Result<(Complex64, Complex64, Quaternion)> {
    if !q.same_slice(p, 1e-12) {
        return Err(Error::Domain(format!("{q} and {p} do not lie on a common slice")));
    }
    let unit = if !q.is_real() {
        q.slice_parts().2
    } else if !p.is_real() {
        p.slice_parts().2
    } else {
        Quaternion::J
    };
    let coord = |v: Quaternion| Complex64::new(v.w, v.x * unit.x + v.y * unit.y + v.z * unit.z);
    Ok((coord(q), coord(p), unit))
}

/// `K_n(q,p) = e^{q conj(p)} L_n(|q - p|^2) / pi` for `q, p` on one slice.
pub fn repkernel_kn_slice_closed(n: u32, q: Quaternion, p: Quaternion) -> Result<Quaternion> {
    let (zq, zp, unit) = common_slice(q, p)?;
    let v = (zq * zp.conj()).exp() * (laguerre(n, (zq - zp).norm_sqr()) / PI);
    Ok(lift(v, unit))
}

/// The same with `e^{conj(q) p}`; differs from the series off the real line.
pub fn repkernel_kn_slice_closed_as_printed(n: u32, q: Quaternion, p: Quaternion) -> Result<Quaternion> {
    let (zq, zp, unit) = common_slice(q, p)?;
    let v = (zq.conj() * zp).exp() * (laguerre(n, (zq - zp).norm_sqr()) / PI);
    Ok(lift(v, unit))
}

/// `f(q) = sum_m Phi_{m,n}(q) c_m`, an element of the `n`-th polyregular space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceExpansion {
    pub n: u32,
    pub coefficients: Vec<Quaternion>,
}

impl SliceExpansion {
    pub fn evaluate(&self, q: Quaternion) -> Quaternion {
        let (z, unit) = q.slice_complex();
        let col = phi_column(self.n, self.coefficients.len() as u32 - 1, z);
        col.iter()
            .zip(&self.coefficients)
            .map(|(&v, &c)| lift(v, unit) * c)
            .sum()
    }

    /// `(P_k C)*` applied to this element of the `k`-th space:
    /// `A e^{-|p|^2} sum_m Phi_{m,k-1}(p) c_m / sqrt(k)`.
    pub fn pkc_adjoint_image(&self, p: Quaternion, area: f64) -> Result<Quaternion> {
        if self.n == 0 {
            return Err(Error::Index("the adjoint image needs k >= 1".into()));
        }
        let (z, unit) = p.slice_complex();
        let col = phi_column(self.n - 1, self.coefficients.len() as u32 - 1, z);
        let s: Quaternion = col
            .iter()
            .zip(&self.coefficients)
            .map(|(&v, &c)| lift(v, unit) * c)
            .sum();
        Ok(s * (area * (-p.norm_sqr()).exp() / (self.n as f64).sqrt()))
    }
}

/// Last expansion index for space `n`: `max_m`, capped so that the angular
/// frequency `m - n` stays below half the trapezoid order. Beyond that the
/// rule aliases `m - n` onto the frequencies of the input.
fn resolved_max_m(n: u32, spec: &QuadratureSpec, trunc: &TruncationSpec) -> usize {
    trunc.max_m.min((n as usize + spec.angular_order / 2).saturating_sub(1))
}

/// `P_n f_i = (1/A) <K_n(., q), f_i>` for every component of `f`, as
/// coefficients `c_m = <Phi_{m,n}, f_i> / A` for `m <= max_m`, capped at the
/// angular resolution of `spec`.
pub fn projection_expansions<F>(
    f: &F,
    outputs: usize,
    n: u32,
    spec: &QuadratureSpec,
    trunc: &TruncationSpec,
) -> Result<Vec<SliceExpansion>>
where
    F: Fn(Quaternion, &mut [Quaternion]) + Sync,
{
    trunc.validate()?;
    let freqs: Vec<i64> = (0..=resolved_max_m(n, spec, trunc))
        .map(|m| m as i64 - n as i64)
        .collect();
    let radial = |m: usize, t: f64| phi_profile(m as u32, n, t);
    let moments = angular_moments(f, outputs, &freqs, &radial, spec)?;
    let a = spec.area_normalization;
    Ok(moments
        .into_iter()
        .map(|row| SliceExpansion {
            n,
            coefficients: row.into_iter().map(|c| c / a).collect(),
        })
        .collect())
}

pub fn project_pn<F>(f: &F, n: u32, q: Quaternion, spec: &QuadratureSpec, trunc: &TruncationSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    let batch = |p: Quaternion, out: &mut [Quaternion]| out[0] = f(p);
    Ok(projection_expansions(&batch, 1, n, spec, trunc)?[0].evaluate(q))
}

/// `R_k(q,p) = sum_m H_{m,k}(q) H_{k-1,m}(p) e^{-|p|^2} / (pi m! k!)`.
pub fn kernel_rk_series(k: u32, q: Quaternion, p: Quaternion, trunc: &TruncationSpec) -> Result<SeriesValue> {
    require_k(k)?;
    trunc.validate()?;
    let (rq, rp) = (q.norm(), p.norm());
    let kk = k as usize;
    let base = PI.ln() + log_factorial(k) + p.norm_sqr();
    let tail = tail_bound(
        |m| ln_majorant(m, kk, rq) + ln_majorant(m, kk - 1, rp) - base - log_factorial(m as u32),
        trunc,
    )?;
    let s = paired_sum(k, q, k - 1, p, trunc.max_m);
    Ok(SeriesValue {
        value: s * ((-p.norm_sqr()).exp() / (k as f64).sqrt()),
        terms: trunc.max_m + 1,
        tail_bound: tail,
    })
}

/// Same-slice closed form `(-1)^{k-1} e^{-|p|^2} e^{q conj(p)} H_{k-1,k}(q - p) / (pi k!)`.
pub fn kernel_rk_slice_closed(k: u32, q: Quaternion, p: Quaternion) -> Result<Quaternion> {
    require_k(k)?;
    let (zq, zp, unit) = common_slice(q, p)?;
    let sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    let v = (zq * zp.conj()).exp() * hermite_complex(k - 1, k, zq - zp);
    Ok(lift(
        v * (sign * (-p.norm_sqr()).exp() / (PI * log_factorial(k).exp())),
        unit,
    ))
}

/// The variant `e^{-|p|^2} e^{q conj(p)} H_{k,k-1}(q - p) / (pi k!)`.
pub fn kernel_rk_slice_closed_as_printed(k: u32, q: Quaternion, p: Quaternion) -> Result<Quaternion> {
    require_k(k)?;
    let (zq, zp, unit) = common_slice(q, p)?;
    let v = (zq * zp.conj()).exp() * hermite_complex(k, k - 1, zq - zp);
    Ok(lift(v * ((-p.norm_sqr()).exp() / (PI * log_factorial(k).exp())), unit))
}

fn require_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Index(
            "k = 0 needs H_{-1,m}; the kernel is defined for k >= 1".into(),
        ));
    }
    Ok(())
}

/// `P_k C f_i` for every component of `f`, as an expansion in the `k`-th
/// space with `c_m = k^{-1/2} int e^{-|p|^2} conj(Phi_{m,k-1}(p)) f_i(p) dmu(p)`.
pub fn pkc_expansions<F>(
    f: &F,
    outputs: usize,
    k: u32,
    spec: &QuadratureSpec,
    trunc: &TruncationSpec,
) -> Result<Vec<SliceExpansion>>
where
    F: Fn(Quaternion, &mut [Quaternion]) + Sync,
{
    require_k(k)?;
    trunc.validate()?;
    let freqs: Vec<i64> = (0..=resolved_max_m(k - 1, spec, trunc))
        .map(|m| m as i64 - (k as i64 - 1))
        .collect();
    let radial = |m: usize, t: f64| (-t).exp() * phi_profile(m as u32, k - 1, t);
    let moments = angular_moments(f, outputs, &freqs, &radial, spec)?;
    let s = 1.0 / (k as f64).sqrt();
    Ok(moments
        .into_iter()
        .map(|row| SliceExpansion {
            n: k,
            coefficients: row.into_iter().map(|c| c * s).collect(),
        })
        .collect())
}

/// `P_k C f(q) = int R_k(q,p) f(p) dmu(p)`.
pub fn pkc_apply<F>(f: &F, k: u32, q: Quaternion, spec: &QuadratureSpec, trunc: &TruncationSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    let batch = |p: Quaternion, out: &mut [Quaternion]| out[0] = f(p);
    Ok(pkc_expansions(&batch, 1, k, spec, trunc)?[0].evaluate(q))
}

/// `(P_k C)* H_{n,l}(p) = A e^{-|p|^2} H_{n,k-1}(p) [k = l]`.
pub fn pkc_adjoint_on_hermite(n: u32, ell: u32, k: u32, p: Quaternion, area: f64) -> Result<Quaternion> {
    require_k(k)?;
    if ell != k {
        return Ok(Quaternion::ZERO);
    }
    Ok(hermite(n, k - 1, p) * (area * (-p.norm_sqr()).exp()))
}

/// `S_k(p,q) = A e^{-|p|^2-|q|^2} sum_m H_{m,k-1}(p) H_{k-1,m}(q) / (pi m! k!)`.
pub fn kernel_sk(k: u32, p: Quaternion, q: Quaternion, area: f64, trunc: &TruncationSpec) -> Result<SeriesValue> {
    require_k(k)?;
    trunc.validate()?;
    let (rp, rq) = (p.norm(), q.norm());
    let kk = k as usize - 1;
    let weight = (-p.norm_sqr() - q.norm_sqr()).exp();
    let base = PI.ln() + log_factorial(k) + p.norm_sqr() + q.norm_sqr() - area.ln();
    let tail = tail_bound(
        |m| ln_majorant(m, kk, rp) + ln_majorant(m, kk, rq) - base - log_factorial(m as u32),
        trunc,
    )?;
    Ok(SeriesValue {
        value: paired_sum(k - 1, p, k - 1, q, trunc.max_m) * (area * weight / k as f64),
        terms: trunc.max_m + 1,
        tail_bound: tail,
    })
}

/// `A e^{-|p|^2-|q|^2} K_{k-1}(p,q) / k`, which equals [`kernel_sk`].
pub fn kernel_sk_via_kn(k: u32, p: Quaternion, q: Quaternion, area: f64, trunc: &TruncationSpec) -> Result<Quaternion> {
    require_k(k)?;
    let kn = repkernel_kn_series(k - 1, p, q, trunc)?;
    Ok(kn.value * (area * (-p.norm_sqr() - q.norm_sqr()).exp() / k as f64))
}

/// The series with `H_{m,k-1}(p) H_{m,k-1}(q)` and no hemisphere factor.
pub fn kernel_sk_as_printed(k: u32, p: Quaternion, q: Quaternion, trunc: &TruncationSpec) -> Result<Quaternion> {
    require_k(k)?;
    trunc.validate()?;
    let (zp, ip) = p.slice_complex();
    let (zq, iq) = q.slice_complex();
    let cp = phi_column(k - 1, trunc.max_m as u32, zp);
    let cq = phi_column(k - 1, trunc.max_m as u32, zq);
    let s: Quaternion = cp.iter().zip(&cq).map(|(&x, &y)| lift(x, ip) * lift(y, iq)).sum();
    Ok(s * ((-p.norm_sqr() - q.norm_sqr()).exp() / k as f64))
}

/// `e^{-|p|^2-|q|^2} K_{k-1}(conj p, conj q) / k`.
pub fn kernel_sk_identity_as_printed(
    k: u32,
    p: Quaternion,
    q: Quaternion,
    trunc: &TruncationSpec,
) -> Result<Quaternion> {
    require_k(k)?;
    let kn = repkernel_kn_series(k - 1, p.conj(), q.conj(), trunc)?;
    Ok(kn.value * ((-p.norm_sqr() - q.norm_sqr()).exp() / k as f64))
}
