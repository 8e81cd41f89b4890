//! The Cauchy kernel `N(q,p) = (q^2 - 2q Re p + |p|^2)^{-1}(q - conj p)` and the
//! weighted transform `C f(q) = (1/pi) int_H N(q,p) f(p) dmu(p)`.
//!
//! Numerics. For `p` on a slice `C_I` the kernel splits as
//! `N(q,p) = 1/2 (1 - I_q I)(q_I - p)^{-1} + 1/2 (1 + I_q I)(conj(q)_I - p)^{-1}`
//! with `q_I = Re q + I |Im q|`. Each half has one simple pole, and polar
//! coordinates centred on it (`p = z + rho w`, `w = cos t + I sin t`) cancel the
//! pole exactly: `(z - p)^{-1} rho drho dt = -conj(w) drho dt`. The remaining
//! integrand is smooth, so a Gauss-Legendre panel on `[0, eps]`, unit-width
//! panels beyond it and a trapezoid rule in `t` converge spectrally.

use crate::basis::{hermite, phi_normalized, weighted_hermite_minus_one, BasisIndex};
use crate::error::{Error, Result};
use crate::gauss::{gauss_jacobi_unit, hermite_rule, legendre_rule, GaussRule};
use crate::measure::{HemisphereGrid, QuadratureSpec};
use crate::quaternion::{ImaginaryUnit, Quaternion};
use crate::specfun::{dawson, factorial, CompensatedSum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Beyond `|q| + RADIAL_REACH` the Gaussian weight is below `e^{-64}`.
const RADIAL_REACH: f64 = 8.0;
const SERIES_MAX_TERMS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    Closed,
    Series,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEvaluation {
    pub value: Quaternion,
    pub method: KernelMethod,
    pub terms_used: Option<usize>,
}

pub fn kernel_closed(q: Quaternion, p: Quaternion) -> Result<Quaternion> {
    let den = q * q - q * (2.0 * p.w) + Quaternion::real(p.norm_sqr());
    let scale = q.norm_sqr() + 2.0 * q.norm() * p.w.abs() + p.norm_sqr();
    if den.norm() <= 8.0 * f64::EPSILON * scale {
        return Err(Error::Singular { q, p });
    }
    Ok(den.inverse()? * (q - p.conj()))
}

/// Power series: `-sum q^l p^{-1-l}` for `|p| > |q|`, `sum q^{-1-l} p^l` for
/// `|p| < |q|`. Stops once the geometric tail bound falls below `tol |sum|`.
pub fn kernel_series(q: Quaternion, p: Quaternion, tol: f64) -> Result<KernelEvaluation> {
    let (nq, np) = (q.norm(), p.norm());
    if nq == np {
        return Err(Error::Divergent(nq));
    }
    let exterior = np > nq;
    let (ratio, mut term, step_left, step_right) = if exterior {
        let pinv = p.inverse()?;
        (nq / np, -pinv, q, pinv)
    } else {
        let qinv = q.inverse()?;
        (np / nq, qinv, qinv, p)
    };
    // term_{l+1} = step_left * term_l * step_right keeps the left/right order
    let mut sum = Quaternion::ZERO;
    for l in 0..SERIES_MAX_TERMS {
        sum += term;
        let tail = term.norm() * ratio / (1.0 - ratio);
        if tail <= tol * sum.norm() || term.norm() == 0.0 {
            return Ok(KernelEvaluation {
                value: sum,
                method: KernelMethod::Series,
                terms_used: Some(l + 1),
            });
        }
        term = step_left * term * step_right;
    }
    Err(Error::NonConvergence {
        terms: SERIES_MAX_TERMS,
        last_term: term.norm(),
    })
}

/// Polar offsets `(rho cos t, rho sin t, cos t, sin t, w)` around a pole.
#[derive(Debug, Clone)]
struct PolarPlan {
    nodes: Vec<(f64, f64, f64, f64, f64)>,
}

impl PolarPlan {
    fn new(reach: f64, spec: &QuadratureSpec) -> Self {
        let radial = radial_rule(reach, spec.singular_exclusion_radius, spec.radial_order);
        let na = spec.angular_order;
        let dt = 2.0 * PI / na as f64;
        let angles: Vec<(f64, f64)> = (0..na).map(|a| (a as f64 * dt).sin_cos()).collect();
        let mut nodes = Vec::with_capacity(radial.len() * na);
        for (&rho, &w) in radial.nodes.iter().zip(&radial.weights) {
            for &(s, c) in &angles {
                nodes.push((rho * c, rho * s, c, s, w * dt));
            }
        }
        Self { nodes }
    }
}

/// `[0, eps]` followed by panels of width at most one up to `reach`, each with
/// `radial_order / 4` (at least 4) Gauss-Legendre nodes.
fn radial_rule(reach: f64, eps: f64, radial_order: usize) -> GaussRule {
    let per_panel = (radial_order / 4).max(4);
    let base = legendre_rule(per_panel);
    let mut edges = vec![0.0];
    if eps > 0.0 {
        edges.push(eps);
    }
    let mut next = 1.0f64.max(eps);
    while next < reach {
        edges.push(next);
        next += 1.0;
    }
    edges.push(reach);
    let mut rule = GaussRule {
        nodes: Vec::new(),
        weights: Vec::new(),
    };
    for w in edges.windows(2) {
        let panel = base.mapped(w[0], w[1]);
        rule.nodes.extend(panel.nodes);
        rule.weights.extend(panel.weights);
    }
    rule
}

/// Weighted units `(I, w_I)` over which the transform integrates.
fn hemisphere_units(spec: &QuadratureSpec) -> Vec<(Quaternion, f64)> {
    let grid = HemisphereGrid::new(spec);
    grid.units.into_iter().zip(grid.weights).collect()
}

/// Core quadrature: `sum_I w_I (1/pi) int_{C_I} N(q,p) f_j(p) e^{-|p|^2} dA(p)`
/// for the `outputs` components written by `f`.
fn transform_on_units<F>(
    f: &F,
    outputs: usize,
    q: Quaternion,
    units: &[(Quaternion, f64)],
    spec: &QuadratureSpec,
) -> Result<Vec<Quaternion>>
where
    F: Fn(Quaternion, &mut [Quaternion]) + Sync,
{
    spec.validate()?;
    let (xq, yq, iq) = q.slice_parts();
    let plan = PolarPlan::new(q.norm() + RADIAL_REACH, spec);
    // pole height and the side of the splitting it belongs to
    let poles: Vec<(f64, f64)> = if yq == 0.0 {
        vec![(0.0, 0.0)]
    } else {
        vec![(yq, -1.0), (-yq, 1.0)]
    };
    let per_unit: Vec<Result<Vec<Quaternion>>> = units
        .par_iter()
        .map(|&(unit, wi)| {
            let mut acc = vec![Quaternion::ZERO; outputs];
            let mut vals = vec![Quaternion::ZERO; outputs];
            let mut part = vec![Quaternion::ZERO; outputs];
            for &(b, side) in &poles {
                let left = if side == 0.0 {
                    Quaternion::ONE
                } else {
                    (Quaternion::ONE + iq * unit * side) * 0.5
                };
                if left.norm() < 1e-15 {
                    continue;
                }
                part.iter_mut().for_each(|v| *v = Quaternion::ZERO);
                for &(dx, dy, c, s, w) in &plan.nodes {
                    let (px, py) = (xq + dx, b + dy);
                    let gw = w * (-(px * px + py * py)).exp();
                    if gw == 0.0 {
                        continue;
                    }
                    let p = Quaternion::new(px, py * unit.x, py * unit.y, py * unit.z);
                    f(p, &mut vals);
                    // conj(w) = c - I s
                    let wbar = Quaternion::new(c * gw, -s * gw * unit.x, -s * gw * unit.y, -s * gw * unit.z);
                    for (acc_j, v) in part.iter_mut().zip(&vals) {
                        if !v.is_finite() {
                            return Err(Error::NonFinite(p));
                        }
                        *acc_j += wbar * *v;
                    }
                }
                for (a, v) in acc.iter_mut().zip(&part) {
                    *a += left * *v * (-wi / PI);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut sums = vec![[CompensatedSum::new(); 4]; outputs];
    for r in per_unit {
        for (s, v) in sums.iter_mut().zip(r?) {
            s[0].add(v.w);
            s[1].add(v.x);
            s[2].add(v.y);
            s[3].add(v.z);
        }
    }
    Ok(sums
        .iter()
        .map(|s| Quaternion::new(s[0].value(), s[1].value(), s[2].value(), s[3].value()))
        .collect())
}

fn single<F>(f: &F) -> impl Fn(Quaternion, &mut [Quaternion]) + Sync + '_
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    move |p, out: &mut [Quaternion]| out[0] = f(p)
}

pub fn cauchy_transform_numeric<F>(f: &F, q: Quaternion, spec: &QuadratureSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    Ok(transform_on_units(&single(f), 1, q, &hemisphere_units(spec), spec)?[0])
}

/// `C f_j(q)` for every component `f_j` written by `f(p, out)`; the quadrature
/// nodes are shared, so this is much cheaper than separate calls.
pub fn cauchy_transform_batch<F>(f: &F, outputs: usize, q: Quaternion, spec: &QuadratureSpec) -> Result<Vec<Quaternion>>
where
    F: Fn(Quaternion, &mut [Quaternion]) + Sync,
{
    transform_on_units(f, outputs, q, &hemisphere_units(spec), spec)
}

/// `C^I f(q) = (1/pi) int_{C_I} N(q,p) f(p) dmu_I(p)` for a fixed slice.
pub fn cauchy_slice_transform<F>(f: &F, q: Quaternion, unit: ImaginaryUnit, spec: &QuadratureSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    Ok(transform_on_units(&single(f), 1, q, &[(unit.to_quaternion(), 1.0)], spec)?[0])
}

pub fn cauchy_slice_transform_batch<F>(
    f: &F,
    outputs: usize,
    q: Quaternion,
    unit: Quaternion,
    spec: &QuadratureSpec,
) -> Result<Vec<Quaternion>>
where
    F: Fn(Quaternion, &mut [Quaternion]) + Sync,
{
    transform_on_units(f, outputs, q, &[(unit, 1.0)], spec)
}

/// `C^S f(q)`: the slice of `q` when `q` is not real, the real line otherwise.
pub fn cauchy_dynamic_slice_transform<F>(f: &F, q: Quaternion, spec: &QuadratureSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    if q.is_real() {
        return cauchy_real_line_transform(f, q.w, spec);
    }
    let (_, _, iq) = q.slice_parts();
    Ok(transform_on_units(&single(f), 1, q, &[(iq, 1.0)], spec)?[0])
}

/// `(1/pi) PV int_R f(t) (t - x)^{-1} e^{-t^2} dt`.
///
/// Gauss-Hermite on the divided difference `(f(t) - f(x))/(t - x)` plus
/// `f(x) PV int e^{-t^2}/(t - x) dt = -2 sqrt(pi) F(x) f(x)` with Dawson's `F`.
pub fn cauchy_real_line_transform<F>(f: &F, x: f64, spec: &QuadratureSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    spec.validate()?;
    let fx = f(Quaternion::real(x));
    if !fx.is_finite() {
        return Err(Error::NonFinite(Quaternion::real(x)));
    }
    let rule = hermite_rule(spec.radial_order);
    let mut acc = Quaternion::ZERO;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let d = t - x;
        let slope = if d.abs() < 1e-7 {
            let h = 1e-5;
            (f(Quaternion::real(x + h)) - f(Quaternion::real(x - h))) / (2.0 * h)
        } else {
            (f(Quaternion::real(t)) - fx) / d
        };
        if !slope.is_finite() {
            return Err(Error::NonFinite(Quaternion::real(t)));
        }
        acc += slope * w;
    }
    acc += fx * (-2.0 * PI.sqrt() * dawson(x));
    Ok(acc / PI)
}

/// `C* g(p) = (1/pi) int conj(N(q,p)) g(q) dmu(q) = -C[g o conj](conj p)`.
pub fn cauchy_adjoint_numeric<G>(g: &G, p: Quaternion, spec: &QuadratureSpec) -> Result<Quaternion>
where
    G: Fn(Quaternion) -> Quaternion + Sync,
{
    let reflected = |q: Quaternion| g(q.conj());
    Ok(-cauchy_transform_numeric(&reflected, p.conj(), spec)?)
}

/// `C e_{m,n}(q) = A(-q^m H_{-1,n}(q) e^{-|q|^2} - n! [m > n] q^{m-n-1})`.
pub fn cauchy_on_monomial(m: u32, n: u32, q: Quaternion, area: f64) -> Quaternion {
    let head = q.powi(m) * weighted_hermite_minus_one(n, q);
    -(head + monomial_tail(m, n, q)) * area
}

/// The same expression with `+q^m H_{-1,n} e^{-|q|^2}`; kept to report the
/// sign discrepancy, it does not match the quadrature.
pub fn cauchy_on_monomial_as_printed(m: u32, n: u32, q: Quaternion, area: f64) -> Quaternion {
    let head = q.powi(m) * weighted_hermite_minus_one(n, q);
    (head - monomial_tail(m, n, q)) * area
}

fn monomial_tail(m: u32, n: u32, q: Quaternion) -> Quaternion {
    if m > n {
        q.powi(m - n - 1) * factorial(n)
    } else {
        Quaternion::ZERO
    }
}

/// `C H_{m,n} = -A e^{-|q|^2} H_{m-1,n}`, with `H_{-1,n}` at `m = 0`.
pub fn cauchy_on_hermite(idx: BasisIndex, q: Quaternion, area: f64) -> Result<Quaternion> {
    let (m, n) = polynomial_index(idx)?;
    let v = if m == 0 {
        weighted_hermite_minus_one(n, q)
    } else {
        hermite(m - 1, n, q) * (-q.norm_sqr()).exp()
    };
    Ok(-v * area)
}

/// `C phi_{m,n}`: `-A e^{-|q|^2} phi_{m-1,n} / sqrt(m)` for `m > 0` and
/// `-sqrt(A) e^{-|q|^2} H_{-1,n} / sqrt(pi n!)` for `m = 0`.
pub fn cauchy_on_normalized(idx: BasisIndex, q: Quaternion, area: f64) -> Result<Quaternion> {
    let (m, n) = polynomial_index(idx)?;
    let g = (-q.norm_sqr()).exp();
    Ok(if m == 0 {
        -weighted_hermite_minus_one(n, q) * (area.sqrt() / (PI * factorial(n)).sqrt())
    } else {
        -phi_normalized(m - 1, n, q, area) * (area * g / (m as f64).sqrt())
    })
}

/// `C* H_{j,k} = A e^{-|p|^2} H_{j,k-1}`, with `H_{j,-1} = conj(H_{-1,j})`.
pub fn cauchy_adjoint_on_hermite(idx: BasisIndex, p: Quaternion, area: f64) -> Result<Quaternion> {
    let (j, k) = polynomial_index(idx)?;
    let v = if k == 0 {
        weighted_hermite_minus_one(j, p).conj()
    } else {
        hermite(j, k - 1, p) * (-p.norm_sqr()).exp()
    };
    Ok(v * area)
}

fn polynomial_index(idx: BasisIndex) -> Result<(u32, u32)> {
    if !idx.is_polynomial() {
        return Err(Error::Index(format!(
            "({}, {}) is not a polynomial index",
            idx.m, idx.n
        )));
    }
    Ok((idx.m as u32, idx.n as u32))
}

/// `sup_q int |N(q,p)|^r dmu(p)` over the samples, next to the bound
/// `A pi^{1-r} Gamma(1 - r/2)` read against both `dmu` and `dmu / pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrEstimate {
    pub r: f64,
    pub argmax: Quaternion,
    pub value: f64,
    pub bound: f64,
    pub holds_raw: bool,
    pub holds_probability: bool,
}

/// Relative slack for the bound comparison; `r = 0` is an equality case.
const BOUND_SLACK: f64 = 1e-9;

pub fn kernel_lr_estimate(r: f64, q_samples: &[Quaternion], spec: &QuadratureSpec) -> Result<LrEstimate> {
    if !(0.0..2.0).contains(&r) {
        return Err(Error::Domain(format!("kernel estimate needs 0 <= r < 2, got {r}")));
    }
    if q_samples.is_empty() {
        return Err(Error::Domain("kernel estimate needs at least one sample".into()));
    }
    let mut best = (Quaternion::ZERO, f64::NEG_INFINITY);
    for &q in q_samples {
        let v = kernel_lr_integral(r, q, spec)?;
        if v > best.1 {
            best = (q, v);
        }
    }
    let bound = spec.area_normalization * PI.powf(1.0 - r) * statrs::function::gamma::gamma(1.0 - r / 2.0);
    Ok(LrEstimate {
        r,
        argmax: best.0,
        value: best.1,
        bound,
        holds_raw: best.1 <= bound * (1.0 + BOUND_SLACK),
        holds_probability: best.1 / PI <= bound * (1.0 + BOUND_SLACK),
    })
}

/// `int_H |N(q,p)|^r dmu(p)`, `0 <= r < 2`.
///
/// On a slice `|N| = |q - conj p| / (d_1 d_2)` with `d_i` the distances to the
/// two poles (`|N| = 1/d` for real `q`). Each pole gets a polar grid weighted
/// by a smooth partition of unity; the first radial panel uses a Gauss-Jacobi
/// rule for the `rho^{1-r}` singularity.
pub fn kernel_lr_integral(r: f64, q: Quaternion, spec: &QuadratureSpec) -> Result<f64> {
    if !(0.0..2.0).contains(&r) {
        return Err(Error::Domain(format!("kernel estimate needs 0 <= r < 2, got {r}")));
    }
    spec.validate()?;
    let (xq, yq, _) = q.slice_parts();
    let beta = 1.0 - r;
    let per_panel = (spec.radial_order / 4).max(8);
    let jacobi = gauss_jacobi_unit(per_panel, beta)?;
    let base = legendre_rule(per_panel);
    let width = if yq == 0.0 { 1.0 } else { yq.clamp(0.25, 1.0) };
    let reach = q.norm() + RADIAL_REACH;
    // radial nodes (rho, weight) already containing rho^{1-r}
    let mut radial: Vec<(f64, f64)> = jacobi
        .nodes
        .iter()
        .zip(&jacobi.weights)
        .map(|(&x, &w)| (width * x, w * width.powf(beta + 1.0)))
        .collect();
    let mut a = width;
    while a < reach {
        let b = (a + width).min(reach);
        let panel = base.mapped(a, b);
        radial.extend(
            panel
                .nodes
                .iter()
                .zip(&panel.weights)
                .map(|(&x, &w)| (x, w * x.powf(beta))),
        );
        a = b;
    }
    let na = spec.angular_order;
    let dt = 2.0 * PI / na as f64;
    let angles: Vec<(f64, f64)> = (0..na).map(|k| (k as f64 * dt).sin_cos()).collect();

    let slice_value = |unit: Quaternion| -> f64 {
        let poles: &[f64] = if yq == 0.0 { &[0.0] } else { &[yq, -yq] };
        let mut acc = CompensatedSum::new();
        for &b in poles {
            for &(rho, wr) in &radial {
                for &(s, c) in &angles {
                    let (px, py) = (xq + rho * c, b + rho * s);
                    let g = (-(px * px + py * py)).exp();
                    if g == 0.0 {
                        continue;
                    }
                    let scaled = if yq == 0.0 {
                        1.0
                    } else {
                        // rho |N| with rho the distance to this pole
                        let other = (rho * c).hypot(py + b);
                        let p = Quaternion::new(px, py * unit.x, py * unit.y, py * unit.z);
                        let chi = {
                            let (o8, s8) = (other.powi(8), rho.powi(8));
                            o8 / (o8 + s8)
                        };
                        chi * ((q - p.conj()).norm() / other).powf(r)
                    };
                    acc.add(wr * dt * scaled * g);
                }
            }
        }
        acc.value()
    };
    if yq == 0.0 {
        return Ok(spec.area_normalization * slice_value(Quaternion::J));
    }
    let units = hemisphere_units(spec);
    let values: Vec<f64> = units.par_iter().map(|&(u, w)| w * slice_value(u)).collect();
    let mut total = CompensatedSum::new();
    values.into_iter().for_each(|v| total.add(v));
    Ok(total.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn kernel_examples() {
        let v = kernel_closed(Quaternion::real(2.0), Quaternion::real(1.0)).unwrap();
        assert!(close(v, Quaternion::ONE, 1e-15));
        let want = -(Quaternion::I * 2.0 + Quaternion::J) / 3.0;
        let v = kernel_closed(Quaternion::I * 2.0, Quaternion::J).unwrap();
        assert!(close(v, want, 1e-15));
        let s = kernel_series(Quaternion::I * 2.0, Quaternion::J, 1e-16).unwrap();
        assert!(close(s.value, want, 1e-12));
        assert!(matches!(
            kernel_closed(Quaternion::I, Quaternion::J),
            Err(Error::Singular { .. })
        ));
        let s = kernel_series(Quaternion::real(0.5), Quaternion::real(2.0), 1e-16).unwrap();
        assert!(close(s.value, Quaternion::real(-2.0 / 3.0), 1e-14));
        let s = kernel_series(Quaternion::ZERO, Quaternion::ONE, 1e-16).unwrap();
        assert_eq!(s.value, -Quaternion::ONE);
        assert_eq!(s.terms_used, Some(1));
        assert!(matches!(
            kernel_series(Quaternion::I, Quaternion::J, 1e-12),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn monomial_consistency_with_hermite() {
        let q = Quaternion::new(0.3, -0.4, 0.2, 0.7);
        let idx = BasisIndex::new(1, 0).unwrap();
        let a = cauchy_on_monomial(1, 0, q, 1.0);
        let b = cauchy_on_hermite(idx, q, 1.0).unwrap();
        assert!(close(a, b, 1e-14));
        // C 1 = A conj(q) (1 - e^{-|q|^2}) / |q|^2
        let x = q.norm_sqr();
        let want = q.conj() * ((1.0 - (-x).exp()) / x);
        assert!(close(cauchy_on_monomial(0, 0, q, 1.0), want, 1e-14));
    }

    #[test]
    fn constant_function_quadrature() {
        let spec = QuadratureSpec::default();
        let v = cauchy_transform_numeric(&|_| Quaternion::ONE, Quaternion::ONE, &spec).unwrap();
        let want = Quaternion::real(1.0 - (-1.0f64).exp());
        assert!(close(v, want, 1e-10), "{v} vs {want}");
    }

    #[test]
    fn real_line_constant() {
        // (1/pi) PV int e^{-t^2}/(t - x) dt = -2 F(x)/sqrt(pi)
        let spec = QuadratureSpec::default();
        let v = cauchy_real_line_transform(&|_| Quaternion::ONE, 0.7, &spec).unwrap();
        assert!((v.w + 2.0 * dawson(0.7) / PI.sqrt()).abs() < 1e-15);
    }
}
