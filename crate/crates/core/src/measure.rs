//! The slice-averaged Gaussian measure on the quaternions.
//!
//! `int_H f dmu = int_{hemisphere} int_{C_I} f(x + I y) e^{-x^2-y^2} dx dy dsigma(I)`,
//! with the hemisphere weight normalized to total mass `A` (`area_normalization`).
//! The planar Jacobian is `r`, not `r^3`.

use crate::error::{Error, Result};
use crate::gauss::{laguerre_rule, legendre_rule};
use crate::quaternion::{ImaginaryUnit, Quaternion};
use crate::specfun::CompensatedSum;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    /// Gauss-Laguerre nodes in `t = r^2`.
    pub radial_order: usize,
    /// Uniform trapezoid nodes in `theta`.
    pub angular_order: usize,
    pub hemi_phi_order: usize,
    pub hemi_psi_order: usize,
    /// Total hemisphere weight `A`.
    pub area_normalization: f64,
    /// Radius of the inner polar disc around each kernel singularity.
    pub singular_exclusion_radius: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_order: 64,
            angular_order: 64,
            hemi_phi_order: 8,
            hemi_psi_order: 8,
            area_normalization: 1.0,
            singular_exclusion_radius: 1e-3,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let orders = [
            ("radial_order", self.radial_order),
            ("angular_order", self.angular_order),
            ("hemi_phi_order", self.hemi_phi_order),
            ("hemi_psi_order", self.hemi_psi_order),
        ];
        for (name, v) in orders {
            if v < 1 {
                return Err(Error::Config(format!("{name} must be >= 1")));
            }
        }
        if self.radial_order > 400 {
            return Err(Error::Config("radial_order above 400 is not supported".into()));
        }
        if !(self.area_normalization > 0.0 && self.area_normalization.is_finite()) {
            return Err(Error::Config("area_normalization must be positive".into()));
        }
        if !(self.singular_exclusion_radius >= 0.0 && self.singular_exclusion_radius < 1.0) {
            return Err(Error::Config("singular_exclusion_radius must lie in [0, 1)".into()));
        }
        Ok(())
    }

    /// Parse flat `key = value` TOML whose keys are exactly the field names.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn with_area(mut self, area: f64) -> Self {
        self.area_normalization = area;
        self
    }

    /// A single hemisphere node; exact for slice-independent integrands.
    pub fn single_slice(mut self) -> Self {
        self.hemi_phi_order = 1;
        self.hemi_psi_order = 1;
        self
    }
}

/// Hemisphere nodes with weights summing to `A`.
#[derive(Debug, Clone)]
pub struct HemisphereGrid {
    pub units: Vec<Quaternion>,
    pub weights: Vec<f64>,
}

impl HemisphereGrid {
    pub fn new(spec: &QuadratureSpec) -> Self {
        let phi = legendre_rule(spec.hemi_phi_order).mapped(0.0, PI);
        let psi = legendre_rule(spec.hemi_psi_order).mapped(0.0, PI);
        let mut units = Vec::with_capacity(phi.len() * psi.len());
        let mut weights = Vec::with_capacity(phi.len() * psi.len());
        let mut total = 0.0;
        for (&a, &wa) in phi.nodes.iter().zip(&phi.weights) {
            for (&b, &wb) in psi.nodes.iter().zip(&psi.weights) {
                units.push(ImaginaryUnit::new(a, b).to_quaternion());
                let w = wa * wb * a.sin();
                weights.push(w);
                total += w;
            }
        }
        let scale = spec.area_normalization / total;
        weights.iter_mut().for_each(|w| *w *= scale);
        Self { units, weights }
    }
}

/// Polar Gauss-Laguerre x trapezoid nodes `(x, y, weight)` on a slice; the
/// weights already contain `e^{-t}` and the factor `1/2` from `t = r^2`.
#[derive(Debug, Clone)]
pub struct SliceGrid {
    pub nodes: Vec<(f64, f64, f64)>,
}

impl SliceGrid {
    pub fn new(spec: &QuadratureSpec) -> Self {
        let rule = laguerre_rule(spec.radial_order);
        let na = spec.angular_order;
        let dtheta = 2.0 * PI / na as f64;
        let mut nodes = Vec::with_capacity(rule.len() * na);
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let r = t.sqrt();
            for a in 0..na {
                let (s, c) = (a as f64 * dtheta).sin_cos();
                nodes.push((r * c, r * s, 0.5 * w * dtheta));
            }
        }
        Self { nodes }
    }
}

/// Weighted quaternion sum in a fixed serial order over values produced in parallel.
/// Serial compensated sum in input order, so parallel evaluation stays
/// bit-reproducible.
pub(crate) fn ordered_sum(values: Vec<Result<Quaternion>>) -> Result<Quaternion> {
    let mut acc = [CompensatedSum::new(); 4];
    for v in values {
        let v = v?;
        acc[0].add(v.w);
        acc[1].add(v.x);
        acc[2].add(v.y);
        acc[3].add(v.z);
    }
    Ok(Quaternion::new(
        acc[0].value(),
        acc[1].value(),
        acc[2].value(),
        acc[3].value(),
    ))
}

fn checked(v: Quaternion, at: Quaternion) -> Result<Quaternion> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(at))
    }
}

/// `int_{C_I} f dmu_I` for the slice of the imaginary unit `unit`.
pub fn slice_integral_unit<F>(f: &F, unit: Quaternion, spec: &QuadratureSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    let grid = SliceGrid::new(spec);
    let values = grid
        .nodes
        .par_iter()
        .map(|&(x, y, w)| {
            let q = Quaternion::new(x, y * unit.x, y * unit.y, y * unit.z);
            checked(f(q), q).map(|v| v * w)
        })
        .collect();
    ordered_sum(values)
}

pub fn slice_integral<F>(f: &F, unit: ImaginaryUnit, spec: &QuadratureSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    slice_integral_unit(f, unit.to_quaternion(), spec)
}

pub fn integral_over_h<F>(f: &F, spec: &QuadratureSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
{
    let hemi = HemisphereGrid::new(spec);
    let grid = SliceGrid::new(spec);
    let pairs: Vec<(usize, usize)> = (0..hemi.units.len())
        .flat_map(|h| (0..grid.nodes.len()).map(move |g| (h, g)))
        .collect();
    let values = pairs
        .par_iter()
        .map(|&(h, g)| {
            let u = hemi.units[h];
            let (x, y, w) = grid.nodes[g];
            let q = Quaternion::new(x, y * u.x, y * u.y, y * u.z);
            checked(f(q), q).map(|v| v * (w * hemi.weights[h]))
        })
        .collect();
    ordered_sum(values)
}

/// `int_H f_i dmu` for every component written by `f(p, out)`.
pub fn integral_over_h_batch<F>(f: &F, outputs: usize, spec: &QuadratureSpec) -> Result<Vec<Quaternion>>
where
    F: Fn(Quaternion, &mut [Quaternion]) + Sync,
{
    let hemi = HemisphereGrid::new(spec);
    let grid = SliceGrid::new(spec);
    let per_unit: Vec<Result<Vec<Quaternion>>> = hemi
        .units
        .par_iter()
        .zip(&hemi.weights)
        .map(|(&u, &wu)| {
            let mut acc = vec![Quaternion::ZERO; outputs];
            let mut vals = vec![Quaternion::ZERO; outputs];
            for &(x, y, w) in &grid.nodes {
                let q = Quaternion::new(x, y * u.x, y * u.y, y * u.z);
                f(q, &mut vals);
                for (a, v) in acc.iter_mut().zip(&vals) {
                    *a += checked(*v, q)? * (w * wu);
                }
            }
            Ok(acc)
        })
        .collect();
    reduce_rows(per_unit, outputs)
}

fn reduce_rows(rows: Vec<Result<Vec<Quaternion>>>, outputs: usize) -> Result<Vec<Quaternion>> {
    let mut sums = vec![[CompensatedSum::new(); 4]; outputs];
    for r in rows {
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

/// Angular Fourier moments
/// `M[i][j] = int_H e^{-I k_j theta} g_j(|p|^2) f_i(p) dmu(p)` with
/// `p = |p| e^{I theta}` on the slice of each hemisphere unit `I`.
///
/// Identical to the plain quadrature of the same integrands (the trapezoid
/// sum in `theta` is a DFT bin, aliasing included), but each ring costs one
/// FFT per component instead of one pass per frequency. A quaternion is split
/// as `u + v J'` with `u, v` in `C_I` and `J'` orthogonal to `I`, so left
/// multiplication by `e^{-I k theta}` acts on `u` and `v` as complex numbers.
pub fn angular_moments<F, G>(
    f: &F,
    outputs: usize,
    freqs: &[i64],
    radial: &G,
    spec: &QuadratureSpec,
) -> Result<Vec<Vec<Quaternion>>>
where
    F: Fn(Quaternion, &mut [Quaternion]) + Sync,
    G: Fn(usize, f64) -> f64 + Sync,
{
    spec.validate()?;
    let hemi = HemisphereGrid::new(spec);
    let rule = laguerre_rule(spec.radial_order);
    let na = spec.angular_order;
    let dtheta = 2.0 * PI / na as f64;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(na);
    let angles: Vec<(f64, f64)> = (0..na).map(|a| (a as f64 * dtheta).sin_cos()).collect();
    let bins: Vec<usize> = freqs.iter().map(|&k| k.rem_euclid(na as i64) as usize).collect();
    let nf = freqs.len();
    let per_unit: Vec<Result<Vec<Quaternion>>> = hemi
        .units
        .par_iter()
        .zip(&hemi.weights)
        .map(|(&unit, &wu)| {
            let jp = orthogonal_unit(unit);
            let ijp = unit * jp;
            let mut acc = vec![Quaternion::ZERO; outputs * nf];
            let mut vals = vec![Quaternion::ZERO; outputs];
            let zero = Complex64::new(0.0, 0.0);
            let mut u = vec![vec![zero; na]; outputs];
            let mut v = vec![vec![zero; na]; outputs];
            for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let r = t.sqrt();
                for (a, &(s, c)) in angles.iter().enumerate() {
                    let (x, y) = (r * c, r * s);
                    let p = Quaternion::new(x, y * unit.x, y * unit.y, y * unit.z);
                    f(p, &mut vals);
                    for (i, val) in vals.iter().enumerate() {
                        let val = checked(*val, p)?;
                        let along = val.x * unit.x + val.y * unit.y + val.z * unit.z;
                        let rest = val - Quaternion::new(val.w, along * unit.x, along * unit.y, along * unit.z);
                        u[i][a] = Complex64::new(val.w, along);
                        v[i][a] = Complex64::new(dot3(rest, jp), dot3(rest, ijp));
                    }
                }
                for i in 0..outputs {
                    fft.process(&mut u[i]);
                    fft.process(&mut v[i]);
                }
                let base = wu * wt * 0.5 * dtheta;
                for j in 0..nf {
                    let g = radial(j, t) * base;
                    if g == 0.0 {
                        continue;
                    }
                    let b = bins[j];
                    for i in 0..outputs {
                        let (cu, cv) = (u[i][b], v[i][b]);
                        let lu = Quaternion::new(cu.re, cu.im * unit.x, cu.im * unit.y, cu.im * unit.z);
                        let lv = Quaternion::new(cv.re, cv.im * unit.x, cv.im * unit.y, cv.im * unit.z);
                        acc[i * nf + j] += (lu + lv * jp) * g;
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let flat = reduce_rows(per_unit, outputs * nf)?;
    Ok(flat.chunks(nf).map(|c| c.to_vec()).collect())
}

fn dot3(a: Quaternion, b: Quaternion) -> f64 {
    a.x * b.x + a.y * b.y + a.z * b.z
}

/// A unit imaginary quaternion orthogonal to the unit `u`.
fn orthogonal_unit(u: Quaternion) -> Quaternion {
    let e = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
        Quaternion::I
    } else if u.y.abs() <= u.z.abs() {
        Quaternion::J
    } else {
        Quaternion::K
    };
    // vector part of u * e is the cross product u x e
    let c = (u * e).vector();
    c / c.norm()
}

/// Gram matrix `G[a][b] = int_H conj(f_a) f_b dmu` for intrinsic functions:
/// `f(p, out)` receives `z = x + i y` and writes complex values `c_a(z)`, and
/// `f_a(x + I y) = Re c_a + I Im c_a` on every slice.
///
/// The slice integral of `conj(f_a) f_b` is then the same complex number `g`
/// on every slice, so the hemisphere quadrature reduces to
/// `A Re g + (sum_I w_I I) Im g` with one pass over a single slice grid.
pub fn intrinsic_gram<F>(f: &F, outputs: usize, spec: &QuadratureSpec) -> Result<Vec<Vec<Quaternion>>>
where
    F: Fn(Complex64, &mut [Complex64]) + Sync,
{
    spec.validate()?;
    let grid = SliceGrid::new(spec);
    let zero = Complex64::new(0.0, 0.0);
    let rings: Vec<Result<Vec<Complex64>>> = grid
        .nodes
        .par_chunks(spec.angular_order)
        .map(|ring| {
            let mut acc = vec![zero; outputs * outputs];
            let mut vals = vec![zero; outputs];
            for &(x, y, w) in ring {
                let z = Complex64::new(x, y);
                f(z, &mut vals);
                if let Some(bad) = vals.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::NonFinite(Quaternion::new(bad.re, bad.im, 0.0, 0.0)));
                }
                for (r, va) in vals.iter().enumerate() {
                    let ca = va.conj() * w;
                    for (c, vb) in vals.iter().enumerate() {
                        acc[r * outputs + c] += ca * vb;
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut re = vec![CompensatedSum::new(); outputs * outputs];
    let mut im = vec![CompensatedSum::new(); outputs * outputs];
    for ring in rings {
        for ((sr, si), v) in re.iter_mut().zip(im.iter_mut()).zip(ring?) {
            sr.add(v.re);
            si.add(v.im);
        }
    }
    let hemi = HemisphereGrid::new(spec);
    let mean_unit = hemi
        .units
        .iter()
        .zip(&hemi.weights)
        .fold(Quaternion::ZERO, |acc, (&u, &w)| acc + u * w);
    let area = spec.area_normalization;
    Ok((0..outputs)
        .map(|r| {
            (0..outputs)
                .map(|c| {
                    let i = r * outputs + c;
                    Quaternion::new(area * re[i].value(), 0.0, 0.0, 0.0) + mean_unit * im[i].value()
                })
                .collect()
        })
        .collect())
}

/// `<f, g> = int_H conj(f) g dmu`; conjugate-linear in `f`.
pub fn inner_product<F, G>(f: &F, g: &G, spec: &QuadratureSpec) -> Result<Quaternion>
where
    F: Fn(Quaternion) -> Quaternion + Sync,
    G: Fn(Quaternion) -> Quaternion + Sync,
{
    integral_over_h(&|q: Quaternion| f(q).conj() * g(q), spec)
}

/// `int_0^inf P(t) e^{-beta t} dt` for a polynomial `P` of the stated degree,
/// exact up to rounding.
pub fn radial_integral_exact(poly_degree: usize, beta: f64, values: impl Fn(f64) -> f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("radial weight needs beta > 0, got {beta}")));
    }
    let order = poly_degree / 2 + 2;
    if order > 400 {
        return Err(Error::Config(format!(
            "polynomial degree {poly_degree} exceeds supported order"
        )));
    }
    let rule = laguerre_rule(order);
    Ok(rule.integrate(|u| values(u / beta)) / beta)
}

/// Monte Carlo estimate of `int_H f dmu` with its standard error.
pub fn monte_carlo_integral<F>(f: &F, n_samples: usize, seed: u64, area: f64) -> Result<(Quaternion, f64)>
where
    F: Fn(Quaternion) -> Quaternion,
{
    if n_samples == 0 {
        return Err(Error::Domain("monte carlo needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    let mut mean = Quaternion::ZERO;
    let mut m2 = 0.0;
    for i in 0..n_samples {
        let cos_phi: f64 = rng.random_range(-1.0..1.0);
        let psi: f64 = rng.random_range(0.0..PI);
        let unit = ImaginaryUnit::new(cos_phi.acos(), psi).to_quaternion();
        let x = normal.sample(&mut rng);
        let y = normal.sample(&mut rng);
        let q = Quaternion::new(x, y * unit.x, y * unit.y, y * unit.z);
        let v = checked(f(q), q)?;
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta.norm_sqr() * (1.0 - 1.0 / (i + 1) as f64);
    }
    let var = if n_samples > 1 {
        m2 / (n_samples - 1) as f64
    } else {
        0.0
    };
    let scale = PI * area;
    Ok((mean * scale, scale * (var / n_samples as f64).sqrt()))
}
