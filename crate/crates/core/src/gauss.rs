//! Gaussian quadrature rules (Legendre, Laguerre, Hermite) and adaptive
//! Gauss-Kronrod integration on finite intervals.

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine image of a Legendre rule on `[-1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> GaussRule {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        GaussRule {
            nodes: self.nodes.iter().map(|t| c + h * t).collect(),
            weights: self.weights.iter().map(|w| w * h).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

const NEWTON_MAX: usize = 100;

/// Gauss-Legendre on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..NEWTON_MAX {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

/// Gauss-Laguerre for `int_0^inf f(t) e^{-t} dt`.
///
/// Roots start from the usual asymptotic guesses and are polished by Newton
/// steps whose polynomial values are carried in double-double arithmetic; the
/// smallest nodes are otherwise limited to ~1e-14 relative accuracy, which
/// costs ~1e-12 in their weights.
pub fn gauss_laguerre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let mut z: f64 = 0.0;
    for i in 0..n {
        if i == 0 {
            z = 3.0 / (1.0 + 2.4 * nf);
        } else if i == 1 {
            z += 15.0 / (1.0 + 2.5 * nf);
        } else {
            let ai = (i - 1) as f64;
            z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2]);
        }
        for _ in 0..NEWTON_MAX {
            let (ln, lm1) = laguerre_dd(n, z);
            // L_n'(z) = n (L_n - L_{n-1}) / z
            let dl = ln.sub(lm1).mul_f64(nf).hi / z;
            let dz = ln.hi / dl;
            z -= dz;
            if dz.abs() <= 4e-17 * z {
                break;
            }
        }
        let (_, lm1) = laguerre_dd(n, z);
        nodes[i] = z;
        weights[i] = z / (nf * nf * lm1.hi * lm1.hi);
    }
    GaussRule { nodes, weights }
}

/// `(L_n(z), L_{n-1}(z))` by the three-term recurrence in double-double.
fn laguerre_dd(n: usize, z: f64) -> (DoubleDouble, DoubleDouble) {
    let mut p1 = DoubleDouble::from(1.0);
    let mut p2 = DoubleDouble::from(0.0);
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let a = DoubleDouble::two_sum((2 * j - 1) as f64, -z);
        // (a_hi + a_lo) * p2 with p2 double-double
        let t = p2.mul(a);
        p1 = t.sub(p3.mul_f64((j - 1) as f64)).div_f64(j as f64);
    }
    (p1, p2)
}

/// Gauss-Hermite for `int_R f(t) e^{-t^2} dt`.
pub fn gauss_hermite(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut z: f64 = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..NEWTON_MAX {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = (j + 1) as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        let w = 2.0 / (pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    nodes.reverse();
    weights.reverse();
    GaussRule { nodes, weights }
}

type RuleCache = Mutex<HashMap<(u8, usize), Arc<GaussRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(kind: u8, n: usize, build: fn(usize) -> GaussRule) -> Arc<GaussRule> {
    let mut map = cache().lock().expect("quadrature rule cache poisoned");
    map.entry((kind, n)).or_insert_with(|| Arc::new(build(n))).clone()
}

pub fn legendre_rule(n: usize) -> Arc<GaussRule> {
    cached(0, n, gauss_legendre)
}

pub fn laguerre_rule(n: usize) -> Arc<GaussRule> {
    cached(1, n, gauss_laguerre)
}

pub fn hermite_rule(n: usize) -> Arc<GaussRule> {
    cached(2, n, gauss_hermite)
}

/// Gauss rule for `int_0^1 f(x) x^beta dx`, `beta > -1`, by Golub-Welsch on the
/// Jacobi recurrence with `alpha = 0`.
pub fn gauss_jacobi_unit(n: usize, beta: f64) -> Result<GaussRule> {
    if !(beta > -1.0) || n == 0 {
        return Err(Error::Domain(format!(
            "Gauss-Jacobi needs n >= 1 and beta > -1, got n = {n}, beta = {beta}"
        )));
    }
    let a = 0.0;
    let b = beta;
    let mut jac = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        jac[(k, k)] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + a + b;
            let num = 4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b);
            let den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
            let off = (num / den).sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(jac);
    // total mass of (1+s)^beta on [-1, 1] is 2^{beta+1}/(beta+1); mapping to
    // [0, 1] multiplies by 2^{-(beta+1)}
    let mu0 = 1.0 / (b + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (1.0 + eig.eigenvalues[i]), mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Gauss-Kronrod (7/15) with deterministic bisection order.
pub fn adaptive_kronrod(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<AdaptiveResult> {
    const MAX_SEGMENTS: usize = 4096;
    let (v0, e0) = kronrod15(&f, a, b);
    let mut segments = vec![(a, b, v0, e0)];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.2).sum();
        let error: f64 = segments.iter().map(|s| s.3).sum();
        if !value.is_finite() {
            return Err(Error::NonConvergence {
                terms: evaluations,
                last_term: value,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(AdaptiveResult {
                value,
                error,
                evaluations,
            });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::NonConvergence {
                terms: evaluations,
                last_term: error,
            });
        }
        let (idx, _) =
            segments.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |best, (i, s)| if s.3 > best.1 { (i, s.3) } else { best },
            );
        let (sa, sb, _, _) = segments.swap_remove(idx);
        let mid = 0.5 * (sa + sb);
        let (vl, el) = kronrod15(&f, sa, mid);
        let (vr, er) = kronrod15(&f, mid, sb);
        evaluations += 30;
        segments.push((sa, mid, vl, el));
        segments.push((mid, sb, vr, er));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_moments() {
        for beta in [-0.5, 0.0, 0.3, 1.0] {
            let r = gauss_jacobi_unit(12, beta).unwrap();
            for k in 0..20 {
                let exact = 1.0 / (k as f64 + beta + 1.0);
                let v = r.integrate(|x| x.powi(k));
                assert!((v - exact).abs() < 1e-14, "beta {beta} k {k}: {v} vs {exact}");
            }
        }
        assert!(gauss_jacobi_unit(4, -1.0).is_err());
    }
    use crate::specfun::factorial;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(10);
        for d in 0..20 {
            let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
            assert!((r.integrate(|x| x.powi(d)) - exact).abs() < 1e-14, "degree {d}");
        }
    }

    #[test]
    fn laguerre_moments() {
        for &n in &[8usize, 64, 150] {
            let r = gauss_laguerre(n);
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
            for d in 0..(2 * n).min(40) {
                let got = r.integrate(|t| t.powi(d as i32));
                let exact = factorial(d as u32);
                assert!((got - exact).abs() <= 1e-12 * exact, "n={n} d={d} got={got}");
            }
        }
    }

    #[test]
    fn hermite_moments() {
        let r = gauss_hermite(40);
        let sqrt_pi = PI.sqrt();
        // int t^{2k} e^{-t^2} = Gamma(k + 1/2)
        let mut gamma_half = sqrt_pi;
        for k in 0..20 {
            let got = r.integrate(|t| t.powi(2 * k));
            assert!((got - gamma_half).abs() <= 1e-12 * gamma_half, "k={k}");
            assert!(r.integrate(|t| t.powi(2 * k + 1)).abs() < 1e-10 * gamma_half);
            gamma_half *= k as f64 + 0.5;
        }
    }

    #[test]
    fn kronrod_handles_sqrt_singularity() {
        let r = adaptive_kronrod(|x: f64| x.sqrt(), 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-13);
    }
}
