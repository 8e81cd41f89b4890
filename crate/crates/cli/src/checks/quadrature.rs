use super::{random_unit, rel_err, Check, Context};
use crate::config::Suite;
use num_complex::Complex64;
use qcauchy::basis::{hermite, phi_column};
use qcauchy::measure::{integral_over_h, intrinsic_gram, monte_carlo_integral, slice_integral_unit};
use qcauchy::report::{ErrorTally, Metric};
use qcauchy::specfun::factorial;
use qcauchy::{ImaginaryUnit, Quaternion, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "monomial_quadrature_exactness",
        suite: Suite::Quadrature,
        anchor: "int_{C_I} q^m conj(q)^n dmu_I = pi n! delta_{mn}",
        tolerance: 1e-12,
        metric: Metric::Relative,
        run: monomial_exactness,
    },
    Check {
        name: "hemisphere_average_consistency",
        suite: Suite::Quadrature,
        anchor: "int_H f dmu = A int_{C_I} f dmu_I for slice-independent f",
        tolerance: 1e-12,
        metric: Metric::Relative,
        run: hemisphere_average,
    },
    Check {
        name: "monte_carlo_agreement",
        suite: Suite::Quadrature,
        anchor: "Monte Carlo and deterministic quadrature agree (error in standard errors)",
        tolerance: 4.0,
        metric: Metric::Absolute,
        run: monte_carlo,
    },
    Check {
        name: "phi_gram_orthonormality",
        suite: Suite::Quadrature,
        anchor: "<phi_{m,n}, phi_{j,k}> = delta_{mj} delta_{nk}, m,n <= 6",
        tolerance: 1e-8,
        metric: Metric::Absolute,
        run: phi_gram,
    },
];

const MONOMIAL_MAX: u32 = 10;

fn monomial_exactness(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let spec = ctx.spec();
    let unit = random_unit(rng);
    let mut t = ErrorTally::new();
    for m in 0..=MONOMIAL_MAX {
        for n in 0..=MONOMIAL_MAX {
            // exactness range of the product rule
            if (m + n) as usize > 2 * spec.radial_order - 2 || 2 * m.abs_diff(n) as usize >= spec.angular_order {
                continue;
            }
            let v = slice_integral_unit(&|q: Quaternion| q.powi(m) * q.conj().powi(n), unit, spec)?;
            let want = if m == n { PI * factorial(n) } else { 0.0 };
            let (e, _) = rel_err(v, Quaternion::real(want));
            // off-diagonal values vanish; scale by the integral of |q|^{m+n} instead
            let scale = PI * statrs::function::gamma::gamma((m + n) as f64 / 2.0 + 1.0);
            t.record(e, scale);
        }
    }
    Ok(t)
}

fn hemisphere_average(ctx: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let spec = ctx.spec();
    let mut t = ErrorTally::new();
    for (m, n) in [(0, 0), (2, 1), (3, 3), (5, 2)] {
        let f = |q: Quaternion| {
            let h = hermite(m, n, q);
            h.conj() * h * (-q.norm_sqr()).exp()
        };
        let full = integral_over_h(&f, spec)?;
        let one = qcauchy::measure::slice_integral(&f, ImaginaryUnit::CANONICAL, spec)?;
        let (e, r) = rel_err(full, one * spec.area_normalization);
        t.record(e, r);
    }
    Ok(t)
}

const MC_SAMPLES: usize = 200_000;

type Integrand = Box<dyn Fn(Quaternion) -> Quaternion + Sync>;

fn monte_carlo(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let spec = ctx.spec();
    let corpus: Vec<Integrand> = vec![
        Box::new(|q| Quaternion::real(q.norm_sqr())),
        Box::new(|q| q * q.conj() * q.w + Quaternion::I * q.x * q.x),
        Box::new(|q| Quaternion::real((-q.norm_sqr()).exp()) + q.vector() * 0.5),
        Box::new(|q| hermite(2, 1, q) * hermite(1, 2, q)),
    ];
    let mut t = ErrorTally::new();
    for f in &corpus {
        let det = integral_over_h(f, spec)?;
        let (mc, se) = monte_carlo_integral(f, MC_SAMPLES, rng.random(), spec.area_normalization)?;
        t.record((mc - det).norm() / se, 0.0);
    }
    Ok(t)
}

const GRAM_MAX: u32 = 6;

fn phi_gram(ctx: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let w = GRAM_MAX as usize + 1;
    let gram = intrinsic_gram(
        &|z: Complex64, out: &mut [Complex64]| {
            for n in 0..=GRAM_MAX {
                let col = phi_column(n, GRAM_MAX, z);
                for (m, v) in col.into_iter().enumerate() {
                    out[m * w + n as usize] = v;
                }
            }
        },
        w * w,
        ctx.spec(),
    )?;
    // phi_column is normalized for A = 1
    let area = ctx.area();
    let mut t = ErrorTally::new();
    for (r, row) in gram.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let want = if r == c { 1.0 } else { 0.0 };
            t.record((*v * (1.0 / area) - Quaternion::real(want)).norm(), want);
        }
    }
    Ok(t)
}
