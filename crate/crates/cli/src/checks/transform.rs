use super::{phi_scale, random_q, rel_err, Check, Context, HermiteAt};
use crate::config::Suite;
use num_complex::Complex64;
use qcauchy::basis::{hermite, phi_normalized};
use qcauchy::cauchy::{cauchy_adjoint_on_hermite, cauchy_on_monomial, cauchy_on_normalized, cauchy_transform_batch};
use qcauchy::measure::{inner_product, intrinsic_gram};
use qcauchy::report::{ErrorTally, Metric};
use qcauchy::{BasisIndex, Quaternion, Result};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "transform_right_linearity",
        suite: Suite::Transform,
        anchor: "C(f a + g b) = C(f) a + C(g) b for quaternion constants a, b",
        tolerance: 1e-8,
        metric: Metric::Relative,
        run: right_linearity,
    },
    Check {
        name: "transform_action_on_basis",
        suite: Suite::Transform,
        anchor: "C phi_{m,n} = -A e^{-|q|^2} phi_{m-1,n} / sqrt(m), m >= 1, m+n <= 5",
        tolerance: 1e-6,
        metric: Metric::Relative,
        run: action_on_basis,
    },
    Check {
        name: "transform_m0_branch",
        suite: Suite::Transform,
        anchor: "C phi_{0,n} = -sqrt(A) e^{-|q|^2} H_{-1,n} / sqrt(pi n!), n <= 5",
        tolerance: 1e-6,
        metric: Metric::Relative,
        run: m0_branch,
    },
    Check {
        name: "transform_monomial_action",
        suite: Suite::Transform,
        anchor: "C e_{m,n} = A(-q^m H_{-1,n} e^{-|q|^2} - n! [m > n] q^{m-n-1}), m+n <= 4",
        tolerance: 1e-6,
        metric: Metric::Relative,
        run: monomial_action,
    },
    Check {
        name: "transform_adjoint_pairing",
        suite: Suite::Transform,
        anchor: "<C phi_{m,n}, H_{j,k}> = <phi_{m,n}, C* H_{j,k}> with C* H_{j,k} = A e^{-|p|^2} H_{j,k-1}",
        tolerance: 1e-10,
        metric: Metric::Absolute,
        run: adjoint_pairing,
    },
    Check {
        name: "transform_norm_bound",
        suite: Suite::Transform,
        anchor: "||C f|| <= A / sqrt(pi) for unit-norm polynomials f (excess over the bound)",
        tolerance: 1e-3,
        metric: Metric::Absolute,
        run: norm_bound,
    },
];

const POINTS: usize = 10;
const BASIS_DEGREE: u32 = 5;
const MONOMIAL_DEGREE: u32 = 4;

/// Quadrature values of `C phi_{m,n}` (`m + n <= 5`) and `C e_{m,n}`
/// (`m + n <= 4`) at random points, shared by the action checks.
pub(super) struct Samples {
    points: Vec<Quaternion>,
    phi: Vec<(u32, u32)>,
    monomials: Vec<(u32, u32)>,
    /// Per point: `phi` outputs then `monomials` outputs.
    values: Vec<Vec<Quaternion>>,
}

fn by_degree(max: u32) -> Vec<(u32, u32)> {
    (0..=max).flat_map(|s| (0..=s).map(move |m| (m, s - m))).collect()
}

impl Samples {
    pub(super) fn compute(ctx: &Context) -> Result<Self> {
        let mut rng = ctx.rng("transform_samples");
        let points: Vec<Quaternion> = (0..POINTS).map(|_| random_q(&mut rng, 1.0)).collect();
        let phi = by_degree(BASIS_DEGREE);
        let monomials = by_degree(MONOMIAL_DEGREE);
        let area = ctx.area();
        let f = |p: Quaternion, out: &mut [Quaternion]| {
            let h = HermiteAt::new(BASIS_DEGREE, p);
            let (z, unit) = p.slice_complex();
            for (o, &(m, n)) in out.iter_mut().zip(&phi) {
                *o = h.hermite(m, n) * phi_scale(m, n, area);
            }
            for (o, &(m, n)) in out[phi.len()..].iter_mut().zip(&monomials) {
                *o = Quaternion::from_complex(z.powu(m) * z.conj().powu(n), unit);
            }
        };
        let outputs = phi.len() + monomials.len();
        let values = points
            .iter()
            .map(|&q| cauchy_transform_batch(&f, outputs, q, ctx.spec()))
            .collect::<Result<_>>()?;
        Ok(Self {
            points,
            phi,
            monomials,
            values,
        })
    }
}

fn idx(m: u32, n: u32) -> Result<BasisIndex> {
    BasisIndex::new(m as i32, n as i32)
}

fn basis_branch(ctx: &Context, m0: bool) -> Result<ErrorTally> {
    let s = ctx.transform_samples()?;
    let mut t = ErrorTally::new();
    for (&q, vals) in s.points.iter().zip(&s.values) {
        for (&(m, n), &v) in s.phi.iter().zip(vals) {
            if (m == 0) != m0 {
                continue;
            }
            let (e, r) = rel_err(v, cauchy_on_normalized(idx(m, n)?, q, ctx.area())?);
            t.record(e, r);
        }
    }
    Ok(t)
}

fn action_on_basis(ctx: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    basis_branch(ctx, false)
}

fn m0_branch(ctx: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    basis_branch(ctx, true)
}

fn monomial_action(ctx: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let s = ctx.transform_samples()?;
    let mut t = ErrorTally::new();
    for (&q, vals) in s.points.iter().zip(&s.values) {
        for (&(m, n), &v) in s.monomials.iter().zip(&vals[s.phi.len()..]) {
            let (e, r) = rel_err(v, cauchy_on_monomial(m, n, q, ctx.area()));
            t.record(e, r);
        }
    }
    Ok(t)
}

fn right_linearity(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let q = random_q(rng, 1.0);
    let (a, b) = (random_q(rng, 2.0), random_q(rng, 2.0));
    let parts = |p: Quaternion, out: &mut [Quaternion]| {
        let h = HermiteAt::new(3, p);
        let f = h.hermite(1, 2);
        let g = h.hermite(3, 0) + Quaternion::I * p.w;
        out[0] = f;
        out[1] = g;
        out[2] = f * a + g * b;
    };
    let v = cauchy_transform_batch(&parts, 3, q, ctx.spec())?;
    let mut t = ErrorTally::new();
    let (e, r) = rel_err(v[2], v[0] * a + v[1] * b);
    t.record(e, r);
    Ok(t)
}

fn adjoint_pairing(ctx: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let (spec, area) = (ctx.spec(), ctx.area());
    let mut t = ErrorTally::new();
    for ((m, n), (j, k)) in [
        ((1, 0), (0, 0)),
        ((2, 1), (0, 0)),
        ((3, 2), (1, 1)),
        ((0, 2), (0, 3)),
        ((1, 3), (0, 2)),
    ] {
        let lhs = inner_product(
            &|q| cauchy_on_normalized(idx(m, n).expect("valid"), q, area).expect("polynomial index"),
            &|q| hermite(j, k, q),
            spec,
        )?;
        let rhs = inner_product(
            &|q| phi_normalized(m, n, q, area),
            &|q| cauchy_adjoint_on_hermite(idx(j, k).expect("valid"), q, area).expect("polynomial index"),
            spec,
        )?;
        let (e, r) = rel_err(lhs, rhs);
        t.record(e, r);
    }
    Ok(t)
}

const NORM_DEGREE: u32 = 6;
const RANDOM_COMBINATIONS: usize = 20;

fn norm_bound(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let area = ctx.area();
    let corpus = by_degree(NORM_DEGREE);
    let indices: Vec<BasisIndex> = corpus.iter().map(|&(m, n)| idx(m, n)).collect::<Result<_>>()?;
    // C phi is one complex function on every slice: evaluate on C_j
    let gram = intrinsic_gram(
        &|z: Complex64, out: &mut [Complex64]| {
            let q = Quaternion::from_complex(z, Quaternion::J);
            for (o, &i) in out.iter_mut().zip(&indices) {
                let v = cauchy_on_normalized(i, q, area).unwrap_or(Quaternion::real(f64::NAN));
                *o = Complex64::new(v.w, v.y);
            }
        },
        indices.len(),
        ctx.spec(),
    )?;
    // f64::max drops NaN, so non-finite entries must be caught here
    if gram.iter().flatten().any(|v| !v.is_finite()) {
        return Ok(nan_tally());
    }
    let quadratic = |c: &[Quaternion]| -> f64 {
        let mut s = 0.0;
        for (a, ca) in c.iter().enumerate() {
            for (b, cb) in c.iter().enumerate() {
                s += (ca.conj() * gram[a][b] * *cb).w;
            }
        }
        s.max(0.0).sqrt()
    };
    let mut worst = 0.0f64;
    for a in 0..indices.len() {
        let mut c = vec![Quaternion::ZERO; indices.len()];
        c[a] = Quaternion::ONE;
        worst = worst.max(quadratic(&c));
    }
    for _ in 0..RANDOM_COMBINATIONS {
        let mut c: Vec<Quaternion> = (0..indices.len()).map(|_| random_q(rng, 1.0)).collect();
        let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        c.iter_mut().for_each(|v| *v = *v / norm);
        worst = worst.max(quadratic(&c));
    }
    let mut t = ErrorTally::new();
    t.record((worst - area / PI.sqrt()).max(0.0), 0.0);
    Ok(t)
}

fn nan_tally() -> ErrorTally {
    let mut t = ErrorTally::new();
    t.record(f64::NAN, 0.0);
    t
}
