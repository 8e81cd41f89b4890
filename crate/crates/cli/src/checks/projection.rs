use super::{phi_scale, random_q, random_unit, rel_err, Check, Context, HermiteAt};
use crate::config::Suite;
use qcauchy::basis::psi_extended;
use qcauchy::bergman::{
    kernel_rk_series, kernel_rk_slice_closed, kernel_sk, kernel_sk_via_kn, pkc_expansions, projection_expansions,
    repkernel_kn_series, repkernel_kn_slice_closed, SeriesValue, SliceExpansion, TruncationSpec,
};
use qcauchy::measure::{inner_product, integral_over_h};
use qcauchy::report::{ErrorTally, Metric};
use qcauchy::spectral::pkc_on_psi_closed;
use qcauchy::{Quaternion, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "projection_reproduces_own_space",
        suite: Suite::Projection,
        anchor: "P_n phi_{m,n} = phi_{m,n}",
        tolerance: 1e-7,
        metric: Metric::Absolute,
        run: reproduces_own_space,
    },
    Check {
        name: "projection_annihilates_other_spaces",
        suite: Suite::Projection,
        anchor: "P_n phi_{m,n'} = 0 for n' != n",
        tolerance: 1e-7,
        metric: Metric::Absolute,
        run: annihilates_other_spaces,
    },
    Check {
        name: "projection_idempotence",
        suite: Suite::Projection,
        anchor: "P_n P_n f = P_n f",
        tolerance: 1e-6,
        metric: Metric::Absolute,
        run: idempotence,
    },
    Check {
        name: "repkernel_series_vs_slice_closed",
        suite: Suite::Projection,
        anchor: "sum_m H_{m,n}(q) conj(H_{m,n}(p)) / (pi m! n!) = e^{q conj p} L_n(|q-p|^2) / pi on one slice",
        tolerance: 1e-10,
        metric: Metric::Relative,
        run: kn_series_vs_closed,
    },
    Check {
        name: "rk_series_vs_slice_closed",
        suite: Suite::Projection,
        anchor: "R_k series = (-1)^{k-1} e^{-|p|^2} e^{q conj p} H_{k-1,k}(q-p) / (pi k!) on one slice",
        tolerance: 1e-10,
        metric: Metric::Relative,
        run: rk_series_vs_closed,
    },
    Check {
        name: "sk_kn_identity",
        suite: Suite::Projection,
        anchor: "S_k(p,q) = A e^{-|p|^2-|q|^2} K_{k-1}(p,q) / k",
        tolerance: 1e-9,
        metric: Metric::Relative,
        run: sk_identity,
    },
    Check {
        name: "reproducing_property",
        suite: Suite::Projection,
        anchor: "int_H K_n(q,p) f(p) dmu(p) = A f(q) for f in span{phi_{m,n}: m <= 6}",
        tolerance: 1e-7,
        metric: Metric::Absolute,
        run: reproducing,
    },
    Check {
        name: "projection_orthogonality",
        suite: Suite::Projection,
        anchor: "<P_n f, g - P_n g> = 0",
        tolerance: 1e-6,
        metric: Metric::Absolute,
        run: orthogonality,
    },
    Check {
        name: "range_containment",
        suite: Suite::Projection,
        anchor: "P_n P_k C f = 0 for n != k",
        tolerance: 1e-6,
        metric: Metric::Absolute,
        run: range_containment,
    },
    Check {
        name: "series_tail_bound_covers_truncation_change",
        suite: Suite::Projection,
        anchor: "reported tail bound >= change of the kernel series when max_m doubles (excess)",
        tolerance: 0.0,
        metric: Metric::Absolute,
        run: tail_bound,
    },
    Check {
        name: "pkc_on_psi_action",
        suite: Suite::Projection,
        anchor: "P_k C psi_{n,k} = -A lambda_{n,k} H_{n,k}",
        tolerance: 1e-8,
        metric: Metric::Relative,
        run: pkc_on_psi,
    },
];

/// Largest `m` and `n` of the basis functions fed to the projections.
const PROJ_M: u32 = 6;
const PROJ_N: u32 = 3;
const POINTS: usize = 5;

/// `P_n phi_{m,n'}` for `n <= 3`, indexed `[n][m * (PROJ_N + 1) + n']`.
pub(super) fn basis_projections(ctx: &Context) -> Result<Vec<Vec<SliceExpansion>>> {
    let area = ctx.area();
    let w = PROJ_N as usize + 1;
    let f = |p: Quaternion, out: &mut [Quaternion]| {
        let h = HermiteAt::new(PROJ_M, p);
        for m in 0..=PROJ_M {
            for n in 0..=PROJ_N {
                out[m as usize * w + n as usize] = h.hermite(m, n) * phi_scale(m, n, area);
            }
        }
    };
    (0..=PROJ_N)
        .map(|n| projection_expansions(&f, (PROJ_M as usize + 1) * w, n, ctx.spec(), ctx.trunc()))
        .collect()
}

fn projected_basis(ctx: &Context, rng: &mut ChaCha8Rng, own: bool) -> Result<ErrorTally> {
    let proj = ctx.projections()?;
    let area = ctx.area();
    let w = PROJ_N as usize + 1;
    let points: Vec<Quaternion> = (0..POINTS).map(|_| random_q(rng, 0.8)).collect();
    let mut t = ErrorTally::new();
    for &q in &points {
        let h = HermiteAt::new(PROJ_M, q);
        for (n, row) in proj.iter().enumerate() {
            for m in 0..=PROJ_M {
                for n2 in 0..=PROJ_N {
                    if (n2 as usize == n) != own {
                        continue;
                    }
                    let want = if own {
                        h.hermite(m, n2) * phi_scale(m, n2, area)
                    } else {
                        Quaternion::ZERO
                    };
                    let (e, r) = rel_err(row[m as usize * w + n2 as usize].evaluate(q), want);
                    t.record(e, r);
                }
            }
        }
    }
    Ok(t)
}

fn reproduces_own_space(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    projected_basis(ctx, rng, true)
}

fn annihilates_other_spaces(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    projected_basis(ctx, rng, false)
}

/// Random polynomials `sum_{m,n <= 4} phi_{m,n} c_{m,n}` with quaternion coefficients.
struct RandomPolynomials {
    coefficients: Vec<Vec<Quaternion>>,
    area: f64,
}

const POLY_DEGREE: u32 = 4;

impl RandomPolynomials {
    fn new(count: usize, rng: &mut ChaCha8Rng, area: f64) -> Self {
        let terms = ((POLY_DEGREE + 1) * (POLY_DEGREE + 1)) as usize;
        let coefficients = (0..count)
            .map(|_| (0..terms).map(|_| random_q(rng, 1.0)).collect())
            .collect();
        Self { coefficients, area }
    }

    fn eval(&self, p: Quaternion, out: &mut [Quaternion]) {
        let h = HermiteAt::new(POLY_DEGREE, p);
        let w = POLY_DEGREE as usize + 1;
        for (o, c) in out.iter_mut().zip(&self.coefficients) {
            let mut s = Quaternion::ZERO;
            for m in 0..=POLY_DEGREE {
                for n in 0..=POLY_DEGREE {
                    s += h.hermite(m, n) * phi_scale(m, n, self.area) * c[m as usize * w + n as usize];
                }
            }
            *o = s;
        }
    }
}

fn idempotence(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let polys = RandomPolynomials::new(3, rng, ctx.area());
    let f = |p: Quaternion, out: &mut [Quaternion]| polys.eval(p, out);
    let mut t = ErrorTally::new();
    for n in 0..=2 {
        let once = projection_expansions(&f, 3, n, ctx.spec(), ctx.trunc())?;
        let g = |p: Quaternion, out: &mut [Quaternion]| {
            for (o, e) in out.iter_mut().zip(&once) {
                *o = e.evaluate(p);
            }
        };
        let twice = projection_expansions(&g, 3, n, ctx.spec(), ctx.trunc())?;
        for (a, b) in once.iter().zip(&twice) {
            for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
                t.record((*x - *y).norm(), x.norm());
            }
        }
    }
    Ok(t)
}

/// A pair on a common random slice with coordinates in `[-r, r]`.
fn slice_pair(rng: &mut ChaCha8Rng, r: f64) -> (Quaternion, Quaternion) {
    let u = random_unit(rng);
    let mut point = || Quaternion::real(rng.random_range(-r..r)) + u * rng.random_range(-r..r);
    (point(), point())
}

const PAIRS: usize = 50;

fn kn_series_vs_closed(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..PAIRS {
        let (q, p) = slice_pair(rng, 1.5);
        for n in 0..=4 {
            let (e, r) = rel_err(
                repkernel_kn_series(n, q, p, ctx.trunc())?.value,
                repkernel_kn_slice_closed(n, q, p)?,
            );
            t.record(e, r);
        }
    }
    Ok(t)
}

fn rk_series_vs_closed(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..PAIRS {
        let (q, p) = slice_pair(rng, 1.5);
        for k in 1..=4 {
            let (e, r) = rel_err(
                kernel_rk_series(k, q, p, ctx.trunc())?.value,
                kernel_rk_slice_closed(k, q, p)?,
            );
            t.record(e, r);
        }
    }
    Ok(t)
}

fn sk_identity(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..20 {
        let (p, q) = (random_q(rng, 1.5), random_q(rng, 1.5));
        for k in 1..=4 {
            let a = kernel_sk(k, p, q, ctx.area(), ctx.trunc())?.value;
            let (e, r) = rel_err(a, kernel_sk_via_kn(k, p, q, ctx.area(), ctx.trunc())?);
            t.record(e, r);
        }
    }
    Ok(t)
}

fn reproducing(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    // K_n(q,p) f(p) = sum_m phi_m(q) [conj(phi_m(p)) f(p)] with the bracket a
    // slice function of p, so the integrand is affine in the unit of p and a
    // 4x4 hemisphere rule integrates it exactly
    let mut spec = *ctx.spec();
    spec.hemi_phi_order = spec.hemi_phi_order.min(4);
    spec.hemi_psi_order = spec.hemi_psi_order.min(4);
    let area = ctx.area();
    let q = random_q(rng, 0.8);
    let mut t = ErrorTally::new();
    for n in 0..=2u32 {
        let c: Vec<Quaternion> = (0..=6).map(|_| random_q(rng, 1.0)).collect();
        let f = |p: Quaternion| {
            let h = HermiteAt::new(6, p);
            (0..=6u32)
                .map(|m| h.hermite(m, n) * phi_scale(m, n, area) * c[m as usize])
                .sum::<Quaternion>()
        };
        // a series failure poisons the integral and so the tally
        let v = integral_over_h(
            &|p| match repkernel_kn_series(n, q, p, ctx.trunc()) {
                Ok(k) => k.value * f(p),
                Err(_) => Quaternion::real(f64::NAN),
            },
            &spec,
        )?;
        let (e, r) = rel_err(v, f(q) * area);
        t.record(e, r);
    }
    Ok(t)
}

fn orthogonality(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let polys = RandomPolynomials::new(2, rng, ctx.area());
    let both = |p: Quaternion, out: &mut [Quaternion]| polys.eval(p, out);
    let mut t = ErrorTally::new();
    for n in [0u32, 1, 3] {
        let proj = projection_expansions(&both, 2, n, ctx.spec(), ctx.trunc())?;
        let v = inner_product(
            &|p| proj[0].evaluate(p),
            &|p| {
                let mut out = [Quaternion::ZERO; 2];
                polys.eval(p, &mut out);
                out[1] - proj[1].evaluate(p)
            },
            ctx.spec(),
        )?;
        t.record(v.norm(), 0.0);
    }
    Ok(t)
}

fn range_containment(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let polys = RandomPolynomials::new(2, rng, ctx.area());
    let f = |p: Quaternion, out: &mut [Quaternion]| polys.eval(p, out);
    let mut t = ErrorTally::new();
    for k in 1..=2u32 {
        let image = pkc_expansions(&f, 2, k, ctx.spec(), ctx.trunc())?;
        let g = |p: Quaternion, out: &mut [Quaternion]| {
            for (o, e) in out.iter_mut().zip(&image) {
                *o = e.evaluate(p);
            }
        };
        for n in (0..=3u32).filter(|&n| n != k) {
            for e in projection_expansions(&g, 2, n, ctx.spec(), ctx.trunc())? {
                for c in &e.coefficients {
                    t.record(c.norm(), 0.0);
                }
            }
        }
    }
    Ok(t)
}

/// Amount by which two truncations differ beyond the tail bound of the
/// shorter, after a rounding allowance on the longer sum.
fn excess(short: &SeriesValue, long: &SeriesValue) -> f64 {
    let rounding = 4.0 * long.terms as f64 * f64::EPSILON * long.value.norm();
    ((short.value - long.value).norm() - short.tail_bound - rounding).max(0.0)
}

fn tail_bound(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    let loose = |max_m| TruncationSpec {
        max_m,
        tail_tolerance: 1.0,
    };
    for _ in 0..10 {
        let (q, p) = (random_q(rng, 0.6), random_q(rng, 0.6));
        for k in [1u32, 3] {
            let a = kernel_rk_series(k, q, p, &loose(20))?;
            let b = kernel_rk_series(k, q, p, &loose(40))?;
            t.record(excess(&a, &b), 0.0);
        }
        for n in [0u32, 2] {
            let a = repkernel_kn_series(n, q, p, &loose(12))?;
            let b = repkernel_kn_series(n, q, p, &loose(24))?;
            t.record(excess(&a, &b), 0.0);
        }
    }
    Ok(t)
}

fn pkc_on_psi(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let points: Vec<Quaternion> = (0..POINTS).map(|_| random_q(rng, 0.8)).collect();
    let mut t = ErrorTally::new();
    for k in 1..=2u32 {
        let f = |p: Quaternion, out: &mut [Quaternion]| {
            for (n, o) in out.iter_mut().enumerate() {
                *o = psi_extended(n as u32, k, p);
            }
        };
        let ex = pkc_expansions(&f, 4, k, ctx.spec(), ctx.trunc())?;
        for (n, e) in ex.iter().enumerate() {
            for &q in &points {
                let (err, r) = rel_err(e.evaluate(q), pkc_on_psi_closed(n as u32, k, q, ctx.area())?);
                t.record(err, r);
            }
        }
    }
    Ok(t)
}
