use super::{random_q, random_unit, rel_err, Check, Context};
use crate::config::Suite;
use qcauchy::cauchy::{kernel_closed, kernel_lr_estimate, kernel_lr_integral, kernel_series};
use qcauchy::report::{ErrorTally, Metric};
use qcauchy::{Quaternion, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "kernel_series_closed_agreement",
        suite: Suite::Kernel,
        anchor: "(q^2 - 2q Re p + |p|^2)^{-1}(q - conj p) = its power series on both branches; N(2i, j) = -(2i+j)/3",
        tolerance: 1e-10,
        metric: Metric::Relative,
        run: series_closed,
    },
    Check {
        name: "kernel_slice_reduction",
        suite: Suite::Kernel,
        anchor: "N(q,p) = (q-p)^{-1} for p in the slice of q",
        tolerance: 1e-13,
        metric: Metric::Relative,
        run: slice_reduction,
    },
    Check {
        name: "kernel_lr_origin_value",
        suite: Suite::Kernel,
        anchor: "int_H |N(0,p)|^r dmu(p) = A pi Gamma(1 - r/2)",
        tolerance: 1e-9,
        metric: Metric::Relative,
        run: lr_origin,
    },
    Check {
        name: "kernel_lr_probability_bound",
        suite: Suite::Kernel,
        anchor: "sup_q int_H |N(q,p)|^r dmu(p)/pi <= A pi^{1-r} Gamma(1 - r/2), 0 <= r <= 1",
        tolerance: 1e-9,
        metric: Metric::Relative,
        run: lr_probability_bound,
    },
];

/// Pairs per branch.
const PAIRS: usize = 200;

fn series_closed(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    let hand = kernel_closed(Quaternion::I * 2.0, Quaternion::J)?;
    let (e, r) = rel_err(hand, -(Quaternion::I * 2.0 + Quaternion::J) / 3.0);
    t.record(e, r);
    for exterior in [false, true] {
        for _ in 0..PAIRS {
            let q = random_q(rng, 1.0);
            if q.norm() < 0.1 {
                continue;
            }
            let ratio = rng.random_range(0.05..0.8);
            let dir = random_q(rng, 1.0);
            let len = if exterior { q.norm() / ratio } else { q.norm() * ratio };
            let p = dir * (len.min(4.0) / dir.norm());
            let closed = kernel_closed(q, p)?;
            let series = kernel_series(q, p, 1e-16)?.value;
            let (e, r) = rel_err(series, closed);
            t.record(e, r);
        }
    }
    Ok(t)
}

fn slice_reduction(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..PAIRS {
        let q = random_q(rng, 2.0);
        let (_, _, unit) = q.slice_parts();
        let p = Quaternion::real(rng.random_range(-2.0..2.0)) + unit * rng.random_range(-2.0..2.0);
        if (q - p).norm() < 1e-3 {
            continue;
        }
        let (e, r) = rel_err(kernel_closed(q, p)?, (q - p).inverse()?);
        t.record(e, r);
    }
    Ok(t)
}

fn lr_origin(ctx: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for r in [0.0, 0.25, 0.5, 1.0, 1.5] {
        let v = kernel_lr_integral(r, Quaternion::ZERO, ctx.spec())?;
        let want = ctx.area() * PI * statrs::function::gamma::gamma(1.0 - r / 2.0);
        t.record_real(v, want);
    }
    Ok(t)
}

fn lr_probability_bound(ctx: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut samples = vec![Quaternion::ZERO, Quaternion::real(0.7), Quaternion::J * 0.5];
    for _ in 0..3 {
        samples.push(Quaternion::real(rng.random_range(-1.5..1.5)) + random_unit(rng) * rng.random_range(0.0..1.5));
    }
    let mut t = ErrorTally::new();
    for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let est = kernel_lr_estimate(r, &samples, ctx.spec())?;
        let excess = (est.value / PI - est.bound).max(0.0);
        t.record(excess, est.bound);
    }
    Ok(t)
}
