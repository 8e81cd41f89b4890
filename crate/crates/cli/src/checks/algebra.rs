use super::{random_q, random_unit, Check, Context};
use crate::config::Suite;
use qcauchy::report::{ErrorTally, Metric};
use qcauchy::{Quaternion, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "mul_associativity_distributivity",
        suite: Suite::Algebra,
        anchor: "(ab)c = a(bc) and a(b+c) = ab + ac",
        tolerance: 1e-13,
        metric: Metric::Relative,
        run: associativity,
    },
    Check {
        name: "norm_multiplicative",
        suite: Suite::Algebra,
        anchor: "|ab| = |a||b|",
        tolerance: 1e-13,
        metric: Metric::Relative,
        run: norm_multiplicative,
    },
    Check {
        name: "conj_reverses_product",
        suite: Suite::Algebra,
        anchor: "conj(ab) = conj(b) conj(a)",
        tolerance: 1e-13,
        metric: Metric::Relative,
        run: conj_reverses,
    },
    Check {
        name: "same_slice_commutes",
        suite: Suite::Algebra,
        anchor: "ab = ba for a, b in one slice C_I",
        tolerance: 1e-13,
        metric: Metric::Relative,
        run: same_slice_commutes,
    },
];

const SAMPLES: usize = 200;

fn associativity(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..SAMPLES {
        let (a, b, c) = (random_q(rng, 3.0), random_q(rng, 3.0), random_q(rng, 3.0));
        t.record(((a * b) * c - a * (b * c)).norm(), a.norm() * b.norm() * c.norm());
        t.record((a * (b + c) - (a * b + a * c)).norm(), a.norm() * (b.norm() + c.norm()));
    }
    Ok(t)
}

fn norm_multiplicative(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..SAMPLES {
        let (a, b) = (random_q(rng, 3.0), random_q(rng, 3.0));
        t.record_real((a * b).norm(), a.norm() * b.norm());
    }
    Ok(t)
}

fn conj_reverses(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..SAMPLES {
        let (a, b) = (random_q(rng, 3.0), random_q(rng, 3.0));
        t.record(((a * b).conj() - b.conj() * a.conj()).norm(), a.norm() * b.norm());
    }
    Ok(t)
}

fn same_slice_commutes(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..SAMPLES {
        let u = random_unit(rng);
        let mut on_slice = || Quaternion::real(rng.random_range(-3.0..3.0)) + u * rng.random_range(-3.0..3.0);
        let (a, b) = (on_slice(), on_slice());
        t.record((a * b - b * a).norm(), a.norm() * b.norm());
    }
    Ok(t)
}
