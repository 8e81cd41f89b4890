use super::{random_q, random_unit, rel_err, Check, Context, HermiteAt};
use crate::config::Suite;
use qcauchy::basis::{hermite, hermite_coefficients_exact, hermite_explicit, hermite_hypergeometric};
use qcauchy::report::{ErrorTally, Metric};
use qcauchy::{Quaternion, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "hermite_index_swap_conjugation",
        suite: Suite::Basis,
        anchor: "conj(H_{m,n}(q)) = H_{n,m}(q)",
        tolerance: 1e-12,
        metric: Metric::Relative,
        run: index_swap,
    },
    Check {
        name: "hermite_explicit_vs_hypergeometric",
        suite: Suite::Basis,
        anchor: "finite l-sum form of H_{m,n} = terminating 1F1 form, m,n <= 10",
        tolerance: 1e-11,
        metric: Metric::Relative,
        run: explicit_vs_hypergeometric,
    },
    Check {
        name: "hermite_slice_complex_agreement",
        suite: Suite::Basis,
        anchor: "H_{m,n}(x+Iy) = complex H_{m,n}(x+iy) lifted to C_I",
        tolerance: 1e-11,
        metric: Metric::Relative,
        run: slice_complex,
    },
    Check {
        name: "hermite_integer_coefficients",
        suite: Suite::Basis,
        anchor: "sum_l (-1)^l l! C(m,l) C(n,l) = H_{m,n}(1) in exact integers",
        tolerance: 1e-12,
        metric: Metric::Relative,
        run: integer_coefficients,
    },
];

const POINTS: usize = 50;
const MAX: u32 = 10;

fn index_swap(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..POINTS {
        let q = random_q(rng, 2.0);
        for m in 0..=MAX {
            for n in 0..=MAX {
                let (e, r) = rel_err(hermite_explicit(m, n, q).conj(), hermite_explicit(n, m, q));
                t.record(e, r);
                let (e, r) = rel_err(hermite(m, n, q).conj(), hermite(n, m, q));
                t.record(e, r);
            }
        }
    }
    Ok(t)
}

fn explicit_vs_hypergeometric(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    let mut done = 0;
    while done < POINTS {
        let q = random_q(rng, 2.0);
        if q.norm() < 1e-3 {
            continue;
        }
        for m in 0..=MAX {
            for n in 0..=MAX {
                let (e, r) = rel_err(hermite_explicit(m, n, q), hermite_hypergeometric(m as i32, n, q)?);
                t.record(e, r);
            }
        }
        done += 1;
    }
    Ok(t)
}

fn slice_complex(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..POINTS {
        let u = random_unit(rng);
        let q = Quaternion::real(rng.random_range(-2.0..2.0)) + u * rng.random_range(-2.0..2.0);
        // the recurrence table works on the complex coordinate of q in C_u
        let table = HermiteAt::new(MAX, q);
        for m in 0..=MAX {
            for n in 0..=MAX {
                let (e, r) = rel_err(hermite_explicit(m, n, q), table.hermite(m, n));
                t.record(e, r);
            }
        }
    }
    Ok(t)
}

fn integer_coefficients(_: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for m in 0..=8 {
        for n in 0..=8 {
            let exact: i128 = hermite_coefficients_exact(m, n).iter().sum();
            let reference = Quaternion::real(exact as f64);
            for v in [hermite_explicit(m, n, Quaternion::ONE), hermite(m, n, Quaternion::ONE)] {
                let (e, r) = rel_err(v, reference);
                t.record(e, r);
            }
        }
    }
    Ok(t)
}
