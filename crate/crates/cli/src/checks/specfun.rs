use super::{Check, Context};
use crate::config::Suite;
use qcauchy::gauss::adaptive_kronrod;
use qcauchy::report::{ErrorTally, Metric};
use qcauchy::specfun::{factorial, incomplete_gamma_psi, kummer_1f1, laguerre};
use qcauchy::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub(super) const CHECKS: &[Check] = &[
    Check {
        name: "kummer_contiguous_relation",
        suite: Suite::Specfun,
        anchor: "(c-a) 1F1(a-1;c;x) + (2a-c+x) 1F1(a;c;x) - a 1F1(a+1;c;x) = 0",
        tolerance: 1e-10,
        metric: Metric::Relative,
        run: kummer_contiguous,
    },
    Check {
        name: "incomplete_gamma_complement",
        suite: Suite::Specfun,
        anchor: "psi_n(x) + int_x^inf t^n e^{-t} dt = n!",
        tolerance: 1e-10,
        metric: Metric::Relative,
        run: gamma_complement,
    },
    Check {
        name: "laguerre_root_count",
        suite: Suite::Specfun,
        anchor: "L_n has exactly n sign changes on (0, 4n+2)",
        tolerance: 0.0,
        metric: Metric::Absolute,
        run: laguerre_roots,
    },
];

const SAMPLES: usize = 200;

fn kummer_contiguous(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..SAMPLES {
        let a = rng.random_range(1.0..6.0);
        let c = rng.random_range(0.5..8.0);
        let x = rng.random_range(0.0..10.0);
        let terms = [
            (c - a) * kummer_1f1(a - 1.0, c, x)?,
            (2.0 * a - c + x) * kummer_1f1(a, c, x)?,
            -a * kummer_1f1(a + 1.0, c, x)?,
        ];
        let scale: f64 = terms.iter().map(|v| v.abs()).sum();
        t.record(terms.iter().sum::<f64>().abs(), scale);
    }
    Ok(t)
}

fn gamma_complement(_: &Context, rng: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for _ in 0..SAMPLES {
        let n = rng.random_range(0..20u32);
        let x: f64 = rng.random_range(0.01..40.0);
        let nf = n as f64;
        let upper = adaptive_kronrod(|s| (nf * s.ln() - s).exp(), x, x.max(nf) + 80.0, 0.0, 1e-14)?.value;
        t.record_real(incomplete_gamma_psi(n, x)? + upper, factorial(n));
    }
    Ok(t)
}

fn laguerre_roots(_: &Context, _: &mut ChaCha8Rng) -> Result<ErrorTally> {
    let mut t = ErrorTally::new();
    for n in 1..=8u32 {
        let hi = 4.0 * n as f64 + 2.0;
        let steps = 20_000;
        let mut changes = 0u32;
        let mut prev = laguerre(n, 1e-9);
        for i in 1..=steps {
            let v = laguerre(n, hi * i as f64 / steps as f64);
            if v * prev < 0.0 {
                changes += 1;
            }
            if v != 0.0 {
                prev = v;
            }
        }
        t.record(changes.abs_diff(n) as f64, 0.0);
    }
    Ok(t)
}
