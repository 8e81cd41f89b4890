use num_complex::Complex64;
use proptest::prelude::*;
use qcauchy::basis::{hermite, hermite_coefficients_exact, hermite_explicit, hermite_hypergeometric, HermiteTable};
use qcauchy::bergman::{kernel_rk_series, repkernel_kn_series, repkernel_kn_slice_closed, TruncationSpec};
use qcauchy::cauchy::{kernel_closed, kernel_series};
use qcauchy::gauss::adaptive_kronrod;
use qcauchy::measure::{integral_over_h, monte_carlo_integral, slice_integral};
use qcauchy::specfun::{factorial, incomplete_gamma_psi, kummer_1f1, laguerre};
use qcauchy::spectral::{lambda_eigenvalue, psi_inner_product};
use qcauchy::{ImaginaryUnit, QuadratureSpec, Quaternion};

fn quat(r: f64) -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-r..r).prop_map(|a| Quaternion::new(a[0], a[1], a[2], a[3]))
}

fn unit() -> impl Strategy<Value = Quaternion> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU).prop_map(|(a, b)| ImaginaryUnit::new(a, b).to_quaternion())
}

fn rel(a: Quaternion, b: Quaternion) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn on_slice(x: f64, y: f64, u: Quaternion) -> Quaternion {
    Quaternion::new(x, y * u.x, y * u.y, y * u.z)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mul_associative_and_distributive(a in quat(3.0), b in quat(3.0), c in quat(3.0)) {
        let scale = a.norm() * b.norm() * c.norm() + 1e-300;
        prop_assert!(((a * b) * c - a * (b * c)).norm() <= 1e-13 * scale);
        let scale = a.norm() * (b.norm() + c.norm()) + 1e-300;
        prop_assert!((a * (b + c) - (a * b + a * c)).norm() <= 1e-13 * scale);
    }

    #[test]
    fn norm_multiplicative_and_conj_reverses(a in quat(3.0), b in quat(3.0)) {
        prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() <= 1e-13 * (a.norm() * b.norm() + 1e-300));
        prop_assert!(((a * b).conj() - b.conj() * a.conj()).norm() <= 1e-13 * (a.norm() * b.norm() + 1e-300));
    }

    #[test]
    fn same_slice_commutes(u in unit(), x1 in -3.0..3.0f64, y1 in -3.0..3.0f64, x2 in -3.0..3.0f64, y2 in -3.0..3.0f64) {
        let (a, b) = (on_slice(x1, y1, u), on_slice(x2, y2, u));
        prop_assert!((a * b - b * a).norm() <= 1e-13 * (a.norm() * b.norm() + 1e-300));
    }

    #[test]
    fn kummer_contiguous_relation(a in 1.0..6.0f64, c in 0.5..8.0f64, x in 0.0..10.0f64) {
        let f = |aa: f64| kummer_1f1(aa, c, x).unwrap();
        let terms = [(c - a) * f(a - 1.0), (2.0 * a - c + x) * f(a), -a * f(a + 1.0)];
        let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
        prop_assert!(terms.iter().sum::<f64>().abs() <= 1e-10 * scale);
    }

    #[test]
    fn lower_plus_upper_gamma(n in 0u32..20, x in 0.01..40.0f64) {
        let upper = adaptive_kronrod(|t| t.powi(n as i32) * (-t).exp(), x, x + 200.0, 0.0, 1e-14).unwrap().value;
        let total = incomplete_gamma_psi(n, x).unwrap() + upper;
        prop_assert!((total - factorial(n)).abs() <= 1e-10 * factorial(n));
    }

    #[test]
    fn hermite_index_swap_is_conjugation(q in quat(2.0), m in 0u32..12, n in 0u32..12) {
        let a = hermite(m, n, q).conj();
        let b = hermite(n, m, q);
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
    }

    #[test]
    fn explicit_matches_hypergeometric(q in quat(2.0), m in 0u32..11, n in 0u32..11) {
        prop_assume!(q.norm() > 1e-3);
        let a = hermite_explicit(m, n, q);
        let b = hermite_hypergeometric(m as i32, n, q).unwrap();
        prop_assert!((a - b).norm() <= 1e-11 * (1.0 + b.norm()), "{a} vs {b}");
    }

    #[test]
    fn slice_value_matches_complex_evaluation(u in unit(), x in -2.0..2.0f64, y in -2.0..2.0f64, m in 0u32..10, n in 0u32..10) {
        // independent complex arithmetic: sum_l (-1)^l l! C(m,l) C(n,l) z^{m-l} conj(z)^{n-l}
        let z = Complex64::new(x, y);
        let mut want = Complex64::new(0.0, 0.0);
        let mut c = 1.0;
        for l in 0..=m.min(n) {
            want += z.powu(m - l) * z.conj().powu(n - l) * c;
            c *= -((m - l) as f64) * ((n - l) as f64) / (l as f64 + 1.0);
        }
        let got = hermite(m, n, on_slice(x, y, u));
        let lifted = on_slice(want.re, want.im, u);
        prop_assert!((got - lifted).norm() <= 1e-11 * (1.0 + lifted.norm()));
        let t = HermiteTable::new(m.max(n), z).get(m, n);
        prop_assert!((t - want).norm() <= 1e-11 * (1.0 + want.norm()));
    }

    #[test]
    fn kernel_series_matches_closed(q in quat(2.0), p in quat(2.0)) {
        let (a, b) = (q.norm(), p.norm());
        prop_assume!((a - b).abs() > 0.05 * a.max(b));
        let closed = kernel_closed(q, p).unwrap();
        let series = kernel_series(q, p, 1e-16).unwrap();
        prop_assert!(rel(series.value, closed) <= 1e-10);
    }

    #[test]
    fn kernel_slice_reduction(q in quat(2.0), x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let (_, yq, iq) = q.slice_parts();
        prop_assume!(yq > 1e-3);
        let p = on_slice(x, y, iq);
        prop_assume!((q - p).norm() > 1e-3);
        let want = (q - p).inverse().unwrap();
        prop_assert!(rel(kernel_closed(q, p).unwrap(), want) <= 1e-13);
    }

    #[test]
    fn kernel_conjugation_symmetry(q in quat(2.0), p in quat(2.0)) {
        prop_assume!((q - p).norm() > 1e-2 && (q - p.conj()).norm() > 1e-2);
        let a = kernel_closed(q, p).unwrap().conj();
        let b = -kernel_closed(p.conj(), q.conj()).unwrap();
        prop_assert!(rel(a, b) <= 1e-12);
    }

    #[test]
    fn kn_series_matches_slice_closed(u in unit(), n in 0u32..5, x1 in -1.5..1.5f64, y1 in -1.5..1.5f64, x2 in -1.5..1.5f64, y2 in -1.5..1.5f64) {
        let (q, p) = (on_slice(x1, y1, u), on_slice(x2, y2, u));
        let s = repkernel_kn_series(n, q, p, &TruncationSpec::default()).unwrap();
        let c = repkernel_kn_slice_closed(n, q, p).unwrap();
        prop_assert!((s.value - c).norm() <= 1e-10 * (1.0 + c.norm()));
    }

    #[test]
    fn psi_inner_product_hermitian(n in 0u32..6, m in 1u32..6, k in 0u32..6, j in 1u32..6) {
        let a = psi_inner_product(n, m, k, j).unwrap();
        let b = psi_inner_product(k, j, n, m).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * (1.0 + a.abs()));
        if m as i64 - j as i64 != n as i64 - k as i64 {
            prop_assert_eq!(a, 0.0);
        }
    }
}

#[test]
fn laguerre_root_count() {
    for n in 1..=8u32 {
        let hi = 4.0 * n as f64 + 2.0;
        let steps = 20_000;
        let mut changes = 0;
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
        assert_eq!(changes, n, "L_{n}");
    }
}

#[test]
fn exact_coefficients_sum_to_value_at_one() {
    for m in 0..=8 {
        for n in 0..=8 {
            let exact: i128 = hermite_coefficients_exact(m, n).iter().sum();
            let v = hermite(m, n, Quaternion::ONE);
            assert_eq!(v.vector().norm(), 0.0);
            assert!(
                (v.w - exact as f64).abs() <= 1e-12 * (1.0 + (exact as f64).abs()),
                "({m},{n})"
            );
        }
    }
}

#[test]
fn monomial_quadrature_exactness() {
    // int e_{m,n} dmu_I = pi n! delta_{mn}
    let spec = QuadratureSpec::default();
    let u = ImaginaryUnit::new(0.7, 1.9);
    for m in 0..8u32 {
        for n in 0..8u32 {
            let v = slice_integral(&|q: Quaternion| q.powi(m) * q.conj().powi(n), u, &spec).unwrap();
            let want = if m == n {
                std::f64::consts::PI * factorial(n)
            } else {
                0.0
            };
            assert!(
                (v - Quaternion::real(want)).norm() <= 1e-12 * want.max(1.0),
                "({m},{n}): {v}"
            );
        }
    }
}

#[test]
fn hemisphere_average_of_slice_independent_integrand() {
    let spec = QuadratureSpec::default().with_area(2.5);
    for (m, n) in [(0, 0), (2, 1), (3, 3)] {
        let f = |q: Quaternion| {
            let h = hermite(m, n, q);
            h.conj() * h * (-q.norm_sqr()).exp()
        };
        let full = integral_over_h(&f, &spec).unwrap();
        let slice = slice_integral(&f, ImaginaryUnit::CANONICAL, &spec).unwrap();
        assert!(rel(full, slice * 2.5) <= 1e-12, "({m},{n})");
    }
}

#[test]
fn monte_carlo_agrees_with_quadrature() {
    let spec = QuadratureSpec::default();
    let corpus: Vec<Box<dyn Fn(Quaternion) -> Quaternion + Sync>> = vec![
        Box::new(|q: Quaternion| Quaternion::real(q.norm_sqr())),
        Box::new(|q: Quaternion| q * q.conj() * q.w + Quaternion::I * q.x * q.x),
        Box::new(|q: Quaternion| Quaternion::real((-q.norm_sqr()).exp()) + q.vector() * 0.5),
        Box::new(|q: Quaternion| hermite(2, 1, q) * hermite(1, 2, q)),
    ];
    for (i, f) in corpus.iter().enumerate() {
        let det = integral_over_h(f, &spec).unwrap();
        let (mc, se) = monte_carlo_integral(f, 200_000, 17 + i as u64, 1.0).unwrap();
        assert!(
            (mc - det).norm() <= 4.0 * se + 1e-12,
            "corpus {i}: {mc} vs {det} (se {se})"
        );
    }
}

#[test]
fn series_tail_bound_covers_truncation_change() {
    let q = Quaternion::new(0.8, 0.3, -0.5, 0.2);
    let p = Quaternion::new(-0.4, 0.6, 0.1, 0.9);
    for k in [1u32, 3] {
        let short = TruncationSpec {
            max_m: 20,
            tail_tolerance: 1.0,
        };
        let long = TruncationSpec {
            max_m: 40,
            tail_tolerance: 1.0,
        };
        let a = kernel_rk_series(k, q, p, &short).unwrap();
        let b = kernel_rk_series(k, q, p, &long).unwrap();
        assert!((a.value - b.value).norm() <= a.tail_bound, "k = {k}");
    }
    for n in [0u32, 2] {
        let short = TruncationSpec {
            max_m: 12,
            tail_tolerance: 1.0,
        };
        let long = TruncationSpec {
            max_m: 24,
            tail_tolerance: 1.0,
        };
        let a = repkernel_kn_series(n, q, p, &short).unwrap();
        let b = repkernel_kn_series(n, q, p, &long).unwrap();
        assert!((a.value - b.value).norm() <= a.tail_bound, "n = {n}");
    }
}

#[test]
fn eigenvalue_ratio_tends_to_one_third() {
    for k in 0..3 {
        let mut last_gap = f64::INFINITY;
        for n in [10u32, 20, 40, 80] {
            let r = lambda_eigenvalue(k, n + 1).unwrap() / lambda_eigenvalue(k, n).unwrap();
            let gap = (r - 1.0 / 3.0).abs();
            assert!(gap < last_gap, "k = {k}, n = {n}: {r}");
            last_gap = gap;
        }
        assert!(last_gap < 5e-3, "k = {k}: {last_gap}");
    }
    for k in 0..6 {
        for n in 0..30 {
            assert!(lambda_eigenvalue(k, n).unwrap() > 0.0);
        }
    }
}
