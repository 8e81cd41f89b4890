use num_complex::Complex64;
use qcauchy::basis::{hermite, phi_column, phi_normalized, psi_extended};
use qcauchy::bergman::{
    kernel_sk, kernel_sk_via_kn, pkc_expansions, projection_expansions, repkernel_kn_series, TruncationSpec,
};
use qcauchy::cauchy::{
    cauchy_adjoint_numeric, cauchy_adjoint_on_hermite, cauchy_dynamic_slice_transform, cauchy_on_normalized,
    cauchy_real_line_transform, cauchy_slice_transform_batch, cauchy_transform_batch, cauchy_transform_numeric,
    kernel_closed, kernel_lr_estimate, kernel_lr_integral,
};
use qcauchy::gauss::adaptive_kronrod;
use qcauchy::measure::{inner_product, integral_over_h, intrinsic_gram, HemisphereGrid};
use qcauchy::spectral::{
    build_cauchy_matrix, cauchy_matrix_entry_quadrature, pkc_on_psi_as_printed, pkc_on_psi_closed, psi_gram_quadrature,
    psi_norm_closed,
};
use qcauchy::{BasisIndex, ImaginaryUnit, QuadratureSpec, Quaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rel(a: Quaternion, b: Quaternion) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn random_q(rng: &mut ChaCha8Rng, r: f64) -> Quaternion {
    Quaternion::new(
        rng.random_range(-r..r),
        rng.random_range(-r..r),
        rng.random_range(-r..r),
        rng.random_range(-r..r),
    )
}

fn idx(m: i32, n: i32) -> BasisIndex {
    BasisIndex::new(m, n).unwrap()
}

fn small_spec() -> QuadratureSpec {
    QuadratureSpec {
        radial_order: 32,
        angular_order: 32,
        hemi_phi_order: 4,
        hemi_psi_order: 4,
        ..QuadratureSpec::default()
    }
}

#[test]
fn kernel_hand_value_and_defining_identity() {
    let want = -(Quaternion::I * 2.0 + Quaternion::J) / 3.0;
    assert!(rel(kernel_closed(Quaternion::I * 2.0, Quaternion::J).unwrap(), want) < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let (q, p) = (random_q(&mut rng, 2.0), random_q(&mut rng, 2.0));
        let den = q * q - q * (2.0 * p.w) + Quaternion::real(p.norm_sqr());
        let n = kernel_closed(q, p).unwrap();
        assert!(rel(den * n, q - p.conj()) < 1e-12);
    }
}

#[test]
fn constant_transform_scales_with_area() {
    let spec = QuadratureSpec::default().with_area(2.0);
    let v = cauchy_transform_numeric(&|_| Quaternion::ONE, Quaternion::ONE, &spec).unwrap();
    assert!(rel(v, Quaternion::real(2.0 * (1.0 - (-1.0f64).exp()))) < 1e-10, "{v}");
}

#[test]
fn phi_gram_is_identity() {
    let spec = QuadratureSpec::default();
    let indices: Vec<(u32, u32)> = (0..=6).flat_map(|m| (0..=6).map(move |n| (m, n))).collect();
    let gram = intrinsic_gram(
        &|z: Complex64, out: &mut [Complex64]| {
            for n in 0..=6u32 {
                let col = phi_column(n, 6, z);
                for m in 0..=6usize {
                    out[m * 7 + n as usize] = col[m];
                }
            }
        },
        indices.len(),
        &spec,
    )
    .unwrap();
    for (r, row) in gram.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            let want = if r == c { Quaternion::ONE } else { Quaternion::ZERO };
            assert!((*v - want).norm() < 1e-8, "{:?} {:?}: {v}", indices[r], indices[c]);
        }
    }
    // the factorized Gram agrees with the full hemisphere quadrature
    for (a, b) in [((2, 1), (2, 1)), ((3, 0), (1, 2)), ((1, 1), (4, 4))] {
        let full = inner_product(
            &|q| phi_normalized(a.0, a.1, q, 1.0),
            &|q| phi_normalized(b.0, b.1, q, 1.0),
            &spec,
        )
        .unwrap();
        let ra = indices.iter().position(|&i| i == a).unwrap();
        let rb = indices.iter().position(|&i| i == b).unwrap();
        assert!((full - gram[ra][rb]).norm() < 1e-12, "{a:?} {b:?}");
    }
}

#[test]
fn psi_anchor_norms_by_direct_integral() {
    // per slice: 2 pi int_0^inf e^{-3 r^2} r^{2s} r dr
    let direct = |s: i32| {
        2.0 * PI
            * adaptive_kronrod(|r| (-3.0 * r * r).exp() * r.powi(2 * s + 1), 0.0, 12.0, 1e-16, 1e-14)
                .unwrap()
                .value
    };
    assert!((direct(0) - PI / 3.0).abs() < 1e-13);
    assert!((direct(1) - PI / 9.0).abs() < 1e-13);
    assert!((psi_norm_closed(0, 1).unwrap() - direct(0)).abs() < 1e-13);
    assert!((psi_norm_closed(0, 2).unwrap() - direct(1)).abs() < 1e-13);
    let g = psi_gram_quadrature(&[(0, 1), (0, 2), (0, 0)], &QuadratureSpec::default()).unwrap();
    assert!((g[0][0].w - PI / 3.0).abs() < 1e-12);
    assert!((g[1][1].w - PI / 9.0).abs() < 1e-12);
    assert!((g[2][2].w - PI * (4.0f64 / 3.0).ln()).abs() < 1e-10);
}

#[test]
fn psi_gram_matches_pointwise_quadrature() {
    let spec = small_spec();
    let g = psi_gram_quadrature(&[(1, 2), (0, 0)], &spec).unwrap();
    let full = integral_over_h(&|p| psi_extended(1, 2, p).conj() * psi_extended(0, 0, p), &spec).unwrap();
    assert!((full - g[0][1]).norm() < 1e-12);
    let full = integral_over_h(&|p| psi_extended(0, 0, p).conj() * psi_extended(0, 0, p), &spec).unwrap();
    assert!((full - g[1][1]).norm() < 1e-12);
}

#[test]
fn transform_matches_closed_form_on_basis() {
    let spec = QuadratureSpec::default();
    let pairs: Vec<(u32, u32)> = (0..=5u32).flat_map(|s| (0..=s).map(move |m| (m, s - m))).collect();
    let f = |p: Quaternion, out: &mut [Quaternion]| {
        for (o, &(m, n)) in out.iter_mut().zip(&pairs) {
            *o = phi_normalized(m, n, p, 1.0);
        }
    };
    for q in [
        Quaternion::new(0.4, -0.3, 0.8, 0.1),
        Quaternion::new(-1.1, 0.2, 0.0, -0.6),
    ] {
        let num = cauchy_transform_batch(&f, pairs.len(), q, &spec).unwrap();
        for (v, &(m, n)) in num.iter().zip(&pairs) {
            let want = cauchy_on_normalized(idx(m as i32, n as i32), q, 1.0).unwrap();
            assert!(
                (*v - want).norm() <= 1e-6 * want.norm().max(1e-3),
                "({m},{n}) at {q}: {v} vs {want}"
            );
        }
    }
}

#[test]
fn hemisphere_average_of_slice_transforms() {
    let spec = small_spec();
    let q = Quaternion::new(0.3, 0.5, -0.2, 0.4);
    let f = |p: Quaternion, out: &mut [Quaternion]| out[0] = hermite(2, 1, p) + Quaternion::K * p.w;
    let whole = cauchy_transform_batch(&f, 1, q, &spec).unwrap()[0];
    let hemi = HemisphereGrid::new(&spec);
    let mut avg = Quaternion::ZERO;
    for (&u, &w) in hemi.units.iter().zip(&hemi.weights) {
        avg += cauchy_slice_transform_batch(&f, 1, q, u, &spec).unwrap()[0] * w;
    }
    assert!(rel(avg, whole) < 1e-13);
}

#[test]
fn dynamic_slice_on_real_point_is_real_line_transform() {
    let spec = QuadratureSpec::default();
    let f = |p: Quaternion| p * p + Quaternion::J;
    let a = cauchy_dynamic_slice_transform(&f, Quaternion::real(0.4), &spec).unwrap();
    let b = cauchy_real_line_transform(&f, 0.4, &spec).unwrap();
    assert_eq!(a, b);
}

#[test]
fn right_linearity() {
    let spec = small_spec();
    let q = Quaternion::new(0.2, -0.7, 0.1, 0.3);
    let (a, b) = (
        Quaternion::new(0.5, -1.0, 2.0, 0.3),
        Quaternion::new(-0.2, 0.1, 0.0, 1.5),
    );
    let f = |p: Quaternion| hermite(1, 2, p);
    let g = |p: Quaternion| hermite(3, 0, p) + Quaternion::I;
    let parts = |p: Quaternion, out: &mut [Quaternion]| {
        out[0] = f(p);
        out[1] = g(p);
        out[2] = f(p) * a + g(p) * b;
    };
    let v = cauchy_transform_batch(&parts, 3, q, &spec).unwrap();
    assert!(rel(v[2], v[0] * a + v[1] * b) < 1e-8);
}

#[test]
fn real_line_pv_matches_symmetric_integral() {
    let spec = QuadratureSpec::default();
    let f = |p: Quaternion| Quaternion::ONE + p * 0.5 + Quaternion::J * p.w * p.w;
    for x in [-1.3, 0.0, 0.45, 2.2] {
        let got = cauchy_real_line_transform(&f, x, &spec).unwrap();
        // (1/pi) int_0^inf [g(x+u) - g(x-u)] / u du with g(t) = f(t) e^{-t^2}
        let g = |t: f64| f(Quaternion::real(t)) * (-t * t).exp();
        let comp = |c: fn(Quaternion) -> f64| {
            adaptive_kronrod(
                |u| if u == 0.0 { 0.0 } else { c(g(x + u) - g(x - u)) / u },
                0.0,
                12.0 + x.abs(),
                1e-15,
                1e-13,
            )
            .unwrap()
            .value
                / PI
        };
        let want = Quaternion::new(comp(|q| q.w), comp(|q| q.x), comp(|q| q.y), comp(|q| q.z));
        assert!((got - want).norm() < 1e-12, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn adjoint_pairing() {
    let spec = QuadratureSpec::default();
    for ((m, n), (j, k)) in [((1, 0), (0, 0)), ((2, 1), (0, 0)), ((3, 2), (1, 1)), ((0, 2), (0, 3))] {
        let lhs = inner_product(
            &|q| cauchy_on_normalized(idx(m, n), q, 1.0).unwrap(),
            &|q| hermite(j, k, q),
            &spec,
        )
        .unwrap();
        let rhs = inner_product(
            &|q| phi_normalized(m as u32, n as u32, q, 1.0),
            &|q| cauchy_adjoint_on_hermite(idx(j as i32, k as i32), q, 1.0).unwrap(),
            &spec,
        )
        .unwrap();
        assert!((lhs - rhs).norm() < 1e-10, "({m},{n}) ({j},{k}): {lhs} vs {rhs}");
    }
    let p = Quaternion::new(0.3, 0.2, -0.5, 0.1);
    let num = cauchy_adjoint_numeric(&|q| hermite(2, 1, q), p, &small_spec()).unwrap();
    let closed = cauchy_adjoint_on_hermite(idx(2, 1), p, 1.0).unwrap();
    assert!(rel(num, closed) < 1e-8, "{num} vs {closed}");
}

#[test]
fn lr_integral_at_origin_and_bound_flags() {
    let spec = QuadratureSpec::default();
    for r in [0.0, 0.5, 1.0, 1.5] {
        let v = kernel_lr_integral(r, Quaternion::ZERO, &spec).unwrap();
        let want = PI * statrs::function::gamma::gamma(1.0 - r / 2.0);
        assert!((v - want).abs() < 1e-9 * want, "r = {r}: {v} vs {want}");
    }
    let est = kernel_lr_estimate(0.0, &[Quaternion::ZERO], &spec).unwrap();
    assert!(est.holds_raw);
    let est = kernel_lr_estimate(0.5, &[Quaternion::ZERO], &spec).unwrap();
    assert!(!est.holds_raw && est.holds_probability);
}

#[test]
fn pkc_on_psi_matches_quadrature() {
    let spec = QuadratureSpec::default();
    let trunc = TruncationSpec::default();
    let q = Quaternion::new(0.5, -0.2, 0.3, 0.6);
    for k in 1..=2u32 {
        let f = |p: Quaternion, out: &mut [Quaternion]| {
            for (n, o) in out.iter_mut().enumerate() {
                *o = psi_extended(n as u32, k, p);
            }
        };
        let ex = pkc_expansions(&f, 3, k, &spec, &trunc).unwrap();
        for (n, e) in ex.iter().enumerate() {
            let want = pkc_on_psi_closed(n as u32, k, q, 1.0).unwrap();
            assert!(rel(e.evaluate(q), want) < 1e-10, "k = {k}, n = {n}");
            let printed = pkc_on_psi_as_printed(k, n as u32, q, 1.0).unwrap();
            assert!(rel(printed, -want) < 1e-14);
        }
    }
}

#[test]
fn sk_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trunc = TruncationSpec::default();
    for _ in 0..20 {
        let (p, q) = (random_q(&mut rng, 1.5), random_q(&mut rng, 1.5));
        for k in 1..=4 {
            let a = kernel_sk(k, p, q, 1.0, &trunc).unwrap().value;
            let b = kernel_sk_via_kn(k, p, q, 1.0, &trunc).unwrap();
            assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-12), "k = {k}");
        }
    }
}

#[test]
fn range_containment_and_projection_orthogonality() {
    let spec = QuadratureSpec::default();
    let trunc = TruncationSpec {
        max_m: 30,
        ..TruncationSpec::default()
    };
    let a = Quaternion::new(0.3, -1.0, 0.5, 0.2);
    let f = |p: Quaternion, out: &mut [Quaternion]| {
        out[0] = hermite(2, 1, p) * a + hermite(0, 3, p) + phi_normalized(1, 1, p, 1.0) * Quaternion::K;
    };
    let pkc = pkc_expansions(&f, 1, 1, &spec, &trunc).unwrap().remove(0);
    let image = |p: Quaternion, out: &mut [Quaternion]| out[0] = pkc.evaluate(p);
    for n in 0..=3u32 {
        let proj = projection_expansions(&image, 1, n, &spec, &trunc).unwrap().remove(0);
        for (m, c) in proj.coefficients.iter().enumerate() {
            let want = if n == 1 { pkc.coefficients[m] } else { Quaternion::ZERO };
            assert!((*c - want).norm() < 1e-6, "n = {n}, m = {m}: {c}");
        }
    }
    // <P_n f, g - P_n g> = 0
    let g = |p: Quaternion| hermite(1, 2, p) * Quaternion::J + hermite(3, 1, p);
    let both = |p: Quaternion, out: &mut [Quaternion]| {
        let mut tmp = [Quaternion::ZERO];
        f(p, &mut tmp);
        out[0] = tmp[0];
        out[1] = g(p);
    };
    let proj = projection_expansions(&both, 2, 1, &spec, &trunc).unwrap();
    let v = inner_product(&|p| proj[0].evaluate(p), &|p| g(p) - proj[1].evaluate(p), &spec).unwrap();
    assert!(v.norm() < 1e-6, "{v}");
}

#[test]
fn reproducing_kernel() {
    let spec = small_spec();
    let trunc = TruncationSpec::default();
    let q = Quaternion::new(0.4, 0.1, -0.6, 0.2);
    let c = Quaternion::new(1.0, 0.5, -0.3, 0.2);
    for n in 0..=2u32 {
        let f = |p: Quaternion| phi_normalized(3, n, p, 1.0) * c + phi_normalized(6, n, p, 1.0);
        let v = integral_over_h(&|p| repkernel_kn_series(n, q, p, &trunc).unwrap().value * f(p), &spec).unwrap();
        assert!((v - f(q)).norm() < 1e-7, "n = {n}: {v} vs {}", f(q));
    }
}

#[test]
fn matrix_entries_match_quadrature() {
    let spec = QuadratureSpec::default();
    let c = build_cauchy_matrix(5, 5, &spec).unwrap();
    for (row, col) in [
        ((0, 0), (1, 0)),
        ((2, 1), (4, 2)),
        ((0, 2), (0, 1)),
        ((2, 5), (0, 2)),
        ((1, 4), (0, 2)),
    ] {
        let (row, col) = (idx(row.0, row.1), idx(col.0, col.1));
        let r = c.row_indices.iter().position(|&i| i == row).unwrap();
        let k = c.col_indices.iter().position(|&i| i == col).unwrap();
        let q = cauchy_matrix_entry_quadrature(row, col, &spec).unwrap();
        assert!(q.vector().norm() < 1e-10);
        assert!((q.w - c.entries[(r, k)]).abs() < 1e-9, "{row:?} {col:?}");
    }
    assert!((c.entries[(0, 6)] + 0.5).abs() < 1e-14);
}

#[test]
fn norm_of_image_of_first_basis_function() {
    // ||C phi_{1,0}|| = A ||e^{-|q|^2} phi_{0,0}|| = A / sqrt 3
    let spec = QuadratureSpec::default().with_area(1.5);
    let v = inner_product(
        &|q| cauchy_on_normalized(idx(1, 0), q, 1.5).unwrap(),
        &|q| cauchy_on_normalized(idx(1, 0), q, 1.5).unwrap(),
        &spec,
    )
    .unwrap();
    assert!((v.w.sqrt() - 1.5 / 3f64.sqrt()).abs() < 1e-12);
    let unit = ImaginaryUnit::new(1.1, 0.4);
    assert!(unit.to_quaternion().norm() > 0.0);
}
