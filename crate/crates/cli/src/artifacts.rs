//! Suite artifacts beyond the pass/fail reports: the spectral comparison
//! tables, Schatten diagnostics, measured printed-form discrepancies and the
//! kernel profile.

use crate::checks::spectrum::{pkc_spectra, schatten, SPECTRAL_K_MAX, SPECTRAL_N_MAX};
use crate::checks::{Context, SPECTRAL_TRUNCATION};
use crate::output::{ensure_dir, write_csv, write_json};
use crate::RunError;
use qcauchy::basis::psi_extended;
use qcauchy::bergman::{
    kernel_rk_series, kernel_rk_slice_closed, kernel_rk_slice_closed_as_printed, kernel_sk, kernel_sk_as_printed,
    kernel_sk_identity_as_printed, pkc_expansions, repkernel_kn_series, repkernel_kn_slice_closed,
    repkernel_kn_slice_closed_as_printed,
};
use qcauchy::cauchy::{
    cauchy_on_monomial, cauchy_on_monomial_as_printed, cauchy_transform_batch, kernel_closed, kernel_lr_estimate,
    kernel_series,
};
use qcauchy::spectral::{
    adjudicate_singular_value, pkc_on_psi_as_printed, pkc_on_psi_closed, psi_gram_quadrature, psi_inner_product,
    psi_inner_product_as_printed, spectral_report,
};
use qcauchy::{Quaternion, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

pub const SCHATTEN_JSON: &str = "schatten_diagnostics.json";
pub const DISCREPANCIES_JSON: &str = "discrepancies.json";
pub const KERNEL_PROFILE_JSON: &str = "kernel_profile.json";

pub fn spectral_report_name(k: u32, ext: &str) -> String {
    format!("spectral_report_k{k}.{ext}")
}

fn numeric(path: &Path, e: qcauchy::Error) -> RunError {
    RunError::Output {
        path: path.to_path_buf(),
        message: format!("numerical error: {e}"),
    }
}

/// Spectral reports for `k <= 2`, `n <= 6`, the Schatten diagnostics and the
/// discrepancy table.
pub fn write_spectral(ctx: &Context, dir: &Path) -> std::result::Result<Vec<PathBuf>, RunError> {
    ensure_dir(dir)?;
    let mut files = Vec::new();
    let matrix = ctx
        .cauchy_matrix()
        .map_err(|e| numeric(dir, e))?
        .truncate(SPECTRAL_TRUNCATION);
    for k in 0..=SPECTRAL_K_MAX {
        let json = dir.join(spectral_report_name(k, "json"));
        let report = spectral_report(k, SPECTRAL_N_MAX, &matrix, &crate::checks::spectrum::SCHATTEN_EXPONENTS)
            .map_err(|e| numeric(&json, e))?;
        files.push(write_json(&json, &report)?);
        files.push(write_csv(&dir.join(spectral_report_name(k, "csv")), &report.rows)?);
    }
    let path = dir.join(SCHATTEN_JSON);
    files.push(write_json(&path, &schatten(ctx).map_err(|e| numeric(&path, e))?)?);
    let path = dir.join(DISCREPANCIES_JSON);
    files.push(write_json(&path, &discrepancies(ctx).map_err(|e| numeric(&path, e))?)?);
    Ok(files)
}

/// A printed closed form measured against an independent reference next to
/// the corrected form this library implements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub item: String,
    pub reference: String,
    /// Largest relative deviation of the printed form; `None` when it diverges.
    pub printed_rel_err: Option<f64>,
    /// The same for the implemented form; `None` when there is none.
    pub implemented_rel_err: Option<f64>,
    pub supported: String,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn rel(a: Quaternion, b: Quaternion) -> f64 {
    (a - b).norm() / b.norm()
}

fn verdict(printed: f64, implemented: f64) -> String {
    if !(printed.is_finite() && printed <= 1e-6) && implemented <= 1e-6 {
        "implemented".into()
    } else if printed <= 1e-6 && implemented <= 1e-6 {
        "both".into()
    } else if printed <= 1e-6 {
        "printed".into()
    } else {
        "neither".into()
    }
}

fn entry(item: &str, reference: &str, printed: f64, implemented: f64) -> Discrepancy {
    Discrepancy {
        item: item.into(),
        reference: reference.into(),
        printed_rel_err: finite(printed),
        implemented_rel_err: finite(implemented),
        supported: verdict(printed, implemented),
    }
}

/// Sample pairs on a common slice, fixed so the table is reproducible.
fn slice_pairs() -> Vec<(Quaternion, Quaternion)> {
    let u = Quaternion::new(0.0, 0.48, 0.6, 0.64);
    [(0.3, 0.9, -0.7, 0.4), (1.1, -0.2, 0.5, 1.3), (-0.6, -0.8, 0.9, 0.2)]
        .iter()
        .map(|&(a, b, c, d)| (Quaternion::real(a) + u * b, Quaternion::real(c) + u * d))
        .collect()
}

fn general_pairs() -> Vec<(Quaternion, Quaternion)> {
    vec![
        (
            Quaternion::new(0.3, 0.5, -0.2, 0.4),
            Quaternion::new(-0.4, 0.1, 0.7, 0.3),
        ),
        (
            Quaternion::new(1.0, -0.3, 0.2, 0.6),
            Quaternion::new(0.2, 0.9, -0.5, 0.1),
        ),
    ]
}

pub fn discrepancies(ctx: &Context) -> Result<Vec<Discrepancy>> {
    let (spec, trunc, area) = (ctx.spec(), ctx.trunc(), ctx.area());
    let mut out = Vec::new();

    let q = Quaternion::new(0.4, -0.3, 0.8, 0.1);
    let mono = [(1u32, 0u32), (2, 1), (0, 2), (3, 1)];
    let f = |p: Quaternion, o: &mut [Quaternion]| {
        for (v, &(m, n)) in o.iter_mut().zip(&mono) {
            *v = p.powi(m) * p.conj().powi(n);
        }
    };
    let quad = cauchy_transform_batch(&f, mono.len(), q, spec)?;
    let (mut printed, mut implemented) = (0.0f64, 0.0f64);
    for (&(m, n), &v) in mono.iter().zip(&quad) {
        printed = printed.max(rel(cauchy_on_monomial_as_printed(m, n, q, area), v));
        implemented = implemented.max(rel(cauchy_on_monomial(m, n, q, area), v));
    }
    out.push(entry(
        "monomial_transform_sign",
        "quadrature of C e_{m,n}",
        printed,
        implemented,
    ));

    let (mut printed, mut implemented) = (0.0f64, 0.0f64);
    for (q, p) in slice_pairs() {
        for n in 0..=3 {
            let s = repkernel_kn_series(n, q, p, trunc)?.value;
            printed = printed.max(rel(repkernel_kn_slice_closed_as_printed(n, q, p)?, s));
            implemented = implemented.max(rel(repkernel_kn_slice_closed(n, q, p)?, s));
        }
    }
    out.push(entry(
        "kn_closed_form_exponent",
        "series of K_n on one slice",
        printed,
        implemented,
    ));

    let (mut printed, mut implemented) = (0.0f64, 0.0f64);
    for (q, p) in slice_pairs() {
        for k in 1..=3 {
            let s = kernel_rk_series(k, q, p, trunc)?.value;
            printed = printed.max(rel(kernel_rk_slice_closed_as_printed(k, q, p)?, s));
            implemented = implemented.max(rel(kernel_rk_slice_closed(k, q, p)?, s));
        }
    }
    out.push(entry(
        "rk_closed_form_index_order",
        "series of R_k on one slice",
        printed,
        implemented,
    ));

    let (mut series_printed, mut identity_printed) = (0.0f64, 0.0f64);
    for (p, q) in general_pairs() {
        for k in 1..=3 {
            let s = kernel_sk(k, p, q, area, trunc)?.value;
            series_printed = series_printed.max(rel(kernel_sk_as_printed(k, p, q, trunc)?, s));
            identity_printed = identity_printed.max(rel(kernel_sk_identity_as_printed(k, p, q, trunc)?, s));
        }
    }
    out.push(entry(
        "sk_series_pairing",
        "S_k from the adjoint of P_k C",
        series_printed,
        0.0,
    ));
    out.push(entry(
        "sk_kn_identity_arguments",
        "S_k from the adjoint of P_k C",
        identity_printed,
        0.0,
    ));

    // same angular frequency n - m + 1 within each pair, so no reference vanishes
    let quads = [(1u32, 2u32, 0u32, 1u32), (2, 3, 1, 2), (0, 1, 1, 2), (3, 2, 2, 1)];
    let mut idx: Vec<(u32, u32)> = Vec::new();
    for &(n, m, k, j) in &quads {
        for x in [(n, m), (k, j)] {
            if !idx.contains(&x) {
                idx.push(x);
            }
        }
    }
    let gram = psi_gram_quadrature(&idx, spec)?;
    let (mut printed, mut implemented) = (0.0f64, 0.0f64);
    for &(n, m, k, j) in &quads {
        let r = idx.iter().position(|&x| x == (n, m)).expect("collected");
        let c = idx.iter().position(|&x| x == (k, j)).expect("collected");
        let v = gram[r][c].w / area;
        let lit = psi_inner_product_as_printed(n, m, k, j).unwrap_or(f64::INFINITY);
        printed = printed.max((lit - v).abs() / v.abs());
        implemented = implemented.max((psi_inner_product(n, m, k, j)? - v).abs() / v.abs());
    }
    out.push(entry(
        "psi_inner_product_power",
        "quadrature of <psi_{n,m}, psi_{k,j}>",
        printed,
        implemented,
    ));

    let spectra = pkc_spectra(ctx.cauchy_matrix()?, SPECTRAL_TRUNCATION)?;
    let a = adjudicate_singular_value(0, 1, &spectra, 1e-4)?;
    let nearest = |v: f64| {
        spectra
            .iter()
            .flat_map(|(_, s)| s.iter())
            .map(|x| (x - v).abs() / v)
            .fold(f64::INFINITY, f64::min)
    };
    out.push(Discrepancy {
        item: "singular_value_literal_power".into(),
        reference: "SVD of the truncated P_k C, k <= 2".into(),
        printed_rel_err: finite(nearest(a.literal)),
        implemented_rel_err: finite(nearest(a.sqrt_lambda)),
        supported: a.supported.clone(),
    });

    let (mut printed, mut implemented) = (0.0f64, 0.0f64);
    let truncated = ctx.cauchy_matrix()?.truncate(SPECTRAL_TRUNCATION);
    for k in 0..=SPECTRAL_K_MAX {
        let report = spectral_report(k, SPECTRAL_N_MAX, &truncated, &[])?;
        let mut closed: Vec<f64> = report.rows.iter().map(|r| r.s_sqrt_lambda_transposed).collect();
        closed.sort_by(|a, b| b.total_cmp(a));
        for (row, c) in report.rows.iter().zip(&closed) {
            printed = printed.max((row.s_sqrt_lambda - row.s_numeric).abs() / row.s_numeric);
            implemented = implemented.max((c - row.s_numeric).abs() / row.s_numeric);
        }
    }
    out.push(entry(
        "eigenvalue_index_order",
        "SVD of the truncated P_k C, n-th value vs sqrt(lambda) with either index order",
        printed,
        implemented,
    ));

    let k = 1;
    let psi = |p: Quaternion, o: &mut [Quaternion]| {
        for (n, v) in o.iter_mut().enumerate() {
            *v = psi_extended(n as u32, k, p);
        }
    };
    let ex = pkc_expansions(&psi, 3, k, spec, trunc)?;
    let (mut printed, mut implemented) = (0.0f64, 0.0f64);
    for (n, e) in ex.iter().enumerate() {
        let v = e.evaluate(q);
        printed = printed.max(rel(pkc_on_psi_as_printed(k, n as u32, q, area)?, v));
        implemented = implemented.max(rel(pkc_on_psi_closed(n as u32, k, q, area)?, v));
    }
    out.push(entry(
        "pkc_on_psi_sign_and_scale",
        "quadrature of P_1 C psi_{n,1}",
        printed,
        implemented,
    ));

    let est = kernel_lr_estimate(1.0, &[Quaternion::ZERO], spec)?;
    let raw = ((est.value - est.bound) / est.bound).max(0.0);
    let prob = ((est.value / PI - est.bound) / est.bound).max(0.0);
    out.push(Discrepancy {
        item: "kernel_estimate_constant".into(),
        reference: "quadrature of int |N(0,p)| dmu(p) against A pi^{1-r} Gamma(1-r/2) at r = 1 (excess over the bound)"
            .into(),
        printed_rel_err: finite(raw),
        implemented_rel_err: finite(prob),
        supported: if est.holds_probability && !est.holds_raw {
            "probability_normalized_measure"
        } else {
            "undecided"
        }
        .into(),
    });

    let top = schatten(ctx)?.top_singular_values.into_iter().fold(0.0, f64::max);
    let bound = area / PI.sqrt();
    out.push(Discrepancy {
        item: "operator_norm_bound".into(),
        reference: "largest singular value of the truncated C (excess over A / sqrt(pi))".into(),
        printed_rel_err: finite(((top - bound) / bound).max(0.0)),
        implemented_rel_err: None,
        supported: if top > bound { "bound_violated" } else { "bound_holds" }.into(),
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelProfilePoint {
    pub t: f64,
    pub closed_norm: f64,
    pub series_norm: Option<f64>,
    pub rel_err: Option<f64>,
}

/// `|N(t u, p)|` along a ray through the unit sphere of `|p| = 1`, closed
/// form against the series on both branches.
pub fn kernel_profile() -> Result<Vec<KernelProfilePoint>> {
    let u = Quaternion::new(0.5, 0.5, 0.5, 0.5);
    let p = Quaternion::new(0.6, 0.0, 0.8, 0.0);
    let mut points = Vec::new();
    for i in 1..=60 {
        let t = i as f64 * 0.05;
        let q = u * t;
        let closed = kernel_closed(q, p)?;
        let series = if (t - 1.0).abs() > 0.12 {
            Some(kernel_series(q, p, 1e-15)?.value)
        } else {
            None
        };
        points.push(KernelProfilePoint {
            t,
            closed_norm: closed.norm(),
            series_norm: series.map(|s| s.norm()),
            rel_err: series.map(|s| rel(s, closed)),
        });
    }
    Ok(points)
}

pub fn write_kernel_profile(_: &Context, dir: &Path) -> std::result::Result<Vec<PathBuf>, RunError> {
    ensure_dir(dir)?;
    let path = dir.join(KERNEL_PROFILE_JSON);
    let points = kernel_profile().map_err(|e| numeric(&path, e))?;
    Ok(vec![write_json(&path, &points)?])
}
