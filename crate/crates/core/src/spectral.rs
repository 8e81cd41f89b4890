//! Spectral data of the transform: inner products and norms of the Hermite
//! functions `psi_{n,m}`, the eigenvalues of `|P_k C|^2`, closed and
//! asymptotic singular values, Galerkin truncations with their SVD, Schatten
//! partial sums and the orthogonality of the range decomposition.
//!
//! Inner products and norms of `psi` are per unit hemisphere area (the value on
//! a single slice); the integral over `H` is `A` times that.

use crate::basis::{hermite, hermite_profile, phi_normalized, phi_profile, BasisIndex, HermiteTable};
use crate::cauchy::cauchy_on_normalized;
use crate::error::{Error, Result};
use crate::gauss::{adaptive_kronrod, laguerre_rule};
use crate::measure::{inner_product, intrinsic_gram, radial_integral_exact, QuadratureSpec};
use crate::quaternion::Quaternion;
use crate::report::{ErrorTally, Metric, VerificationReport};
use crate::specfun::{gauss_2f1_series, gauss_2f1_terminating, log_factorial, weighted_kummer_one};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Largest `m + n` accepted for `psi_{n,m}` closed forms.
pub const PSI_MAX_INDEX: u32 = 120;
/// Largest truncation index of a Galerkin matrix.
pub const MATRIX_MAX_INDEX: u32 = 60;

const LN3: f64 = 1.098_612_288_668_109_8;
const LN4: f64 = std::f64::consts::LN_2 * 2.0;

fn check_psi(n: u32, m: u32) -> Result<()> {
    if n + m > PSI_MAX_INDEX {
        return Err(Error::Config(format!(
            "psi_{{{n},{m}}} exceeds the supported index sum {PSI_MAX_INDEX}"
        )));
    }
    Ok(())
}

fn require_positive(name: &str, m: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::Index(format!("{name} needs a second index >= 1")));
    }
    Ok(())
}

fn same_frequency(n: u32, m: u32, k: u32, j: u32) -> bool {
    m as i64 - j as i64 == n as i64 - k as i64
}

/// `<psi_{n,m}, psi_{k,j}> = pi int e^{-3t} h_{n,m-1}(t) h_{k,j-1}(t) dt`, zero
/// unless `m - j = n - k`. The integrand is a polynomial times `e^{-3t}`.
pub fn psi_inner_product(n: u32, m: u32, k: u32, j: u32) -> Result<f64> {
    require_positive("psi inner product", m)?;
    require_positive("psi inner product", j)?;
    check_psi(n, m)?;
    check_psi(k, j)?;
    if !same_frequency(n, m, k, j) {
        return Ok(0.0);
    }
    let (a1, b1, a2, b2) = (n, m - 1, k, j - 1);
    let degree = (a1.abs_diff(b1) + a1.min(b1) + a2.min(b2)) as usize;
    let v = radial_integral_exact(degree, 3.0, |t| hermite_profile(a1, b1, t) * hermite_profile(a2, b2, t))?;
    Ok(PI * v)
}

/// `c_{a,b} = (-1)^{a^b} max(a,b)! / |a-b|!`.
fn hyper_constant(a: u32, b: u32) -> f64 {
    let s = a.min(b);
    let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (log_factorial(a.max(b)) - log_factorial(a.abs_diff(b))).exp()
}

/// Coefficients of the terminating `1F1(-s; d+1; t)`.
fn kummer_poly(s: u32, d: u32) -> Vec<f64> {
    let mut coeffs = Vec::with_capacity(s as usize + 1);
    let mut c = 1.0;
    coeffs.push(c);
    for i in 0..s {
        let fi = i as f64;
        c *= (fi - s as f64) / ((d as f64 + 1.0 + fi) * (fi + 1.0));
        coeffs.push(c);
    }
    coeffs
}

/// The inner product with the power `t^{m+n-1} / t^{min(m-1,n) + min(j-1,k)}`
/// taken literally from the hypergeometric product form. Equals
/// [`psi_inner_product`] on the diagonal and differs off it; diverges when the
/// resulting power of `t` drops to `-1` or below.
pub fn psi_inner_product_as_printed(n: u32, m: u32, k: u32, j: u32) -> Result<f64> {
    require_positive("psi inner product", m)?;
    require_positive("psi inner product", j)?;
    check_psi(n, m)?;
    check_psi(k, j)?;
    if !same_frequency(n, m, k, j) {
        return Ok(0.0);
    }
    let (s1, d1) = ((m - 1).min(n), (m - 1).abs_diff(n));
    let (s2, d2) = ((j - 1).min(k), (j - 1).abs_diff(k));
    let p1 = kummer_poly(s1, d1);
    let p2 = kummer_poly(s2, d2);
    let mut prod = vec![0.0; p1.len() + p2.len() - 1];
    for (i, a) in p1.iter().enumerate() {
        for (l, b) in p2.iter().enumerate() {
            prod[i + l] += a * b;
        }
    }
    let power = (m + n) as i64 - 1 - s1 as i64 - s2 as i64;
    let mut sum = 0.0;
    for (i, c) in prod.iter().enumerate() {
        let e = power + i as i64;
        if e <= -1 {
            return Err(Error::Domain(format!(
                "printed psi inner product diverges: power t^{e} at (n,m,k,j) = ({n},{m},{k},{j})"
            )));
        }
        // int_0^inf t^e e^{-3t} dt = e! / 3^{e+1}
        sum += c * (log_factorial(e as u32) - (e + 1) as f64 * LN3).exp();
    }
    Ok(PI * hyper_constant(m - 1, n) * hyper_constant(j - 1, k) * sum)
}

/// `pi / 3^{m+n} 4^{m-1} (n!)^2 / (n-m+1)! 2F1(1-m, 1-m; n-m+2; 1/4)`, `m <= n+1`.
/// At `m = 0` the series `2F1(1, 1; n+2; 1/4)` no longer terminates.
fn norm_branch_one(n: u32, m: u32) -> Result<f64> {
    let ln =
        PI.ln() - (m + n) as f64 * LN3 + (m as f64 - 1.0) * LN4 + 2.0 * log_factorial(n) - log_factorial(n + 1 - m);
    let c = (n + 2 - m) as f64;
    let f = if m == 0 {
        gauss_2f1_series(1.0, 1.0, c, 0.25)?
    } else {
        gauss_2f1_terminating(1 - m as i64, 1.0 - m as f64, c, 0.25)?
    };
    Ok(ln.exp() * f)
}

/// `pi / 3^{m+n} 4^n ((m-1)!)^2 / (m-1-n)! 2F1(-n, -n; m-n; 1/4)`, `m >= n+1`.
fn norm_branch_two(n: u32, m: u32) -> Result<f64> {
    let ln = PI.ln() - (m + n) as f64 * LN3 + n as f64 * LN4 + 2.0 * log_factorial(m - 1) - log_factorial(m - 1 - n);
    let f = gauss_2f1_terminating(-(n as i64), -(n as f64), (m - n) as f64, 0.25)?;
    Ok(ln.exp() * f)
}

/// `||psi_{n,m}||^2` by the two-branch `2F1(.,.;.;1/4)` formula. Both branches
/// apply at `m = n+1` and must agree. `m = 0` is the extension
/// `psi_{n,0} = -conj(e^{-|p|^2} H_{-1,n})` through the first branch.
pub fn psi_norm_closed(n: u32, m: u32) -> Result<f64> {
    check_psi(n, m)?;
    let first = if m <= n + 1 { Some(norm_branch_one(n, m)?) } else { None };
    let second = if m >= 1 && m > n {
        Some(norm_branch_two(n, m)?)
    } else {
        None
    };
    match (first, second) {
        (Some(a), Some(b)) => {
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                return Err(Error::Consistency(format!(
                    "norm branches disagree at (n,m) = ({n},{m}): {a} vs {b}"
                )));
            }
            Ok(a)
        }
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (None, None) => unreachable!("every (n, m) falls in a branch"),
    }
}

/// `lambda_{k,n} = ||psi_{k,n}||^2 / (pi n! k!)`.
pub fn lambda_eigenvalue(k: u32, n: u32) -> Result<f64> {
    let norm = psi_norm_closed(k, n)?;
    Ok(norm / PI * (-log_factorial(n) - log_factorial(k)).exp())
}

/// Singular value of `P_k C` carried by `psi_{n,k}`: `A sqrt(lambda_{n,k})`.
pub fn pkc_singular_value(k: u32, n: u32, area: f64) -> Result<f64> {
    Ok(area * lambda_eigenvalue(n, k)?.sqrt())
}

/// The closed-form singular values of `P_k C` for `n = 0..count`, sorted descending.
pub fn pkc_singular_values_closed(k: u32, count: u32, area: f64) -> Result<Vec<f64>> {
    let mut v = (0..count)
        .map(|n| pkc_singular_value(k, n, area))
        .collect::<Result<Vec<_>>>()?;
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// `P_k C psi_{n,k} = -A lambda_{n,k} H_{n,k}`.
pub fn pkc_on_psi_closed(n: u32, k: u32, q: Quaternion, area: f64) -> Result<Quaternion> {
    Ok(hermite(n, k, q) * (-area * lambda_eigenvalue(n, k)?))
}

/// `P_k C psi_{k,n} = ||C H_{k,n}||^2 / (pi n! k!) H_{n,k}` as stated, with
/// `||C H_{k,n}||^2 = A^3 ||psi_{n,k}||^2`.
pub fn pkc_on_psi_as_printed(k: u32, n: u32, q: Quaternion, area: f64) -> Result<Quaternion> {
    Ok(hermite(n, k, q) * (area.powi(3) * lambda_eigenvalue(n, k)?))
}

/// Literal two-branch singular value with `3^{(n+k)/2}` inside the root.
fn literal_singular_value(k: u32, n: u32) -> Result<f64> {
    let half = 0.5 * (n + k) as f64 * LN3;
    let sq = if n <= k + 1 {
        let ln = (n as f64 - 1.0) * LN4 + log_factorial(k) - half - log_factorial(n) - log_factorial(k + 1 - n);
        let c = (k + 2 - n) as f64;
        let f = if n == 0 {
            gauss_2f1_series(1.0, 1.0, c, 0.25)?
        } else {
            gauss_2f1_terminating(1 - n as i64, 1.0 - n as f64, c, 0.25)?
        };
        ln.exp() * f
    } else {
        let ln = k as f64 * LN4 + log_factorial(n - 1) - half - log_factorial(k) - log_factorial(n - 1 - k);
        ln.exp() * gauss_2f1_terminating(-(k as i64), -(k as f64), (n - k) as f64, 0.25)?
    };
    Ok(sq.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedSingularValue {
    pub k: u32,
    pub n: u32,
    pub literal: f64,
    pub sqrt_lambda: f64,
    /// `|literal - sqrt_lambda| > 1e-10 sqrt_lambda`.
    pub discrepant: bool,
}

/// The literal two-branch singular values next to `sqrt(lambda_{k,n})`, `n = 0..=n_max`.
pub fn singular_values_closed(k: u32, n_max: u32) -> Result<Vec<ClosedSingularValue>> {
    (0..=n_max)
        .map(|n| {
            let literal = literal_singular_value(k, n)?;
            let sqrt_lambda = lambda_eigenvalue(k, n)?.sqrt();
            Ok(ClosedSingularValue {
                k,
                n,
                literal,
                sqrt_lambda,
                discrepant: (literal - sqrt_lambda).abs() > 1e-10 * sqrt_lambda,
            })
        })
        .collect()
}

/// `(4^k (n-1)! / (3^{n+k} n k! (n-1-k)!))^{1/2}`, `n > k+1`.
pub fn singular_values_asymptotic(k: u32, n: u32) -> Result<f64> {
    if n <= k + 1 {
        return Err(Error::Domain(format!(
            "asymptotic form needs n > k+1, got k = {k}, n = {n}"
        )));
    }
    let ln = k as f64 * LN4 + log_factorial(n - 1)
        - (n + k) as f64 * LN3
        - (n as f64).ln()
        - log_factorial(k)
        - log_factorial(n - 1 - k);
    Ok((0.5 * ln).exp())
}

/// Truncated matrix `<phi_row, T phi_col>` in the normalized basis.
///
/// Entries are real: the angular selection rule leaves a single frequency per
/// entry and the radial integrals are real.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub row_indices: Vec<BasisIndex>,
    pub col_indices: Vec<BasisIndex>,
    pub entries: DMatrix<f64>,
    pub area: f64,
}

/// One diagonal block: columns of frequency `nu`, rows of frequency `nu - 1`.
#[derive(Debug, Clone)]
pub struct Block {
    pub frequency: i32,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

fn square_indices(max_m: u32, max_n: u32) -> Vec<BasisIndex> {
    let mut v = Vec::with_capacity(((max_m + 1) * (max_n + 1)) as usize);
    for m in 0..=max_m {
        for n in 0..=max_n {
            v.push(BasisIndex {
                m: m as i32,
                n: n as i32,
            });
        }
    }
    v
}

impl OperatorMatrix {
    fn sub(&self, keep_row: impl Fn(BasisIndex) -> bool, keep_col: impl Fn(BasisIndex) -> bool) -> Self {
        let rows: Vec<usize> = (0..self.row_indices.len())
            .filter(|&r| keep_row(self.row_indices[r]))
            .collect();
        let cols: Vec<usize> = (0..self.col_indices.len())
            .filter(|&c| keep_col(self.col_indices[c]))
            .collect();
        let entries = DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.entries[(rows[r], cols[c])]);
        Self {
            row_indices: rows.iter().map(|&r| self.row_indices[r]).collect(),
            col_indices: cols.iter().map(|&c| self.col_indices[c]).collect(),
            entries,
            area: self.area,
        }
    }

    /// Restriction to indices with both entries `<= max`.
    pub fn truncate(&self, max: u32) -> Self {
        let keep = |i: BasisIndex| i.m <= max as i32 && i.n <= max as i32;
        self.sub(keep, keep)
    }

    /// Rows in the `k`-th true-polyanalytic space: the Galerkin matrix of `P_k C`.
    pub fn project_rows(&self, k: u32) -> Self {
        self.sub(|i| i.n == k as i32, |_| true)
    }

    pub fn max_index(&self) -> u32 {
        self.row_indices
            .iter()
            .chain(&self.col_indices)
            .map(|i| i.m.max(i.n) as u32)
            .max()
            .unwrap_or(0)
    }

    /// Largest `|entry|` outside the selection rule `row frequency = col frequency - 1`.
    pub fn selection_violation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (c, col) in self.col_indices.iter().enumerate() {
            for (r, row) in self.row_indices.iter().enumerate() {
                if row.frequency() != col.frequency() - 1 {
                    worst = worst.max(self.entries[(r, c)].abs());
                }
            }
        }
        worst
    }

    /// Diagonal blocks of the selection rule, ordered by frequency.
    pub fn blocks(&self) -> Vec<Block> {
        let mut by_freq: BTreeMap<i32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (c, col) in self.col_indices.iter().enumerate() {
            by_freq.entry(col.frequency()).or_default().1.push(c);
        }
        for (r, row) in self.row_indices.iter().enumerate() {
            by_freq.entry(row.frequency() + 1).or_default().0.push(r);
        }
        by_freq
            .into_iter()
            .filter(|(_, (rows, cols))| !rows.is_empty() && !cols.is_empty())
            .map(|(frequency, (rows, cols))| {
                let matrix = DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.entries[(rows[r], cols[c])]);
                Block {
                    frequency,
                    rows,
                    cols,
                    matrix,
                }
            })
            .collect()
    }

    /// Singular values, sorted descending, from the per-block SVD.
    ///
    /// Fails if an entry outside the blocks exceeds `1e-12`, since the blocks
    /// would then not carry the whole spectrum.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let violation = self.selection_violation();
        if violation > 1e-12 {
            return Err(Error::Consistency(format!(
                "entry {violation:e} outside the angular selection rule"
            )));
        }
        let mut sv = Vec::new();
        for block in self.blocks() {
            let svd = block.matrix.svd(false, false);
            if svd.singular_values.iter().any(|s| !s.is_finite()) {
                return Err(Error::Consistency(format!("SVD failed on block {}", block.frequency)));
            }
            sv.extend(svd.singular_values.iter().copied());
        }
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    }

    /// Eigenvalues of `T^* T`, sorted descending, from the per-block Gram matrices.
    pub fn gram_eigenvalues(&self) -> Vec<f64> {
        let mut ev = Vec::new();
        for block in self.blocks() {
            let gram = block.matrix.transpose() * &block.matrix;
            ev.extend(gram.symmetric_eigenvalues().iter().map(|&v| v.max(0.0)));
        }
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

/// `phi_profile(a, b, u_i / 2)` at the Gauss-Laguerre nodes `u_i`.
struct ProfileTable {
    side: usize,
    len: usize,
    values: Vec<f64>,
}

impl ProfileTable {
    fn new(max: u32, nodes: &[f64]) -> Self {
        let side = max as usize + 1;
        let len = nodes.len();
        let mut values = vec![0.0; side * side * len];
        values.par_chunks_mut(len).enumerate().for_each(|(idx, chunk)| {
            let (a, b) = ((idx / side) as u32, (idx % side) as u32);
            for (v, &u) in chunk.iter_mut().zip(nodes) {
                *v = phi_profile(a, b, 0.5 * u);
            }
        });
        Self { side, len, values }
    }

    fn get(&self, a: u32, b: u32) -> &[f64] {
        let start = (a as usize * self.side + b as usize) * self.len;
        &self.values[start..start + self.len]
    }
}

/// Entry for a column `(0, n)` and row `(j, j+n+1)`, where `1F1(1; n+2; t)`
/// enters and the radial integral is done adaptively, with a bound on the
/// neglected tail from `|phi_{j,k}|^2 e^{-|z|^2} <= 1/pi` and `psi_n <= n!`.
fn column_zero_entry(j: u32, n: u32, area: f64) -> Result<f64> {
    let k = j + n + 1;
    let np1 = n as f64 + 1.0;
    let ln_pre = 0.5 * PI.ln() - np1.ln() - 0.5 * log_factorial(n);
    let g = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let w = weighted_kummer_one(n, t).unwrap_or(f64::NAN);
        (ln_pre + 0.5 * np1 * t.ln() - t).exp() * w * phi_profile(j, k, t)
    };
    let upper = 60.0 + 4.0 * (j + n + 1) as f64;
    let ln_tail = 0.5 * log_factorial(n) + 2f64.ln() - 0.5 * upper - 0.5 * np1 * upper.ln();
    let tail = area * ln_tail.exp();
    if tail > 1e-14 {
        return Err(Error::Truncation {
            tail,
            tolerance: 1e-14,
            max_m: k as usize,
        });
    }
    let r = adaptive_kronrod(g, 0.0, upper, 1e-16, 1e-13)?;
    Ok(area * r.value)
}

/// Galerkin matrix `<phi_{j,k}, C phi_{m,n}>` over `m <= max_m`, `n <= max_n`.
///
/// For `m >= 1`, `C phi_{m,n} = -(A/sqrt m) e^{-|q|^2} phi_{m-1,n}` and the
/// entry is `-(A/sqrt m) pi int h_{j,k} h_{m-1,n} e^{-2t} dt` in normalized
/// profiles, exact by Gauss-Laguerre. The `m = 0` column is adaptive.
pub fn build_cauchy_matrix(max_m: u32, max_n: u32, spec: &QuadratureSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    if max_m > MATRIX_MAX_INDEX || max_n > MATRIX_MAX_INDEX {
        return Err(Error::Config(format!(
            "matrix truncation ({max_m}, {max_n}) exceeds {MATRIX_MAX_INDEX}"
        )));
    }
    let area = spec.area_normalization;
    let indices = square_indices(max_m, max_n);
    let max = max_m.max(max_n);
    // degree of h_{j,k} h_{m-1,n} is at most 3 max
    let rule = laguerre_rule(3 * max as usize / 2 + 2);
    let table = ProfileTable::new(max, &rule.nodes);
    let position = |i: BasisIndex| -> Option<usize> {
        (i.m >= 0 && i.n >= 0 && i.m as u32 <= max_m && i.n as u32 <= max_n)
            .then(|| i.m as usize * (max_n as usize + 1) + i.n as usize)
    };
    let columns: Vec<Vec<(usize, f64)>> = indices
        .par_iter()
        .map(|&col| -> Result<Vec<(usize, f64)>> {
            let (m, n) = (col.m as u32, col.n as u32);
            let target = col.frequency() - 1;
            let mut out = Vec::new();
            for j in 0..=max_m {
                let k = j as i32 - target;
                let Some(r) = position(BasisIndex { m: j as i32, n: k }) else {
                    continue;
                };
                let k = k as u32;
                let v = if m == 0 {
                    column_zero_entry(j, n, area)?
                } else {
                    let a = table.get(j, k);
                    let b = table.get(m - 1, n);
                    let integral: f64 = 0.5
                        * a.iter()
                            .zip(b)
                            .zip(&rule.weights)
                            .map(|((x, y), w)| x * y * w)
                            .sum::<f64>();
                    -area / (m as f64).sqrt() * PI * integral
                };
                out.push((r, v));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let size = indices.len();
    let mut entries = DMatrix::zeros(size, size);
    for (c, col) in columns.into_iter().enumerate() {
        for (r, v) in col {
            entries[(r, c)] = v;
        }
    }
    Ok(OperatorMatrix {
        row_indices: indices.clone(),
        col_indices: indices,
        entries,
        area,
    })
}

/// `<phi_row, C phi_col>` over `H` by quadrature of the closed-form image, as
/// an independent check of a matrix entry; the vector part must vanish.
pub fn cauchy_matrix_entry_quadrature(row: BasisIndex, col: BasisIndex, spec: &QuadratureSpec) -> Result<Quaternion> {
    if !row.is_polynomial() {
        return Err(Error::Index(format!(
            "row index ({}, {}) must be non-negative",
            row.m, row.n
        )));
    }
    let area = spec.area_normalization;
    inner_product(
        &|q| phi_normalized(row.m as u32, row.n as u32, q, area),
        &|q| cauchy_on_normalized(col, q, area).unwrap_or(Quaternion::new(f64::NAN, 0.0, 0.0, 0.0)),
        spec,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Converging,
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenSeries {
    pub exponent: f64,
    /// `sum_j s_j^exponent` at each truncation.
    pub partial_sums: Vec<f64>,
    /// Relative increment between the two largest truncations.
    pub final_increment: f64,
    pub trend: Trend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenDiagnostics {
    /// Nested truncation indices `1..=max`.
    pub truncations: Vec<u32>,
    pub top_singular_values: Vec<f64>,
    pub series: Vec<SchattenSeries>,
}

/// Increment below this counts as converged.
const CONVERGED_INCREMENT: f64 = 0.01;

fn classify(increments: &[f64]) -> Trend {
    match increments {
        [.., prev, last] => {
            if *last < CONVERGED_INCREMENT {
                Trend::Converging
            } else if *last >= 0.5 * *prev {
                // increments of a divergent power-law sum shrink only like 1/M
                Trend::Diverging
            } else {
                Trend::Inconclusive
            }
        }
        _ => Trend::Inconclusive,
    }
}

/// Partial sums `sum_j s_j^kappa` of the SVD of every nested truncation
/// `1..=max` of `matrix`, with a trend classification per exponent.
pub fn schatten_diagnostics(matrix: &OperatorMatrix, exponents: &[f64]) -> Result<SchattenDiagnostics> {
    let max = matrix.max_index();
    let truncations: Vec<u32> = (1..=max).collect();
    let spectra: Vec<Vec<f64>> = truncations
        .iter()
        .map(|&t| matrix.truncate(t).singular_values())
        .collect::<Result<_>>()?;
    let top_singular_values = spectra.iter().map(|s| s.first().copied().unwrap_or(0.0)).collect();
    let series = exponents
        .iter()
        .map(|&kappa| {
            let partial_sums: Vec<f64> = spectra.iter().map(|s| s.iter().map(|v| v.powf(kappa)).sum()).collect();
            let increments: Vec<f64> = partial_sums.windows(2).map(|w| (w[1] - w[0]) / w[1]).collect();
            SchattenSeries {
                exponent: kappa,
                final_increment: increments.last().copied().unwrap_or(f64::NAN),
                trend: classify(&increments),
                partial_sums,
            }
        })
        .collect();
    Ok(SchattenDiagnostics {
        truncations,
        top_singular_values,
        series,
    })
}

/// `psi_{a,b}` on a slice as a function of `z = x + I y`.
fn psi_complex(table: &HermiteTable, a: u32, b: u32, z: Complex64) -> Complex64 {
    let t = z.norm_sqr();
    if b == 0 {
        // psi_{a,0} = z^{a+1} e^{-t} 1F1(1; a+2; t) / (a+1)
        let w = weighted_kummer_one(a, t).unwrap_or(f64::NAN);
        z.powu(a + 1) * (w / (a as f64 + 1.0))
    } else {
        -table.get(a, b - 1) * (-t).exp()
    }
}

/// Gram matrix `<psi_a, psi_b>` over `H` by quadrature, for `psi_{n,m}` given as `(n, m)`.
pub fn psi_gram_quadrature(indices: &[(u32, u32)], spec: &QuadratureSpec) -> Result<Vec<Vec<Quaternion>>> {
    let max = indices.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0);
    intrinsic_gram(
        &|z: Complex64, out: &mut [Complex64]| {
            let table = HermiteTable::new(max, z);
            for (v, &(a, b)) in out.iter_mut().zip(indices) {
                *v = psi_complex(&table, a, b, z);
            }
        },
        indices.len(),
        spec,
    )
}

/// Orthogonality of the range decomposition: `<psi_{n,m}, psi_{k,j}> = 0`
/// whenever `m - j != n - k`, over all quadruples with `n+m+k+j <= max_index`.
///
/// `max_abs_err` is the largest cross-frequency inner product (closed form and
/// quadrature); `max_rel_err` compares same-frequency entries of the two
/// routes. A non-positive diagonal marks the check failed.
pub fn range_decomposition_check(max_index: u32, spec: &QuadratureSpec) -> Result<VerificationReport> {
    const TOL: f64 = 1e-8;
    let mut indices = Vec::new();
    for m in 1..max_index.max(1) {
        for n in 0..max_index - m {
            indices.push((n, m));
        }
    }
    let area = spec.area_normalization;
    let gram = psi_gram_quadrature(&indices, spec)?;
    let mut cross = ErrorTally::new();
    let mut within = ErrorTally::new();
    let mut diagonal_ok = true;
    for (r, &(n, m)) in indices.iter().enumerate() {
        for (c, &(k, j)) in indices.iter().enumerate() {
            if n + m + k + j > max_index {
                continue;
            }
            let closed = psi_inner_product(n, m, k, j)?;
            let quad = gram[r][c] * (1.0 / area);
            if same_frequency(n, m, k, j) {
                within.record((quad - Quaternion::new(closed, 0.0, 0.0, 0.0)).norm(), closed);
                if r == c && !(psi_norm_closed(n, m)? > 0.0) {
                    diagonal_ok = false;
                }
            } else {
                cross.record(quad.norm().max(closed.abs()), 0.0);
            }
        }
    }
    let abs = if diagonal_ok { cross.max_abs } else { f64::INFINITY };
    Ok(VerificationReport::new(
        "spectrum",
        "range_decomposition_orthogonality",
        "orthogonal decomposition of the range into E_l",
        abs,
        within.max_rel,
        TOL,
        Metric::Absolute,
    ))
}

/// One `(k, n)` row of the spectral comparison; values are per unit area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralRow {
    pub k: u32,
    pub n: u32,
    /// Two-branch formula with `3^{(n+k)/2}`.
    pub s_closed_literal: f64,
    /// `sqrt(lambda_{k,n})`.
    pub s_sqrt_lambda: f64,
    /// `sqrt(lambda_{n,k})`, the pairing carried by `psi_{n,k}`.
    pub s_sqrt_lambda_transposed: f64,
    /// `n`-th largest singular value of the truncated `P_k C`, divided by `A`.
    pub s_numeric: f64,
    pub lambda: f64,
    pub asymptotic: Option<f64>,
    pub ratio_numeric_to_transposed: f64,
    pub ratio_numeric_to_sqrt_lambda: f64,
    pub ratio_literal_to_sqrt_lambda: f64,
    pub ratio_sqrt_lambda_to_asymptotic: Option<f64>,
    pub literal_discrepant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub k: u32,
    /// Closed-form singular values `A sqrt(lambda_{n,k})`, sorted descending.
    pub singular_values_closed: Vec<f64>,
    /// SVD of the truncated `P_k C`, sorted descending.
    pub singular_values_numeric: Vec<f64>,
    /// `lambda_{k,n}`, `n = 0..=n_max`.
    pub lambda_values: Vec<f64>,
    /// Partial sums `sum_{i<=n} s_i^kappa` of the numeric values, keyed by `kappa`.
    pub schatten_partial_sums: BTreeMap<String, Vec<f64>>,
    pub rows: Vec<SpectralRow>,
}

/// Compares every closed and asymptotic singular value of `P_k C` with the SVD
/// of the rows `(., k)` of `cauchy`, for `n = 0..=n_max`.
pub fn spectral_report(k: u32, n_max: u32, cauchy: &OperatorMatrix, exponents: &[f64]) -> Result<SpectralReport> {
    let area = cauchy.area;
    let numeric = cauchy.project_rows(k).singular_values()?;
    if numeric.len() <= n_max as usize {
        return Err(Error::Config(format!(
            "truncation yields {} singular values, need {}",
            numeric.len(),
            n_max + 1
        )));
    }
    let closed = singular_values_closed(k, n_max)?;
    let mut rows = Vec::with_capacity(closed.len());
    for c in &closed {
        let n = c.n;
        let s_numeric = numeric[n as usize] / area;
        let transposed = lambda_eigenvalue(n, k)?.sqrt();
        let asymptotic = singular_values_asymptotic(k, n).ok();
        rows.push(SpectralRow {
            k,
            n,
            s_closed_literal: c.literal,
            s_sqrt_lambda: c.sqrt_lambda,
            s_sqrt_lambda_transposed: transposed,
            s_numeric,
            lambda: c.sqrt_lambda * c.sqrt_lambda,
            asymptotic,
            ratio_numeric_to_transposed: s_numeric / transposed,
            ratio_numeric_to_sqrt_lambda: s_numeric / c.sqrt_lambda,
            ratio_literal_to_sqrt_lambda: c.literal / c.sqrt_lambda,
            ratio_sqrt_lambda_to_asymptotic: asymptotic.map(|a| c.sqrt_lambda / a),
            literal_discrepant: c.discrepant,
        });
    }
    let shown = &numeric[..=n_max as usize];
    let schatten_partial_sums = exponents
        .iter()
        .map(|&kappa| {
            let mut acc = 0.0;
            let sums = shown
                .iter()
                .map(|s| {
                    acc += s.powf(kappa);
                    acc
                })
                .collect();
            (format!("{kappa}"), sums)
        })
        .collect();
    Ok(SpectralReport {
        k,
        singular_values_closed: pkc_singular_values_closed(k, n_max + 1, area)?,
        singular_values_numeric: shown.to_vec(),
        lambda_values: rows.iter().map(|r| r.lambda).collect(),
        schatten_partial_sums,
        rows,
    })
}

/// Which candidate value for one closed-form singular value appears in the
/// truncated spectra of `P_k C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    pub k: u32,
    pub n: u32,
    pub literal: f64,
    pub sqrt_lambda: f64,
    /// First `k'` whose numeric spectrum contains the value, if any.
    pub literal_found_in: Option<u32>,
    pub sqrt_lambda_found_in: Option<u32>,
    pub supported: String,
}

/// Searches `spectra` (pairs of `k'` and its per-unit-area singular values)
/// for the literal and the `sqrt(lambda)` values at `(k, n)`.
pub fn adjudicate_singular_value(k: u32, n: u32, spectra: &[(u32, Vec<f64>)], rel_tol: f64) -> Result<Adjudication> {
    let c = singular_values_closed(k, n)?
        .pop()
        .expect("n_max = n yields n + 1 entries");
    let find = |v: f64| {
        spectra
            .iter()
            .find(|(_, s)| s.iter().any(|x| (x - v).abs() <= rel_tol * v))
            .map(|(kk, _)| *kk)
    };
    let literal_found_in = find(c.literal);
    let sqrt_lambda_found_in = find(c.sqrt_lambda);
    let supported = match (literal_found_in, sqrt_lambda_found_in) {
        (None, Some(_)) => "sqrt_lambda",
        (Some(_), None) => "literal",
        (Some(_), Some(_)) => "both",
        (None, None) => "neither",
    };
    Ok(Adjudication {
        k,
        n,
        literal: c.literal,
        sqrt_lambda: c.sqrt_lambda,
        literal_found_in,
        sqrt_lambda_found_in,
        supported: supported.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_anchors() {
        assert!((psi_norm_closed(0, 1).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((psi_norm_closed(0, 2).unwrap() - PI / 9.0).abs() < 1e-15);
        assert!((psi_norm_closed(0, 0).unwrap() - PI * (4.0f64 / 3.0).ln()).abs() < 1e-14);
        assert!((lambda_eigenvalue(0, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(psi_inner_product(0, 1, 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn norm_matches_inner_product() {
        for n in 0..8 {
            for m in 1..8 {
                let a = psi_norm_closed(n, m).unwrap();
                let b = psi_inner_product(n, m, n, m).unwrap();
                assert!((a - b).abs() < 1e-12 * a, "({n},{m}): {a} vs {b}");
                let p = psi_inner_product_as_printed(n, m, n, m).unwrap();
                assert!((p - b).abs() < 1e-11 * a, "printed ({n},{m}): {p} vs {b}");
            }
        }
    }

    #[test]
    fn literal_and_asymptotic_examples() {
        let c = singular_values_closed(0, 1).unwrap();
        assert!((c[1].literal - 3f64.powf(-0.25)).abs() < 1e-15);
        assert!((c[1].sqrt_lambda - 3f64.powf(-0.5)).abs() < 1e-15);
        assert!(c[1].discrepant);
        let a = singular_values_asymptotic(0, 2).unwrap();
        assert!((a - 1.0 / 18f64.sqrt()).abs() < 1e-15);
        assert!(singular_values_asymptotic(1, 2).is_err());
    }

    #[test]
    fn first_entry_and_selection_rule() {
        let spec = QuadratureSpec::default();
        let c = build_cauchy_matrix(4, 4, &spec).unwrap();
        // <phi_{0,0}, C phi_{1,0}> = -1/2
        let col = 5;
        assert_eq!(c.col_indices[col], BasisIndex { m: 1, n: 0 });
        assert!((c.entries[(0, col)] + 0.5).abs() < 1e-14);
        assert!(c.selection_violation() < 1e-10);
    }

    #[test]
    fn column_zero_matches_quadrature() {
        let spec = QuadratureSpec::default();
        let c = build_cauchy_matrix(4, 4, &spec).unwrap();
        for (col, row) in [((0, 0), (0, 1)), ((0, 1), (1, 3)), ((0, 2), (0, 3)), ((1, 2), (1, 3))] {
            let col = BasisIndex { m: col.0, n: col.1 };
            let row = BasisIndex { m: row.0, n: row.1 };
            let ci = c.col_indices.iter().position(|&i| i == col).unwrap();
            let ri = c.row_indices.iter().position(|&i| i == row).unwrap();
            let q = cauchy_matrix_entry_quadrature(row, col, &spec).unwrap();
            assert!(q.vector().norm() < 1e-10);
            assert!(
                (q.w - c.entries[(ri, ci)]).abs() < 1e-9,
                "{row:?} {col:?}: {} vs {}",
                q.w,
                c.entries[(ri, ci)]
            );
        }
    }
}
