//! The check registry. Every check belongs to exactly one suite.

mod algebra;
mod basis;
mod kernel;
mod projection;
mod quadrature;
mod specfun;
pub mod spectrum;
mod transform;

use crate::config::{Suite, SuiteConfig};
use qcauchy::basis::HermiteTable;
use qcauchy::bergman::{SliceExpansion, TruncationSpec};
use qcauchy::report::{ErrorTally, Metric};
use qcauchy::spectral::{build_cauchy_matrix, OperatorMatrix};
use qcauchy::{QuadratureSpec, Quaternion, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

pub type CheckFn = fn(&Context, &mut ChaCha8Rng) -> Result<ErrorTally>;

pub struct Check {
    pub name: &'static str,
    pub suite: Suite,
    /// The identity or statement the check verifies.
    pub anchor: &'static str,
    /// Documented default tolerance.
    pub tolerance: f64,
    pub metric: Metric,
    pub run: CheckFn,
}

/// All checks in run order.
pub fn registry() -> impl Iterator<Item = &'static Check> {
    [
        algebra::CHECKS,
        specfun::CHECKS,
        basis::CHECKS,
        quadrature::CHECKS,
        kernel::CHECKS,
        transform::CHECKS,
        projection::CHECKS,
        spectrum::CHECKS,
    ]
    .into_iter()
    .flatten()
}

pub fn find(name: &str) -> Option<&'static Check> {
    registry().find(|c| c.name == name)
}

/// Largest index of the Galerkin matrix; the spectral checks use its
/// truncation to [`SPECTRAL_TRUNCATION`] and the extra rows for stability.
pub const MATRIX_MAX: u32 = 40;
pub const SPECTRAL_TRUNCATION: u32 = 30;

/// Shared state for one run; expensive intermediates are computed once.
pub struct Context<'a> {
    pub config: &'a SuiteConfig,
    matrix: OnceLock<Result<OperatorMatrix>>,
    transform_samples: OnceLock<Result<transform::Samples>>,
    projections: OnceLock<Result<Vec<Vec<SliceExpansion>>>>,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a SuiteConfig) -> Self {
        Self {
            config,
            matrix: OnceLock::new(),
            transform_samples: OnceLock::new(),
            projections: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.config.quadrature
    }

    pub fn trunc(&self) -> &TruncationSpec {
        &self.config.truncation
    }

    pub fn area(&self) -> f64 {
        self.config.quadrature.area_normalization
    }

    /// Random stream for `check`, independent of which other checks run.
    pub fn rng(&self, check: &str) -> ChaCha8Rng {
        // FNV-1a keeps the per-check seed stable across platforms
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in check.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        ChaCha8Rng::seed_from_u64(self.config.seed ^ h)
    }

    /// Galerkin matrix of `C` in the `phi` basis up to [`MATRIX_MAX`].
    pub fn cauchy_matrix(&self) -> Result<&OperatorMatrix> {
        self.matrix
            .get_or_init(|| build_cauchy_matrix(MATRIX_MAX, MATRIX_MAX, self.spec()))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn transform_samples(&self) -> Result<&transform::Samples> {
        self.transform_samples
            .get_or_init(|| transform::Samples::compute(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn projections(&self) -> Result<&Vec<Vec<SliceExpansion>>> {
        self.projections
            .get_or_init(|| projection::basis_projections(self))
            .as_ref()
            .map_err(Clone::clone)
    }
}

pub(crate) fn random_q(rng: &mut ChaCha8Rng, r: f64) -> Quaternion {
    Quaternion::new(
        rng.random_range(-r..r),
        rng.random_range(-r..r),
        rng.random_range(-r..r),
        rng.random_range(-r..r),
    )
}

pub(crate) fn random_unit(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let v = Quaternion::new(
            0.0,
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

pub(crate) fn rel_err(value: Quaternion, reference: Quaternion) -> (f64, f64) {
    ((value - reference).norm(), reference.norm())
}

/// `H_{m,n}(p)` for all `m, n <= max` at one point, lifted from its slice.
pub(crate) struct HermiteAt {
    table: HermiteTable,
    unit: Quaternion,
}

impl HermiteAt {
    pub(crate) fn new(max: u32, p: Quaternion) -> Self {
        let (z, unit) = p.slice_complex();
        Self {
            table: HermiteTable::new(max, z),
            unit,
        }
    }

    pub(crate) fn hermite(&self, m: u32, n: u32) -> Quaternion {
        Quaternion::from_complex(self.table.get(m, n), self.unit)
    }
}

/// `1 / sqrt(pi m! n! A)`.
pub(crate) fn phi_scale(m: u32, n: u32, area: f64) -> f64 {
    let lf = qcauchy::specfun::log_factorial;
    (-0.5 * (lf(m) + lf(n) + (std::f64::consts::PI * area).ln())).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn names_unique_and_suites_concrete() {
        let mut seen = BTreeSet::new();
        for c in registry() {
            assert!(seen.insert(c.name), "duplicate check {}", c.name);
            assert_ne!(c.suite, Suite::All, "{}", c.name);
            assert!(c.tolerance >= 0.0 && c.tolerance.is_finite(), "{}", c.name);
            assert!(!c.anchor.is_empty());
        }
        for s in Suite::CONCRETE {
            assert!(registry().any(|c| c.suite == s), "empty suite {s}");
        }
    }

    #[test]
    fn registry_is_grouped_by_suite() {
        let order: Vec<Suite> = registry().map(|c| c.suite).collect();
        assert!(order.windows(2).all(|w| w[0] <= w[1]));
    }
}
