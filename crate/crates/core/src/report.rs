//! Machine-readable outcome of one verification check.

use serde::{Deserialize, Serialize};

/// Which of the two recorded errors decides `pass`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub check_name: String,
    /// Identity or section the check traces to.
    pub anchor: String,
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Wall time; left empty unless timing is requested so reports stay byte-identical.
    pub runtime_ms: Option<u64>,
}

impl VerificationReport {
    /// `pass` holds iff the chosen error is finite and `<= tolerance`.
    pub fn new(
        suite: &str,
        check_name: &str,
        anchor: &str,
        max_abs_err: f64,
        max_rel_err: f64,
        tolerance: f64,
        metric: Metric,
    ) -> Self {
        let err = match metric {
            Metric::Absolute => max_abs_err,
            Metric::Relative => max_rel_err,
        };
        Self {
            suite: suite.to_string(),
            check_name: check_name.to_string(),
            anchor: anchor.to_string(),
            max_abs_err,
            max_rel_err,
            tolerance,
            pass: err.is_finite() && err <= tolerance,
            runtime_ms: None,
        }
    }

    /// A check that could not be evaluated; recorded as a failure.
    pub fn failed(suite: &str, check_name: &str, anchor: &str, tolerance: f64) -> Self {
        Self {
            suite: suite.to_string(),
            check_name: check_name.to_string(),
            anchor: anchor.to_string(),
            max_abs_err: f64::INFINITY,
            max_rel_err: f64::INFINITY,
            tolerance,
            pass: false,
            runtime_ms: None,
        }
    }
}

fn sticky_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Running maximum of absolute and relative deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTally {
    pub max_abs: f64,
    pub max_rel: f64,
}

impl Default for ErrorTally {
    fn default() -> Self {
        Self::new()
    }
}

impl ErrorTally {
    pub fn new() -> Self {
        Self {
            max_abs: 0.0,
            max_rel: 0.0,
        }
    }

    /// Relative error uses `|reference|`, falling back to the absolute error at zero.
    pub fn record(&mut self, abs_err: f64, reference: f64) {
        let rel = if reference == 0.0 {
            abs_err
        } else {
            abs_err / reference.abs()
        };
        // NaN must poison the tally rather than vanish through `max`
        self.max_abs = sticky_max(self.max_abs, abs_err);
        self.max_rel = sticky_max(self.max_rel, rel);
    }

    pub fn record_real(&mut self, value: f64, reference: f64) {
        self.record((value - reference).abs(), reference);
    }

    pub fn report(
        &self,
        suite: &str,
        check_name: &str,
        anchor: &str,
        tolerance: f64,
        metric: Metric,
    ) -> VerificationReport {
        VerificationReport::new(suite, check_name, anchor, self.max_abs, self.max_rel, tolerance, metric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_metric() {
        let r = VerificationReport::new("s", "c", "a", 1e-3, 1e-9, 1e-8, Metric::Relative);
        assert!(r.pass);
        let r = VerificationReport::new("s", "c", "a", 1e-3, 1e-9, 1e-8, Metric::Absolute);
        assert!(!r.pass);
    }

    #[test]
    fn nan_fails() {
        let mut t = ErrorTally::new();
        t.record(1e-12, 1.0);
        t.record(f64::NAN, 1.0);
        t.record(1e-13, 1.0);
        assert!(!t.report("s", "c", "a", 1.0, Metric::Absolute).pass);
    }
}
