//! Identity checks. Every check returns a [`PropertyReport`] holding a scalar residual.

mod checks;
mod gradations;
mod sampler;
mod suite;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::rmatrix::ModelParams;
use crate::special::LogComplex;
use crate::tensor::TensorOperator;

pub use checks::{
    check_antisymmetry, check_crossing, check_crossing_unitarity, check_eightvertex_agreement,
    check_eightvertex_gauged, check_evaluated_ll, check_h_invariance, check_h_invariance_gauged, check_kernel_lemma,
    check_quasi_periodicity, check_regularity, check_theta_identities, check_transpose_symmetry, check_unitarity,
    check_ybe,
};
pub use gradations::{
    check_gauge_relation, check_nsigma, check_p_to_zero, check_spectrum_nonelliptic, check_twist_relation, nsigma,
    DEFAULT_P_SEQUENCE,
};
pub use sampler::{resample, Sampler, MAX_RESAMPLES};
pub use suite::{run_suite, SuiteConfig, Tolerances};

/// A spectral argument used by a check, stored through its logarithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub label: String,
    pub log: [f64; 2],
}

/// Free-form diagnostic attached to a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Detail {
    Flag(bool),
    Number(f64),
    Series(Vec<f64>),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub n: usize,
    pub params_digest: String,
    pub sample_points: Vec<SamplePoint>,
    /// Relative residual; `passed` holds exactly when it does not exceed `tolerance`.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime_ms: f64,
    /// Canary checks are meant to fail; they do not count toward the verdict.
    pub expect_fail: bool,
    pub details: BTreeMap<String, Detail>,
}

impl PropertyReport {
    /// Whether this report counts against an overall verdict.
    pub fn is_failure(&self) -> bool {
        !self.passed && !self.expect_fail
    }

    /// Report for a check that raised an error instead of producing a residual.
    pub fn errored(name: &str, n: usize, params_digest: String, tolerance: f64, message: String) -> Self {
        let mut details = BTreeMap::new();
        details.insert("error".to_string(), Detail::Text(message));
        PropertyReport {
            name: name.to_string(),
            n,
            params_digest,
            sample_points: Vec::new(),
            residual: f64::MAX,
            tolerance,
            passed: false,
            runtime_ms: 0.0,
            expect_fail: false,
            details,
        }
    }

    /// Merges reports of the same check at several points: the worst residual wins.
    pub fn aggregate(name: &str, reports: Vec<PropertyReport>) -> Option<PropertyReport> {
        let mut iter = reports.into_iter();
        let mut out = iter.next()?;
        out.name = name.to_string();
        let mut count = 1;
        for r in iter {
            count += 1;
            out.runtime_ms += r.runtime_ms;
            out.sample_points.extend(r.sample_points);
            if r.params_digest != out.params_digest {
                out.params_digest = "multiple parameter sets".to_string();
            }
            if r.residual > out.residual || r.residual.is_nan() {
                out.residual = r.residual;
                out.details = r.details;
            }
            out.tolerance = out.tolerance.min(r.tolerance);
        }
        out.passed = out.residual <= out.tolerance;
        out.details.insert("points".to_string(), Detail::Number(count as f64));
        Some(out)
    }
}

/// Collects the pieces of a report while a check runs.
pub(crate) struct Probe {
    name: String,
    n: usize,
    digest: String,
    start: Instant,
    points: Vec<SamplePoint>,
    details: BTreeMap<String, Detail>,
    expect_fail: bool,
}

impl Probe {
    pub fn new(name: &str, params: &ModelParams) -> Self {
        Probe {
            name: name.to_string(),
            n: params.n,
            digest: params.digest(),
            start: Instant::now(),
            points: Vec::new(),
            details: BTreeMap::new(),
            expect_fail: false,
        }
    }

    pub fn point(&mut self, label: &str, z: LogComplex) {
        self.points.push(SamplePoint {
            label: label.to_string(),
            log: [z.log().re, z.log().im],
        });
    }

    pub fn number(&mut self, key: &str, value: f64) {
        self.details.insert(key.to_string(), Detail::Number(value));
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) {
        self.details.insert(key.to_string(), Detail::Text(value.into()));
    }

    pub fn series(&mut self, key: &str, values: Vec<f64>) {
        self.details.insert(key.to_string(), Detail::Series(values));
    }

    pub fn flag(&mut self, key: &str, value: bool) {
        self.details.insert(key.to_string(), Detail::Flag(value));
    }

    pub fn canary(&mut self) {
        self.expect_fail = true;
    }

    pub fn finish(self, residual: f64, tolerance: f64) -> PropertyReport {
        PropertyReport {
            name: self.name,
            n: self.n,
            params_digest: self.digest,
            sample_points: self.points,
            residual,
            tolerance,
            passed: residual <= tolerance,
            runtime_ms: self.start.elapsed().as_secs_f64() * 1e3,
            expect_fail: self.expect_fail,
            details: self.details,
        }
    }
}

/// `‖lhs - rhs‖_F / max(‖lhs‖_F, ‖rhs‖_F)`.
pub fn relative_residual(lhs: &TensorOperator, rhs: &TensorOperator) -> f64 {
    let scale = lhs.frobenius_norm().max(rhs.frobenius_norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).frobenius_norm() / scale
    }
}

/// `‖lhs - rhs‖_F / max(1, ‖rhs‖_F)`, for identity-like right-hand sides.
pub fn identity_residual(lhs: &TensorOperator, rhs: &TensorOperator) -> f64 {
    (lhs - rhs).frobenius_norm() / rhs.frobenius_norm().max(1.0)
}
