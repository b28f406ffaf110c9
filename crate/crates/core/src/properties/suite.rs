//! The full verification suite for one N, as named checks that can run independently.

use std::collections::BTreeMap;

use super::*;
use crate::error::{Error, Result};
use crate::qdet;
use crate::rmatrix::{ModelParams, RKind};
use crate::special::LogComplex;

/// Tolerances by check name, with per-name overrides.
///
/// An override key matches a check either exactly or as a family prefix
/// (`ybe` covers `ybe_elliptic`, `ybe_principal`, ...).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn with_override(mut self, name: &str, value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Config(format!(
                "tolerance for {name} must be a finite non-negative number"
            )));
        }
        self.overrides.insert(name.to_string(), value);
        Ok(self)
    }

    fn lookup(&self, name: &str) -> Option<f64> {
        if let Some(&v) = self.overrides.get(name) {
            return Some(v);
        }
        self.overrides
            .iter()
            .filter(|(k, _)| name.starts_with(k.as_str()) && name[k.len()..].starts_with('_'))
            .max_by_key(|(k, _)| k.len())
            .map(|(_, &v)| v)
    }

    /// `None` only for the p -> 0 check, whose default depends on the sequence.
    pub fn get(&self, name: &str, n: usize) -> Option<f64> {
        if let Some(v) = self.lookup(name) {
            return Some(v);
        }
        Some(match name {
            "theta_identities" | "eightvertex_agreement" | "eightvertex_gauged" => 1e-12,
            "kernel_lemma" => 1e-11,
            "spectrum_nonelliptic" | "qdet_nonelliptic" | "evaluated_ll" => 1e-9,
            "gauge_relation" | "twist_relation" => 1e-10,
            "nsigma" => 0.0,
            "p_to_zero" => return None,
            "qdet_product" => {
                if n <= 2 {
                    1e-8
                } else {
                    1e-7
                }
            }
            "centrality_witness" => {
                if n <= 2 {
                    1e-9
                } else {
                    1e-8
                }
            }
            "qdet_three_way" => 1e-7,
            _ => 1e-8,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub params: ModelParams,
    pub seed: u64,
    /// Random spectral points per point-dependent check.
    pub points: usize,
    pub tolerances: Tolerances,
    pub p_sequence: Vec<f64>,
    /// Fixed spectral arguments; when set they replace the first random draw.
    pub z: Option<LogComplex>,
    pub w: Option<LogComplex>,
}

impl SuiteConfig {
    pub fn new(params: ModelParams, seed: u64) -> Self {
        SuiteConfig {
            params,
            seed,
            points: 10,
            tolerances: Tolerances::default(),
            p_sequence: DEFAULT_P_SEQUENCE.to_vec(),
            z: None,
            w: None,
        }
    }

    /// Names of the checks applicable at this N, in reporting order.
    pub fn check_names(&self) -> Vec<String> {
        let n = self.params.n;
        let mut names: Vec<String> = vec!["theta_identities".into()];
        let kinds: Vec<RKind> = RKind::ALL.iter().copied().filter(|k| k.supports(n)).collect();
        if n == 2 {
            names.push("eightvertex_agreement".into());
            names.push("eightvertex_gauged".into());
        }
        for kind in &kinds {
            names.push(format!("ybe_{kind}"));
        }
        for kind in &kinds {
            names.push(format!("unitarity_{kind}"));
        }
        names.push("regularity_elliptic".into());
        if n == 2 {
            names.push("regularity_eightvertex".into());
        }
        for name in [
            "crossing",
            "antisymmetry",
            "quasi_periodicity",
            "h_invariance",
            "h_invariance_gauged",
            "crossing_unitarity_elliptic",
            "crossing_unitarity_elliptic-hat",
            "transpose_symmetry",
            "kernel_lemma",
            "spectrum_nonelliptic",
            "gauge_relation",
            "twist_relation",
            "nsigma",
            "p_to_zero",
            "evaluated_ll",
        ] {
            names.push(name.into());
        }
        if n <= qdet::PERMUTATION_SUM_MAX_N {
            names.extend(
                [
                    "qdet_closed_form",
                    "q_independence",
                    "z_independence",
                    "qdet_nonelliptic",
                ]
                .map(String::from),
            );
        }
        if n <= qdet::QDET_PRODUCT_MAX_N {
            names.extend(
                [
                    "qdet_product",
                    "qdet_three_way",
                    "qdet_inverse_product",
                    "centrality_witness",
                ]
                .map(String::from),
            );
        }
        names
    }

    fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name, self.params.n).unwrap_or(f64::NAN)
    }

    /// Runs one named check. Errors become failed reports rather than aborting.
    pub fn run_check(&self, name: &str) -> PropertyReport {
        let mut sampler = Sampler::new(self.seed ^ name_hash(name));
        let tolerance = self.tolerances.get(name, self.params.n);
        match self.dispatch(name, &mut sampler) {
            Ok(report) => report,
            Err(e) => PropertyReport::errored(
                name,
                self.params.n,
                self.params.digest(),
                tolerance.unwrap_or(f64::NAN),
                e.to_string(),
            ),
        }
    }

    fn dispatch(&self, name: &str, sampler: &mut Sampler) -> Result<PropertyReport> {
        let p = &self.params;
        let tol = self.tolerance(name);
        let kinds: Vec<RKind> = RKind::ALL.iter().copied().filter(|k| k.supports(p.n)).collect();
        let kind_of = |prefix: &str| -> Result<RKind> { name[prefix.len()..].parse() };

        if name == "theta_identities" {
            return check_theta_identities(sampler, 50, &p.policy, tol);
        }
        if name == "nsigma" {
            return check_nsigma(p.n.clamp(5, 6));
        }
        if name == "kernel_lemma" {
            return check_kernel_lemma(p, 1e-8, tol);
        }
        if name == "spectrum_nonelliptic" {
            return check_spectrum_nonelliptic(p, tol);
        }
        if let Some(rest) = name.strip_prefix("regularity_") {
            return check_regularity(p, rest.parse()?, tol);
        }
        if name == "z_independence" {
            let mut points = Vec::with_capacity(self.points.max(2));
            for i in 0..self.points.max(2) {
                points.push(self.point(sampler, i, self.z, &kinds)?);
            }
            return qdet::check_z_independence(p, &points, tol);
        }
        if name == "p_to_zero" {
            let tolerance = self.tolerances.get(name, p.n);
            return self.over_points(name, sampler, &[RKind::NonElliptic], |z, _, _| {
                check_p_to_zero(p, z, &self.p_sequence, tolerance)
            });
        }

        let guard: Vec<RKind> = if name.starts_with("ybe_") || name.starts_with("unitarity_") {
            vec![kind_of(if name.starts_with("ybe_") { "ybe_" } else { "unitarity_" })?]
        } else if name == "gauge_relation" {
            vec![RKind::Principal]
        } else if name == "twist_relation" {
            vec![RKind::Principal, RKind::NonElliptic]
        } else {
            vec![RKind::EllipticR, RKind::EllipticRhat]
        };

        self.over_points(name, sampler, &guard, |z, w, s| match name {
            _ if name.starts_with("ybe_") => {
                let kind = kind_of("ybe_")?;
                let z3 = s.generic_z(p, &[kind])?;
                check_ybe(p, kind, z, w, z3, tol)
            }
            _ if name.starts_with("unitarity_") => check_unitarity(p, kind_of("unitarity_")?, z, tol),
            _ if name.starts_with("crossing_unitarity_") => {
                check_crossing_unitarity(p, kind_of("crossing_unitarity_")?, z, tol)
            }
            "eightvertex_agreement" => check_eightvertex_agreement(p, z, tol),
            "eightvertex_gauged" => check_eightvertex_gauged(p, z, tol),
            "crossing" => check_crossing(p, z, tol),
            "antisymmetry" => check_antisymmetry(p, z, tol),
            "quasi_periodicity" => check_quasi_periodicity(p, z, tol),
            "h_invariance" => check_h_invariance(p, z, tol),
            "h_invariance_gauged" => check_h_invariance_gauged(p, z, tol),
            "transpose_symmetry" => check_transpose_symmetry(p, z, tol),
            "gauge_relation" => check_gauge_relation(p, z, w, tol),
            "twist_relation" => check_twist_relation(p, z, tol),
            "evaluated_ll" => check_evaluated_ll(p, z, tol),
            "qdet_product" => qdet::check_qdet_product(p, z, tol),
            "qdet_closed_form" => qdet::check_closed_form(p, z, tol),
            "q_independence" => {
                let other = s.params(p.n)?.log_q;
                qdet::check_q_independence(p, z, other, tol)
            }
            "qdet_three_way" => qdet::check_three_way(p, z, tol),
            "qdet_nonelliptic" => qdet::check_nonelliptic_qdet(p, z, tol),
            "qdet_inverse_product" => qdet::check_inverse_product(p, z, tol),
            "centrality_witness" => qdet::centrality_witness(p, z, w, tol),
            other => Err(Error::Config(format!("unknown check '{other}'"))),
        })
    }

    fn point(
        &self,
        sampler: &mut Sampler,
        index: usize,
        fixed: Option<LogComplex>,
        kinds: &[RKind],
    ) -> Result<LogComplex> {
        match fixed {
            Some(z) if index == 0 => Ok(z),
            _ => sampler.generic_z(&self.params, kinds),
        }
    }

    /// Runs a single-point check at `points` spectral arguments (resampling on
    /// poles) and aggregates the reports.
    fn over_points<F>(&self, name: &str, sampler: &mut Sampler, kinds: &[RKind], check: F) -> Result<PropertyReport>
    where
        F: Fn(LogComplex, LogComplex, &mut Sampler) -> Result<PropertyReport>,
    {
        let mut reports = Vec::with_capacity(self.points);
        for i in 0..self.points.max(1) {
            let fixed = i == 0 && (self.z.is_some() || self.w.is_some());
            let report = if fixed {
                let z = self.point(sampler, 0, self.z, kinds)?;
                let w = self.point(sampler, 0, self.w, kinds)?;
                check(z, w, sampler)?
            } else {
                resample(sampler, |s| {
                    let z = s.generic_z(&self.params, kinds)?;
                    let w = s.generic_z(&self.params, kinds)?;
                    check(z, w, s)
                })?
            };
            reports.push(report);
        }
        PropertyReport::aggregate(name, reports).ok_or_else(|| Error::Config("no points".into()))
    }
}

/// Runs every applicable check in order.
pub fn run_suite(config: &SuiteConfig) -> Vec<PropertyReport> {
    config.check_names().iter().map(|name| config.run_check(name)).collect()
}

/// FNV-1a, so each check draws from its own reproducible stream.
fn name_hash(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}
