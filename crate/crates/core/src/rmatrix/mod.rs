//! Model parameters and the R-matrix families built from them.

mod auxiliary;
mod build;
mod limit;
pub(crate) mod scalars;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{LogComplex, TruncationPolicy};

pub use auxiliary::{alpha, build_f, build_g, build_g_half, build_h, build_v};
pub use build::{build_r, pole_margin, swap_slots, trigonometric_bracket};
pub use limit::{removable_limit, LimitRule};
pub use scalars::{eta, kappa_inv, rho, s_coeff, s_hat, tau, unitarity_u};

/// Parameters of the model. All complex quantities are logarithms, so this
/// struct is the single source of branch choices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub log_q: LogComplex,
    pub log_p: LogComplex,
    /// Central charge; the fundamental evaluation representation has 0.
    pub central_charge: f64,
    pub policy: TruncationPolicy,
    /// Minimal distance to non-generic loci accepted when sampling.
    pub genericity_margin: f64,
    /// Smallest denominator factor tolerated before a builder reports a pole.
    pub pole_threshold: f64,
}

impl ModelParams {
    pub fn new(n: usize, log_q: LogComplex, log_p: LogComplex) -> Result<Self> {
        let params = ModelParams {
            n,
            log_q,
            log_p,
            central_charge: 0.0,
            policy: TruncationPolicy::default(),
            genericity_margin: 1e-4,
            pole_threshold: 1e-12,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters from Cartesian values of `q` and `p` (principal logarithms).
    pub fn from_values(n: usize, q: Complex64, p: Complex64) -> Result<Self> {
        Self::new(n, LogComplex::from_value(q)?, LogComplex::from_value(p)?)
    }

    pub fn with_log_p(&self, log_p: LogComplex) -> Result<Self> {
        let mut out = self.clone();
        out.log_p = log_p;
        out.validate()?;
        Ok(out)
    }

    pub fn with_log_q(&self, log_q: LogComplex) -> Result<Self> {
        let mut out = self.clone();
        out.log_q = log_q;
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!("N must be at least 2, got {}", self.n)));
        }
        if !self.log_q.log().is_finite() || !self.log_p.log().is_finite() {
            return Err(Error::Domain("q and p must be finite and nonzero".into()));
        }
        if self.log_p.log().re >= 0.0 {
            return Err(Error::Domain(format!("|p| = {} must be below 1", self.log_p.modulus())));
        }
        if self.log_q.log().re >= 0.0 {
            return Err(Error::Domain(format!(
                "|q^(2N)| = {} must be below 1",
                self.log_q.powf(2.0 * self.n as f64).modulus()
            )));
        }
        if !self.central_charge.is_finite() {
            return Err(Error::Domain("central charge must be finite".into()));
        }
        if !(self.genericity_margin > 0.0 && self.pole_threshold > 0.0) {
            return Err(Error::Domain("margins must be positive".into()));
        }
        self.policy.validate()
    }

    /// Soft genericity guard: near-resonances `q^{2k} = 1` and `p^a q^b = 1`
    /// (|a|, |b| up to 2N), plus |q| close to 1.
    pub fn genericity_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let two_n = 2 * self.n as i64;
        for k in 1..=two_n {
            let gap = (self.log_q.pow_value(2.0 * k as f64) - 1.0).norm();
            if gap <= self.genericity_margin {
                out.push(format!("|q^{} - 1| = {gap:.3e} is within the genericity margin", 2 * k));
            }
        }
        for a in 1..=two_n {
            for b in -two_n..=two_n {
                let log = self.log_p.log() * a as f64 + self.log_q.log() * b as f64;
                let gap = (log.exp() - 1.0).norm();
                if gap <= self.genericity_margin {
                    out.push(format!("|p^{a} q^{b} - 1| = {gap:.3e} is within the genericity margin"));
                }
            }
        }
        if self.log_q.modulus() > 0.95 {
            out.push(format!(
                "|q| = {:.4} is close to 1; theta factors at q^2 lose margin",
                self.log_q.modulus()
            ));
        }
        out
    }

    /// Shifted nome `p* = p q^{-2c}`.
    pub fn p_star(&self) -> LogComplex {
        LogComplex::new(self.log_p.log() - self.log_q.log() * (2.0 * self.central_charge))
    }

    pub fn q(&self) -> Complex64 {
        self.log_q.value()
    }

    pub fn p(&self) -> Complex64 {
        self.log_p.value()
    }

    /// Compact, deterministic description used in reports.
    pub fn digest(&self) -> String {
        let q = self.q();
        let p = self.p();
        format!(
            "N={} q=({:.12e},{:.12e}) p=({:.12e},{:.12e}) c={}",
            self.n, q.re, q.im, p.re, p.im, self.central_charge
        )
    }
}

/// The R-matrix families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RKind {
    EllipticR,
    EllipticRhat,
    /// Explicit N = 2 matrix written through theta functions of base `p^2`.
    EightVertex,
    /// Trigonometric, homogeneous gradation; argument enters unsquared.
    Homogeneous,
    /// Trigonometric, principal gradation; `z^2` appears inside.
    Principal,
    /// Twisted principal matrix obtained as the `p -> 0` limit.
    NonElliptic,
}

impl RKind {
    pub const ALL: [RKind; 6] = [
        RKind::EllipticR,
        RKind::EllipticRhat,
        RKind::EightVertex,
        RKind::Homogeneous,
        RKind::Principal,
        RKind::NonElliptic,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            RKind::EllipticR => "elliptic",
            RKind::EllipticRhat => "elliptic-hat",
            RKind::EightVertex => "eightvertex",
            RKind::Homogeneous => "homogeneous",
            RKind::Principal => "principal",
            RKind::NonElliptic => "nonelliptic",
        }
    }

    pub fn is_elliptic(self) -> bool {
        matches!(self, RKind::EllipticR | RKind::EllipticRhat | RKind::EightVertex)
    }

    pub fn supports(self, n: usize) -> bool {
        self != RKind::EightVertex || n == 2
    }
}

impl fmt::Display for RKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "elliptic" | "r" => Ok(RKind::EllipticR),
            "elliptic-hat" | "rhat" => Ok(RKind::EllipticRhat),
            "eightvertex" | "8v" => Ok(RKind::EightVertex),
            "homogeneous" => Ok(RKind::Homogeneous),
            "principal" => Ok(RKind::Principal),
            "nonelliptic" => Ok(RKind::NonElliptic),
            other => Err(Error::Kind(format!("unknown kind '{other}'"))),
        }
    }
}

/// Smallest denominator factor seen while evaluating an expression.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PoleTracker {
    pub margin: f64,
    pub what: &'static str,
    pub log_arg: Complex64,
}

impl PoleTracker {
    pub fn new() -> Self {
        PoleTracker {
            margin: f64::INFINITY,
            what: "",
            log_arg: Complex64::new(0.0, 0.0),
        }
    }

    pub fn note(&mut self, what: &'static str, log_arg: Complex64, factor: f64) {
        if factor < self.margin || factor.is_nan() {
            self.margin = if factor.is_nan() { 0.0 } else { factor };
            self.what = what;
            self.log_arg = log_arg;
        }
    }

    pub fn check(&self, threshold: f64) -> Result<()> {
        if self.margin < threshold {
            Err(Error::Pole {
                what: self.what.to_string(),
                log_arg: self.log_arg,
                margin: self.margin,
            })
        } else {
            Ok(())
        }
    }
}
